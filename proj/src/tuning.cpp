#include "ugs/tuning.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <numeric>
#include <optional>
#include <ostream>
#include <tuple>

#include "ugs/errors.hpp"

namespace ugs {

namespace {

bool ranks_before(const EvaluationRow& a, const EvaluationRow& b) {
  if (a.coherence != b.coherence) return a.coherence > b.coherence;
  if (a.log_likelihood != b.log_likelihood) return a.log_likelihood < b.log_likelihood;
  return std::make_tuple(a.alpha.describe(), a.beta, a.k) < std::make_tuple(b.alpha.describe(), b.beta, b.k);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string cell_name(const HyperParams& hp, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, ", beta=%g, k=%zu", hp.beta, hp.k);
  return "cell " + std::to_string(index) + " (alpha=" + hp.alpha.describe() + buf + ")";
}

[[noreturn]] void rethrow_with_context(std::exception_ptr error, const std::string& context) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(context + ": " + e.what());
  }
}

GridSearchResult assemble(std::vector<std::optional<CellResult>>& cells) {
  GridSearchResult result;
  for (const auto& c : cells) result.report.rows.push_back(c->row);
  result.best = select_best(result.report.rows);
  result.best_model = std::move(cells[result.best]->model);
  return result;
}

}  // namespace

std::vector<std::size_t> rank_rows(std::span<const EvaluationRow> rows) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks_before(rows[a], rows[b]); });
  return order;
}

std::size_t select_best(std::span<const EvaluationRow> rows) {
  if (rows.empty()) throw std::invalid_argument("cannot select from an empty report");
  return rank_rows(rows).front();
}

void write_report_csv(std::ostream& out, const EvaluationReport& report) {
  out << "alpha,beta,coherence,perplexity,k,coherence_pmi,coherence_umass,classic_perplexity\n";
  for (const auto& r : report.rows) {
    char beta[32];
    std::snprintf(beta, sizeof beta, "%g", r.beta);
    out << r.alpha.describe() << ',' << beta << ',' << fmt(r.coherence) << ',' << fmt(r.log_likelihood) << ','
        << r.k << ',' << fmt(r.coherence_pmi) << ',' << fmt(r.coherence_umass) << ',' << fmt(r.perplexity) << '\n';
  }
}

void SearchGrid::validate() const {
  if (alphas.empty() || betas.empty() || ks.empty()) throw ConfigError("every grid candidate list must be non-empty");
  for (auto k : ks)
    if (k < 2) throw ConfigError("grid K candidates must be at least 2");
  for (double b : betas)
    if (!(b > 0.0)) throw ConfigError("grid beta candidates must be positive");
}

HyperParams SearchGrid::cell(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("grid cell index out of range");
  HyperParams hp;
  const std::size_t k_idx = index % ks.size();
  const std::size_t b_idx = (index / ks.size()) % betas.size();
  const std::size_t a_idx = index / (ks.size() * betas.size());
  hp.alpha = alphas[a_idx];
  hp.beta = betas[b_idx];
  hp.k = ks[k_idx];
  hp.seed = base_seed + index;
  hp.iterations = iterations;
  hp.burn_in = burn_in;
  hp.average_samples = average_samples;
  return hp;
}

CellResult evaluate_cell(const SplitCorpus& corpus, const Vocabulary& vocab, const HyperParams& hp,
                         const EvaluationSettings& settings) {
  TopicModel model = train(corpus.train, vocab, hp);
  CooccurrenceOptions co = settings.cooccurrence;
  co.tracked = top_word_set(model, settings.top_n);
  const auto stats = build_cooccurrence(corpus.train_tokens, co);
  const auto coherence = model_coherence(model, stats, settings.top_n);
  const auto ppl = corpus.heldout.empty() ? training_perplexity(model, corpus.train)
                                          : heldout_perplexity(model, corpus.heldout, settings.fold_in);
  EvaluationRow row;
  row.alpha = hp.alpha;
  row.beta = hp.beta;
  row.k = hp.k;
  row.coherence_pmi = coherence.pmi;
  row.coherence_umass = coherence.umass;
  row.coherence = settings.ranking == CoherenceMeasure::Pmi ? coherence.pmi : coherence.umass;
  row.log_likelihood = ppl.log_likelihood_per_word;
  row.perplexity = ppl.perplexity;
  return {row, std::move(model)};
}

GridSearchResult grid_search(const SplitCorpus& corpus, const Vocabulary& vocab, const SearchGrid& grid,
                             const EvaluationSettings& settings) {
  grid.validate();
  const auto n = static_cast<std::int64_t>(grid.size());
  std::vector<std::optional<CellResult>> cells(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      cells[i] = evaluate_cell(corpus, vocab, grid.cell(static_cast<std::size_t>(i)), settings);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i]) rethrow_with_context(errors[i], cell_name(grid.cell(i), i));
  return assemble(cells);
}

namespace reference {

GridSearchResult grid_search(const SplitCorpus& corpus, const Vocabulary& vocab, const SearchGrid& grid,
                             const EvaluationSettings& settings) {
  grid.validate();
  std::vector<std::optional<CellResult>> cells(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      cells[i] = evaluate_cell(corpus, vocab, grid.cell(i), settings);
    } catch (...) {
      rethrow_with_context(std::current_exception(), cell_name(grid.cell(i), i));
    }
  }
  return assemble(cells);
}

}  // namespace reference

}  // namespace ugs
