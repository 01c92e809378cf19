#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ugs/evaluation.hpp"
#include "ugs/lda.hpp"

namespace ugs {

enum class CoherenceMeasure { Pmi, UMass };

// One configuration with its scores; mirrors the columns of the parameter
// comparison table (alpha, beta, coherence, perplexity) plus K and extras.
struct EvaluationRow {
  AlphaSpec alpha = AlphaSpec::symmetric();
  double beta = 0.0;
  std::size_t k = 0;
  double coherence = 0.0;        // the measure used for ranking
  double log_likelihood = 0.0;   // per-word, negative ("perplexity" column)
  double coherence_pmi = 0.0;
  double coherence_umass = 0.0;
  double perplexity = 0.0;       // exp(-log_likelihood)
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;
};

// Ranking: coherence descending, then per-word log-likelihood ascending,
// then (alpha descriptor, beta, k) ascending so the winner depends only on
// row contents. Throws std::invalid_argument for an empty report.
std::size_t select_best(std::span<const EvaluationRow> rows);
// Row indices in rank order.
std::vector<std::size_t> rank_rows(std::span<const EvaluationRow> rows);

// CSV: alpha,beta,coherence,perplexity,k,coherence_pmi,coherence_umass,classic_perplexity
void write_report_csv(std::ostream& out, const EvaluationReport& report);

struct SearchGrid {
  std::vector<AlphaSpec> alphas = {AlphaSpec::symmetric(), AlphaSpec::scalar(0.05), AlphaSpec::scalar(0.1),
                                   AlphaSpec::scalar(0.2)};
  std::vector<double> betas = {0.2, 0.3};
  std::vector<std::size_t> ks = {5};
  std::uint64_t base_seed = 1;
  std::size_t iterations = 500;
  std::size_t burn_in = 100;
  bool average_samples = false;

  std::size_t size() const { return alphas.size() * betas.size() * ks.size(); }
  // Throws ConfigError for an empty candidate list or K < 2.
  void validate() const;
  // Cell `index` in alpha-major, then beta, then K order; seed = base_seed + index.
  HyperParams cell(std::size_t index) const;
};

struct EvaluationSettings {
  std::size_t top_n = 10;
  CoherenceMeasure ranking = CoherenceMeasure::Pmi;
  CooccurrenceOptions cooccurrence{};
  FoldInOptions fold_in{};
};

// Documents split into the training part and the held-out part used for perplexity.
struct SplitCorpus {
  std::vector<Tokens> train_tokens;
  std::vector<BowDocument> train;
  std::vector<BowDocument> heldout;
};

struct CellResult {
  EvaluationRow row;
  TopicModel model;
};

// Trains and scores one cell: coherence from `train_tokens`, perplexity on `heldout`.
CellResult evaluate_cell(const SplitCorpus& corpus, const Vocabulary& vocab, const HyperParams& hp,
                         const EvaluationSettings& settings);

struct GridSearchResult {
  EvaluationReport report;
  std::size_t best = 0;
  TopicModel best_model;
};

// Cells train concurrently with OpenMP; rows come back in cell order. A cell
// failure is rethrown as the same error type prefixed with the cell identity.
GridSearchResult grid_search(const SplitCorpus& corpus, const Vocabulary& vocab, const SearchGrid& grid,
                             const EvaluationSettings& settings = {});

}  // namespace ugs

namespace ugs::reference {

GridSearchResult grid_search(const SplitCorpus& corpus, const Vocabulary& vocab, const SearchGrid& grid,
                             const EvaluationSettings& settings = {});

}  // namespace ugs::reference
