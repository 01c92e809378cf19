#include "ugs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ugs/errors.hpp"
#include "ugs/parallel.hpp"

namespace ugs {

namespace {

// Token ids of each counting unit (document or window), deduplicated and sorted.
std::vector<std::vector<std::uint32_t>> units_of(const Tokens& doc, std::size_t window,
                                                 const std::unordered_map<std::string, std::uint32_t>& index) {
  std::vector<std::uint32_t> ids;
  ids.reserve(doc.size());
  for (const auto& t : doc) ids.push_back(index.at(t));
  std::vector<std::vector<std::uint32_t>> units;
  const auto add_unit = [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> u(ids.begin() + static_cast<std::ptrdiff_t>(begin),
                                 ids.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    units.push_back(std::move(u));
  };
  if (window == 0 || ids.size() <= window) {
    add_unit(0, ids.size());
  } else {
    for (std::size_t s = 0; s + window <= ids.size(); ++s) add_unit(s, s + window);
  }
  return units;
}

struct Partial {
  std::vector<std::size_t> df;
  std::unordered_map<std::uint64_t, std::size_t> joint;
  std::size_t documents = 0;
};

void count_units(const std::vector<std::vector<std::uint32_t>>& units, const std::vector<bool>& tracked,
                 Partial& acc) {
  std::vector<std::uint32_t> kept;
  for (const auto& u : units) {
    ++acc.documents;
    kept.clear();
    for (auto id : u) {
      ++acc.df[id];
      if (tracked[id]) kept.push_back(id);
    }
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = i + 1; j < kept.size(); ++j)
        ++acc.joint[(static_cast<std::uint64_t>(kept[i]) << 32) | kept[j]];
  }
}

void validate_options(const CooccurrenceOptions& options) {
  if (options.window == 1) throw std::invalid_argument("co-occurrence window must be 0 or at least 2");
  if (!(options.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

}  // namespace

std::uint32_t CooccurrenceStats::id_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw std::invalid_argument("unknown token '" + token + "'");
  return it->second;
}

std::size_t CooccurrenceStats::df(const std::string& token) const { return df_[id_of(token)]; }

std::size_t CooccurrenceStats::joint(const std::string& a, const std::string& b) const {
  const auto ia = id_of(a);
  const auto ib = id_of(b);
  if (ia == ib) return df_[ia];
  if (!tracked_[ia] || !tracked_[ib]) throw std::invalid_argument("pair (" + a + ", " + b + ") is not tracked");
  auto it = joint_.find(pair_key(ia, ib));
  return it == joint_.end() ? 0 : it->second;
}

double CooccurrenceStats::probability(const std::string& token) const {
  return static_cast<double>(df(token)) / static_cast<double>(documents_);
}

double CooccurrenceStats::joint_probability(const std::string& a, const std::string& b) const {
  return static_cast<double>(joint(a, b)) / static_cast<double>(documents_);
}

bool CooccurrenceStats::operator==(const CooccurrenceStats& other) const {
  return index_ == other.index_ && df_ == other.df_ && tracked_ == other.tracked_ && joint_ == other.joint_ &&
         documents_ == other.documents_ && epsilon_ == other.epsilon_;
}

namespace {

// Shared set-up: token index in first-appearance order and the tracked mask.
CooccurrenceStats make_skeleton(const std::vector<Tokens>& token_docs, const CooccurrenceOptions& options,
                                std::unordered_map<std::string, std::uint32_t>& index, std::vector<bool>& tracked) {
  if (token_docs.empty()) throw DataError("cannot build co-occurrence statistics from an empty corpus");
  validate_options(options);
  for (const auto& doc : token_docs)
    for (const auto& t : doc) index.emplace(t, static_cast<std::uint32_t>(index.size()));
  tracked.assign(index.size(), !options.tracked.has_value());
  if (options.tracked)
    for (const auto& t : *options.tracked)
      if (auto it = index.find(t); it != index.end()) tracked[it->second] = true;
  return {};
}

}  // namespace

CooccurrenceStats build_cooccurrence(const std::vector<Tokens>& token_docs, const CooccurrenceOptions& options) {
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<bool> tracked;
  CooccurrenceStats stats = make_skeleton(token_docs, options, index, tracked);

  const int threads = parallel::max_threads();
  std::vector<Partial> partials(static_cast<std::size_t>(threads));
  for (auto& p : partials) p.df.assign(index.size(), 0);
  const auto n = static_cast<std::int64_t>(token_docs.size());
#pragma omp parallel num_threads(threads)
  {
    auto& acc = partials[static_cast<std::size_t>(parallel::thread_id())];
#pragma omp for schedule(dynamic, 32)
    for (std::int64_t d = 0; d < n; ++d) count_units(units_of(token_docs[d], options.window, index), tracked, acc);
  }

  // Integer counts, so merge order does not affect the result.
  stats.df_.assign(index.size(), 0);
  for (auto& p : partials) {
    stats.documents_ += p.documents;
    for (std::size_t i = 0; i < p.df.size(); ++i) stats.df_[i] += p.df[i];
    for (const auto& [key, count] : p.joint) stats.joint_[key] += count;
  }
  stats.index_ = std::move(index);
  stats.tracked_ = std::move(tracked);
  stats.epsilon_ = options.epsilon;
  return stats;
}

CooccurrenceStats reference_build_cooccurrence(const std::vector<Tokens>& token_docs,
                                               const CooccurrenceOptions& options) {
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<bool> tracked;
  CooccurrenceStats stats = make_skeleton(token_docs, options, index, tracked);
  Partial acc;
  acc.df.assign(index.size(), 0);
  for (const auto& doc : token_docs) count_units(units_of(doc, options.window, index), tracked, acc);
  stats.documents_ = acc.documents;
  stats.df_ = std::move(acc.df);
  stats.joint_ = std::move(acc.joint);
  stats.index_ = std::move(index);
  stats.tracked_ = std::move(tracked);
  stats.epsilon_ = options.epsilon;
  return stats;
}

namespace {

// ε stands in for a joint probability of zero so the logarithm stays finite;
// observed co-occurrence is used as is.
double smoothed_joint(const CooccurrenceStats& stats, const std::string& a, const std::string& b) {
  const double p = stats.joint_probability(a, b);
  return p > 0.0 ? p : stats.epsilon();
}

}  // namespace

double pmi_pair(const std::string& a, const std::string& b, const CooccurrenceStats& stats) {
  const double pa = stats.probability(a);
  const double pb = stats.probability(b);
  if (pa == 0.0 || pb == 0.0) throw std::invalid_argument("pmi needs tokens with df >= 1");
  return std::log(smoothed_joint(stats, a, b) / (pa * pb));
}

double coherence_pmi(const TopicTopWords& top, const CooccurrenceStats& stats) {
  const auto words = top.tokens();
  const std::size_t n = words.size();
  if (n < 2) throw std::invalid_argument("coherence needs at least two top words");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += pmi_pair(words[i], words[j], stats);
  return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double coherence_umass(const TopicTopWords& top, const CooccurrenceStats& stats) {
  const auto words = top.tokens();
  const std::size_t n = words.size();
  if (n < 2) throw std::invalid_argument("coherence needs at least two top words");
  double sum = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double pj = stats.probability(words[j]);
      if (pj == 0.0) throw std::invalid_argument("umass needs tokens with df >= 1");
      sum += std::log(smoothed_joint(stats, words[i], words[j]) / pj);
    }
  }
  return 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1)) * sum;
}

ModelCoherence model_coherence(const TopicModel& model, const CooccurrenceStats& stats, std::size_t n) {
  ModelCoherence out;
  for (std::size_t t = 0; t < model.topic_count(); ++t) {
    const auto top = top_words(model, t, n);
    out.per_topic_pmi.push_back(coherence_pmi(top, stats));
    out.per_topic_umass.push_back(coherence_umass(top, stats));
  }
  const double k = static_cast<double>(model.topic_count());
  for (double v : out.per_topic_pmi) out.pmi += v;
  for (double v : out.per_topic_umass) out.umass += v;
  out.pmi /= k;
  out.umass /= k;
  return out;
}

std::unordered_set<std::string> top_word_set(const TopicModel& model, std::size_t n) {
  std::unordered_set<std::string> out;
  for (std::size_t t = 0; t < model.topic_count(); ++t)
    for (auto& token : top_words(model, t, n).tokens()) out.insert(std::move(token));
  return out;
}

namespace {

double doc_log_likelihood(const TopicModel& model, const BowDocument& doc, std::span<const double> theta) {
  double ll = 0.0;
  for (const auto& e : doc.entries) ll += e.count * std::log(predictive_word_probability(model, theta, e.id));
  return ll;
}

PerplexityResult finish(const std::vector<double>& per_doc, std::size_t tokens) {
  if (tokens == 0) throw DataError("perplexity needs at least one token");
  double total = 0.0;
  for (double v : per_doc) total += v;  // fixed order keeps results thread-count independent
  PerplexityResult r;
  r.token_count = tokens;
  r.log_likelihood_per_word = total / static_cast<double>(tokens);
  r.perplexity = std::exp(-r.log_likelihood_per_word);
  return r;
}

std::size_t total_tokens(const std::vector<BowDocument>& docs) {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.length();
  return n;
}

}  // namespace

PerplexityResult perplexity(const TopicModel& model, const std::vector<BowDocument>& docs,
                            const std::vector<std::vector<double>>& thetas) {
  if (thetas.size() != docs.size()) throw std::invalid_argument("one theta per document required");
  std::vector<double> per_doc(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) per_doc[d] = doc_log_likelihood(model, docs[d], thetas[d]);
  return finish(per_doc, total_tokens(docs));
}

PerplexityResult training_perplexity(const TopicModel& model, const std::vector<BowDocument>& docs) {
  if (docs.size() != model.document_count()) throw std::invalid_argument("documents do not match the model");
  std::vector<double> per_doc(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d)
    per_doc[d] = doc_log_likelihood(model, docs[d], model.doc_topic().row(d));
  return finish(per_doc, total_tokens(docs));
}

PerplexityResult heldout_perplexity(const TopicModel& model, const std::vector<BowDocument>& docs,
                                    const FoldInOptions& options) {
  std::vector<double> per_doc(docs.size());
  const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t d = 0; d < n; ++d) {
    const auto theta = infer_theta(model, docs[d], options, derive_seed(options.seed, static_cast<std::uint64_t>(d)));
    per_doc[d] = doc_log_likelihood(model, docs[d], theta);
  }
  return finish(per_doc, total_tokens(docs));
}

std::size_t heldout_count(std::size_t n, double fraction) {
  if (n < 2 || fraction <= 0.0) return 0;
  const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

namespace reference {

CooccurrenceStats build_cooccurrence(const std::vector<Tokens>& token_docs, const CooccurrenceOptions& options) {
  return reference_build_cooccurrence(token_docs, options);
}

PerplexityResult heldout_perplexity(const TopicModel& model, const std::vector<BowDocument>& docs,
                                    const FoldInOptions& options) {
  std::vector<double> per_doc(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto theta = infer_theta(model, docs[d], options, derive_seed(options.seed, d));
    per_doc[d] = doc_log_likelihood(model, docs[d], theta);
  }
  return finish(per_doc, total_tokens(docs));
}

}  // namespace reference

}  // namespace ugs
