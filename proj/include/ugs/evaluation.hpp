#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ugs/lda.hpp"
#include "ugs/text_prep.hpp"

namespace ugs {

inline constexpr double kCoherenceEpsilon = 1e-12;

struct CooccurrenceOptions {
  // 0 counts co-occurrence over whole documents; w >= 2 slides a window of
  // w tokens and treats every window position as a document.
  std::size_t window = 0;
  // Restricts joint counts to pairs inside this set; df is kept for every token.
  std::optional<std::unordered_set<std::string>> tracked;
  double epsilon = kCoherenceEpsilon;
};

class CooccurrenceStats {
 public:
  std::size_t document_count() const { return documents_; }
  double epsilon() const { return epsilon_; }

  // Throws std::invalid_argument for a token never seen.
  std::size_t df(const std::string& token) const;
  // Throws std::invalid_argument for an unseen or untracked token.
  std::size_t joint(const std::string& a, const std::string& b) const;

  double probability(const std::string& token) const;
  double joint_probability(const std::string& a, const std::string& b) const;

  bool contains(const std::string& token) const { return index_.count(token) != 0; }

  bool operator==(const CooccurrenceStats& other) const;

 private:
  friend CooccurrenceStats build_cooccurrence(const std::vector<Tokens>&, const CooccurrenceOptions&);
  friend CooccurrenceStats reference_build_cooccurrence(const std::vector<Tokens>&, const CooccurrenceOptions&);

  static std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }
  std::uint32_t id_of(const std::string& token) const;

  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::size_t> df_;
  std::vector<bool> tracked_;
  std::unordered_map<std::uint64_t, std::size_t> joint_;
  std::size_t documents_ = 0;
  double epsilon_ = kCoherenceEpsilon;
};

// Parallel over documents. Throws DataError on an empty corpus.
CooccurrenceStats build_cooccurrence(const std::vector<Tokens>& token_docs, const CooccurrenceOptions& options = {});

// ln(P(a,b) / (P(a) P(b))), with P(a,b) = 0 replaced by ε.
double pmi_pair(const std::string& a, const std::string& b, const CooccurrenceStats& stats);

// Mean PMI over all distinct pairs of the top words. Throws std::invalid_argument for N < 2.
double coherence_pmi(const TopicTopWords& top, const CooccurrenceStats& stats);

// 2/(N(N−1)) Σ_{i≥2} Σ_{j<i} ln(P(v_i,v_j) / P(v_j)), words in weight order; a zero
// joint probability is replaced by ε as in pmi_pair.
double coherence_umass(const TopicTopWords& top, const CooccurrenceStats& stats);

struct ModelCoherence {
  double pmi = 0.0;
  double umass = 0.0;
  std::vector<double> per_topic_pmi;
  std::vector<double> per_topic_umass;
};

// Means over topics of the two coherence measures for the top `n` words.
ModelCoherence model_coherence(const TopicModel& model, const CooccurrenceStats& stats, std::size_t n);

// Union of every topic's top-n tokens, for CooccurrenceOptions::tracked.
std::unordered_set<std::string> top_word_set(const TopicModel& model, std::size_t n);

struct PerplexityResult {
  double log_likelihood_per_word = 0.0;  // negative; the reported "perplexity"
  double perplexity = 0.0;               // exp(-log_likelihood_per_word)
  std::size_t token_count = 0;
};

// Per-word predictive log-likelihood with p(w) = Σ_k θ_{d,k} Θ_{k,w}. Throws
// DataError when there are zero tokens.
PerplexityResult perplexity(const TopicModel& model, const std::vector<BowDocument>& docs,
                            const std::vector<std::vector<double>>& thetas);

// Same over the model's own training documents and θ.
PerplexityResult training_perplexity(const TopicModel& model, const std::vector<BowDocument>& docs);

// Held-out documents, θ estimated per document by fold-in. Parallel; each
// document's sampler seed depends only on its index.
PerplexityResult heldout_perplexity(const TopicModel& model, const std::vector<BowDocument>& docs,
                                    const FoldInOptions& options = {});

// Number of trailing documents held out: floor(n * fraction), at least 1 when n >= 2.
std::size_t heldout_count(std::size_t n, double fraction);

}  // namespace ugs

namespace ugs::reference {

CooccurrenceStats build_cooccurrence(const std::vector<Tokens>& token_docs, const CooccurrenceOptions& options = {});

PerplexityResult heldout_perplexity(const TopicModel& model, const std::vector<BowDocument>& docs,
                                    const FoldInOptions& options = {});

}  // namespace ugs::reference
