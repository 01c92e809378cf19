#pragma once

// Dirichlet topic model trained by collapsed Gibbs sampling.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ugs/matrix.hpp"
#include "ugs/rng.hpp"
#include "ugs/text_prep.hpp"
#include "ugs/vectorizer.hpp"

namespace ugs {

// Document-topic concentration: "symmetric" (1/K per topic), one scalar for
// every topic, or an explicit per-topic vector.
class AlphaSpec {
 public:
  enum class Kind { Symmetric, Scalar, Vector };

  static AlphaSpec symmetric() { return AlphaSpec(Kind::Symmetric, 0.0, {}); }
  static AlphaSpec scalar(double value) { return AlphaSpec(Kind::Scalar, value, {}); }
  static AlphaSpec per_topic(std::vector<double> values) { return AlphaSpec(Kind::Vector, 0.0, std::move(values)); }

  Kind kind() const { return kind_; }

  // Throws ConfigError on a non-positive entry or a vector of the wrong length.
  std::vector<double> resolve(std::size_t k) const;

  // "symmetric", the scalar as printed by %g, or "[a;b;...]".
  std::string describe() const;

  nlohmann::json to_json() const;
  static AlphaSpec from_json(const nlohmann::json& j);

  bool operator==(const AlphaSpec&) const = default;

 private:
  AlphaSpec(Kind kind, double value, std::vector<double> values)
      : kind_(kind), value_(value), values_(std::move(values)) {}

  Kind kind_;
  double value_;
  std::vector<double> values_;
};

struct HyperParams {
  std::size_t k = 5;
  AlphaSpec alpha = AlphaSpec::symmetric();
  double beta = 0.2;
  std::uint64_t seed = 1;
  std::size_t iterations = 1000;
  std::size_t burn_in = 200;
  // Average the Θ/θ estimates over post-burn-in sweeps instead of using the final state.
  bool average_samples = false;

  // Throws ConfigError. K = 1 is accepted only with allow_single_topic.
  void validate(bool allow_single_topic = false) const;

  nlohmann::json to_json() const;
  static HyperParams from_json(const nlohmann::json& j);

  bool operator==(const HyperParams&) const = default;
};

// Topic assignment per token plus the three count tables it implies.
struct SamplerState {
  std::vector<std::uint32_t> token_doc;
  std::vector<TokenId> token_word;
  std::vector<std::uint32_t> topic;
  std::vector<std::uint32_t> doc_length;
  Matrix<std::uint32_t> doc_topic;   // D x K
  Matrix<std::uint32_t> topic_word;  // K x V
  std::vector<std::uint32_t> topic_total;

  // Recounts everything from the assignments and compares, plus the marginals
  // Σ_k n_dk = len_d and Σ_v n_kv = n_k.
  bool counts_consistent() const;
};

class GibbsSampler {
 public:
  GibbsSampler(const std::vector<BowDocument>& docs, std::size_t vocab_size, const HyperParams& hp,
               bool allow_single_topic = false);

  // One pass over every token in corpus order.
  void sweep();

  std::size_t sweeps() const { return sweeps_; }
  const SamplerState& state() const { return state_; }
  std::span<const std::uint32_t> assignments() const { return state_.topic; }
  std::span<const double> alpha() const { return alpha_; }

  // log p(w, z | α, β) of the current state with Θ and θ integrated out.
  double joint_log_likelihood() const;

  // Smoothed point estimates from the current counts.
  Matrix<double> topic_word_estimate() const;
  Matrix<double> doc_topic_estimate() const;

 private:
  HyperParams hp_;
  std::vector<double> alpha_;
  double alpha_sum_ = 0.0;
  std::size_t vocab_size_;
  SamplerState state_;
  Xoshiro256 rng_;
  std::vector<double> cumulative_;
  std::size_t sweeps_ = 0;
};

class TopicModel {
 public:
  TopicModel() = default;

  // Wraps externally supplied distributions. Rows must lie on the simplex
  // (sum 1 ± 1e-9, entries ≥ 0); throws std::invalid_argument otherwise.
  static TopicModel from_distributions(HyperParams hp, Vocabulary vocab, Matrix<double> topic_word,
                                       Matrix<double> doc_topic);

  const HyperParams& hyperparams() const { return hp_; }
  std::span<const double> alpha() const { return alpha_; }
  std::size_t topic_count() const { return topic_word_.rows(); }
  std::size_t vocab_size() const { return topic_word_.cols(); }
  std::size_t document_count() const { return doc_topic_.rows(); }
  const Vocabulary& vocabulary() const { return vocab_; }
  const Matrix<double>& topic_word() const { return topic_word_; }
  const Matrix<double>& doc_topic() const { return doc_topic_; }
  const std::vector<double>& training_log() const { return training_log_; }
  const SurfaceForms& surface_forms() const { return surfaces_; }
  void set_surface_forms(SurfaceForms surfaces) { surfaces_ = std::move(surfaces); }

  // Final sampler state of the training run; absent for loaded or wrapped models.
  const std::optional<SamplerState>& final_state() const { return final_state_; }

  nlohmann::json to_json() const;
  static TopicModel from_json(const nlohmann::json& j);

 private:
  friend TopicModel train(const std::vector<BowDocument>&, const Vocabulary&, const HyperParams&, bool);

  HyperParams hp_;
  std::vector<double> alpha_;
  Vocabulary vocab_;
  Matrix<double> topic_word_;
  Matrix<double> doc_topic_;
  std::vector<double> training_log_;
  SurfaceForms surfaces_;
  std::optional<SamplerState> final_state_;
};

// Γ(α₀)/∏Γ(α_i) · ∏ z_i^(α_i−1). Throws std::invalid_argument for z off the
// simplex, a zero coordinate where α_i ≠ 1, or non-positive α.
double dirichlet_pdf(std::span<const double> z, std::span<const double> alpha);

// Collapsed Gibbs sampling for hp.iterations sweeps, deterministic in hp.seed.
// Throws DataError for an empty corpus, an empty document, or K above the
// total token count; ConfigError for invalid hyperparameters.
TopicModel train(const std::vector<BowDocument>& docs, const Vocabulary& vocab, const HyperParams& hp,
                 bool allow_single_topic = false);

// Σ_docs max_k Σ_tokens count·ln Θ_{k,v}.
double log_likelihood(const TopicModel& model, const std::vector<BowDocument>& docs);

// Σ_k θ_k Θ_{k,v} for a document-topic vector θ.
double predictive_word_probability(const TopicModel& model, std::span<const double> theta, TokenId v);
// Same, for training document `doc_index`.
double predictive_word_probability(const TopicModel& model, std::size_t doc_index, TokenId v);

// argmax_k Σ count·ln Θ_{k,v}, lowest index on ties. Throws std::invalid_argument for an empty document.
std::size_t assign_topic(const TopicModel& model, const BowDocument& doc);
std::vector<std::size_t> assign_topics(const TopicModel& model, const std::vector<BowDocument>& docs);

struct TopWord {
  TokenId id;
  std::string token;    // vocabulary token (stem or phrase)
  std::string display;  // most frequent surface form
  double weight;
};

struct TopicTopWords {
  std::size_t topic;
  std::vector<TopWord> words;  // weight non-increasing, token id ascending on ties

  std::vector<std::string> tokens() const;
};

// n highest-Θ words, clamped to V. Throws std::out_of_range for a bad topic.
TopicTopWords top_words(const TopicModel& model, std::size_t topic, std::size_t n);

struct FoldInOptions {
  std::size_t iterations = 60;
  std::size_t burn_in = 20;
  std::uint64_t seed = 7;
};

// θ for an unseen document by Gibbs sampling its assignments with Θ held
// fixed; estimates averaged over post-burn-in sweeps. Empty docs get the
// prior mean α/α₀.
std::vector<double> infer_theta(const TopicModel& model, const BowDocument& doc, const FoldInOptions& options,
                                std::uint64_t doc_seed);

}  // namespace ugs
