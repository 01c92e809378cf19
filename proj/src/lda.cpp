#include "ugs/lda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "ugs/errors.hpp"

namespace ugs {

namespace {

constexpr double kSimplexTolerance = 1e-9;

// std::lgamma writes the global signgam; the reentrant form keeps parallel
// training runs race-free.
double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void check_simplex_rows(const Matrix<double>& m, const char* what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (double x : m.row(r)) {
      if (!(x >= 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(what) + " row " + std::to_string(r) + " has a negative entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw std::invalid_argument(std::string(what) + " row " + std::to_string(r) + " is not on the simplex");
  }
}

nlohmann::json matrix_to_json(const Matrix<double>& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

Matrix<double> matrix_from_json(const nlohmann::json& j, std::size_t cols_hint) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : cols_hint;
  Matrix<double> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (row.size() != cols) throw DataError("ragged matrix in model file");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hyperparameters

std::vector<double> AlphaSpec::resolve(std::size_t k) const {
  if (k == 0) throw ConfigError("topic count must be positive");
  switch (kind_) {
    case Kind::Symmetric:
      return std::vector<double>(k, 1.0 / static_cast<double>(k));
    case Kind::Scalar:
      if (!(value_ > 0.0)) throw ConfigError("alpha must be positive");
      return std::vector<double>(k, value_);
    case Kind::Vector:
      if (values_.size() != k)
        throw ConfigError("alpha vector has " + std::to_string(values_.size()) + " entries for K=" + std::to_string(k));
      for (double a : values_)
        if (!(a > 0.0)) throw ConfigError("alpha entries must be positive");
      return values_;
  }
  return {};
}

std::string AlphaSpec::describe() const {
  switch (kind_) {
    case Kind::Symmetric:
      return "symmetric";
    case Kind::Scalar:
      return format_g(value_);
    case Kind::Vector: {
      std::string out = "[";
      for (std::size_t i = 0; i < values_.size(); ++i) out += (i ? ";" : "") + format_g(values_[i]);
      return out + "]";
    }
  }
  return {};
}

nlohmann::json AlphaSpec::to_json() const {
  switch (kind_) {
    case Kind::Symmetric:
      return "symmetric";
    case Kind::Scalar:
      return value_;
    case Kind::Vector:
      return values_;
  }
  return nullptr;
}

AlphaSpec AlphaSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "symmetric") return symmetric();
    throw ConfigError("alpha must be \"symmetric\", a number, or an array of numbers");
  }
  if (j.is_number()) return scalar(j.get<double>());
  if (j.is_array()) {
    std::vector<double> values;
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError("alpha array entries must be numbers");
      values.push_back(v.get<double>());
    }
    return per_topic(std::move(values));
  }
  throw ConfigError("alpha must be \"symmetric\", a number, or an array of numbers");
}

void HyperParams::validate(bool allow_single_topic) const {
  if (k < 2 && !(allow_single_topic && k == 1)) throw ConfigError("number of topics must be at least 2");
  alpha.resolve(k);
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (iterations < 1) throw ConfigError("iterations must be at least 1");
  if (burn_in >= iterations) throw ConfigError("burn_in must be smaller than iterations");
}

nlohmann::json HyperParams::to_json() const {
  return {{"k", k},
          {"alpha", alpha.to_json()},
          {"beta", beta},
          {"seed", seed},
          {"iterations", iterations},
          {"burn_in", burn_in},
          {"average_samples", average_samples}};
}

HyperParams HyperParams::from_json(const nlohmann::json& j) {
  HyperParams hp;
  try {
    if (j.contains("k")) hp.k = j.at("k").get<std::size_t>();
    if (j.contains("alpha")) hp.alpha = AlphaSpec::from_json(j.at("alpha"));
    if (j.contains("beta")) hp.beta = j.at("beta").get<double>();
    if (j.contains("seed")) hp.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("iterations")) hp.iterations = j.at("iterations").get<std::size_t>();
    if (j.contains("burn_in")) hp.burn_in = j.at("burn_in").get<std::size_t>();
    if (j.contains("average_samples")) hp.average_samples = j.at("average_samples").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid model hyperparameters: ") + e.what());
  }
  return hp;
}

// ---------------------------------------------------------------------------
// Sampler

bool SamplerState::counts_consistent() const {
  const std::size_t docs = doc_topic.rows();
  const std::size_t k = doc_topic.cols();
  Matrix<std::uint32_t> dt(docs, k);
  Matrix<std::uint32_t> tw(topic_word.rows(), topic_word.cols());
  std::vector<std::uint32_t> tt(k, 0);
  for (std::size_t j = 0; j < topic.size(); ++j) {
    if (topic[j] >= k) return false;
    ++dt(token_doc[j], topic[j]);
    ++tw(topic[j], token_word[j]);
    ++tt[topic[j]];
  }
  if (dt != doc_topic || tw != topic_word || tt != topic_total) return false;
  for (std::size_t d = 0; d < docs; ++d) {
    const auto row = doc_topic.row(d);
    if (std::accumulate(row.begin(), row.end(), std::uint64_t{0}) != doc_length[d]) return false;
  }
  for (std::size_t t = 0; t < k; ++t) {
    const auto row = topic_word.row(t);
    if (std::accumulate(row.begin(), row.end(), std::uint64_t{0}) != topic_total[t]) return false;
  }
  return true;
}

GibbsSampler::GibbsSampler(const std::vector<BowDocument>& docs, std::size_t vocab_size, const HyperParams& hp,
                           bool allow_single_topic)
    : hp_(hp), vocab_size_(vocab_size), rng_(hp.seed) {
  hp_.validate(allow_single_topic);
  if (docs.empty()) throw DataError("cannot train on an empty corpus");
  if (vocab_size_ == 0) throw DataError("cannot train with an empty vocabulary");
  alpha_ = hp_.alpha.resolve(hp_.k);
  alpha_sum_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);

  const std::size_t k = hp_.k;
  state_.doc_topic = Matrix<std::uint32_t>(docs.size(), k);
  state_.topic_word = Matrix<std::uint32_t>(k, vocab_size_);
  state_.topic_total.assign(k, 0);
  state_.doc_length.assign(docs.size(), 0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].empty()) throw DataError("document " + std::to_string(d) + " is empty");
    for (const auto& e : docs[d].entries) {
      if (e.id >= vocab_size_) throw DataError("token id outside the vocabulary in document " + std::to_string(d));
      for (std::uint32_t c = 0; c < e.count; ++c) {
        state_.token_doc.push_back(static_cast<std::uint32_t>(d));
        state_.token_word.push_back(e.id);
      }
      state_.doc_length[d] += e.count;
    }
  }
  if (k > state_.token_doc.size())
    throw DataError("K=" + std::to_string(k) + " exceeds the total token count " +
                    std::to_string(state_.token_doc.size()));

  state_.topic.resize(state_.token_doc.size());
  for (std::size_t j = 0; j < state_.topic.size(); ++j) {
    const auto t = static_cast<std::uint32_t>(rng_.below(k));
    state_.topic[j] = t;
    ++state_.doc_topic(state_.token_doc[j], t);
    ++state_.topic_word(t, state_.token_word[j]);
    ++state_.topic_total[t];
  }
  cumulative_.resize(k);
}

void GibbsSampler::sweep() {
  const std::size_t k = hp_.k;
  const double beta = hp_.beta;
  const double vbeta = static_cast<double>(vocab_size_) * beta;
  auto& s = state_;
  for (std::size_t j = 0; j < s.topic.size(); ++j) {
    const auto d = s.token_doc[j];
    const auto v = s.token_word[j];
    const auto old = s.topic[j];
    --s.doc_topic(d, old);
    --s.topic_word(old, v);
    --s.topic_total[old];

    double total = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      total += (s.doc_topic(d, t) + alpha_[t]) * (s.topic_word(t, v) + beta) / (s.topic_total[t] + vbeta);
      cumulative_[t] = total;
    }
    const double u = rng_.uniform() * total;
    std::size_t chosen = 0;
    while (chosen + 1 < k && u >= cumulative_[chosen]) ++chosen;

    const auto t = static_cast<std::uint32_t>(chosen);
    s.topic[j] = t;
    ++s.doc_topic(d, t);
    ++s.topic_word(t, v);
    ++s.topic_total[t];
  }
  ++sweeps_;
  assert(s.counts_consistent());
}

double GibbsSampler::joint_log_likelihood() const {
  const std::size_t k = hp_.k;
  const double beta = hp_.beta;
  const double vbeta = static_cast<double>(vocab_size_) * beta;
  double ll = 0.0;
  double lg_alpha = 0.0;
  for (double a : alpha_) lg_alpha += log_gamma(a);
  for (std::size_t d = 0; d < state_.doc_topic.rows(); ++d) {
    ll += log_gamma(alpha_sum_) - log_gamma(state_.doc_length[d] + alpha_sum_) - lg_alpha;
    for (std::size_t t = 0; t < k; ++t) ll += log_gamma(state_.doc_topic(d, t) + alpha_[t]);
  }
  const double lg_beta = log_gamma(beta);
  for (std::size_t t = 0; t < k; ++t) {
    ll += log_gamma(vbeta) - log_gamma(state_.topic_total[t] + vbeta);
    for (std::size_t v = 0; v < vocab_size_; ++v) {
      const auto n = state_.topic_word(t, v);
      if (n) ll += log_gamma(n + beta) - lg_beta;
    }
  }
  return ll;
}

Matrix<double> GibbsSampler::topic_word_estimate() const {
  const std::size_t k = hp_.k;
  Matrix<double> phi(k, vocab_size_);
  const double vbeta = static_cast<double>(vocab_size_) * hp_.beta;
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(k); ++t) {
    const double denom = state_.topic_total[t] + vbeta;
    for (std::size_t v = 0; v < vocab_size_; ++v) phi(t, v) = (state_.topic_word(t, v) + hp_.beta) / denom;
  }
  return phi;
}

Matrix<double> GibbsSampler::doc_topic_estimate() const {
  const std::size_t k = hp_.k;
  const std::size_t docs = state_.doc_topic.rows();
  Matrix<double> theta(docs, k);
#pragma omp parallel for schedule(static)
  for (std::int64_t d = 0; d < static_cast<std::int64_t>(docs); ++d) {
    const double denom = state_.doc_length[d] + alpha_sum_;
    for (std::size_t t = 0; t < k; ++t) theta(d, t) = (state_.doc_topic(d, t) + alpha_[t]) / denom;
  }
  return theta;
}

// ---------------------------------------------------------------------------
// Model

TopicModel TopicModel::from_distributions(HyperParams hp, Vocabulary vocab, Matrix<double> topic_word,
                                          Matrix<double> doc_topic) {
  if (topic_word.rows() == 0) throw std::invalid_argument("model needs at least one topic");
  if (topic_word.cols() != vocab.size())
    throw std::invalid_argument("topic-word width does not match the vocabulary");
  if (doc_topic.rows() && doc_topic.cols() != topic_word.rows())
    throw std::invalid_argument("doc-topic width does not match the topic count");
  check_simplex_rows(topic_word, "topic-word");
  check_simplex_rows(doc_topic, "doc-topic");
  hp.k = topic_word.rows();
  TopicModel m;
  m.alpha_ = hp.alpha.resolve(hp.k);
  m.hp_ = std::move(hp);
  m.vocab_ = std::move(vocab);
  m.topic_word_ = std::move(topic_word);
  m.doc_topic_ = std::move(doc_topic);
  return m;
}

nlohmann::json TopicModel::to_json() const {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(vocab_.hash()));
  nlohmann::json surfaces = nlohmann::json::object();
  for (const auto& [stem, forms] : surfaces_.table()) surfaces[stem] = forms;
  return {{"format", "ugs-topic-model"},
          {"version", 1},
          {"hyperparams", hp_.to_json()},
          {"alpha", alpha_},
          {"vocabulary_hash", hash},
          {"vocabulary", vocab_.to_json()},
          {"topic_word", matrix_to_json(topic_word_)},
          {"doc_topic", matrix_to_json(doc_topic_)},
          {"training_log", training_log_},
          {"surface_forms", std::move(surfaces)}};
}

TopicModel TopicModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "ugs-topic-model") throw DataError("not a topic model file");
    HyperParams hp = HyperParams::from_json(j.at("hyperparams"));
    Vocabulary vocab = Vocabulary::from_json(j.at("vocabulary"));
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(vocab.hash()));
    if (j.at("vocabulary_hash").get<std::string>() != hash) throw DataError("vocabulary hash mismatch");
    auto phi = matrix_from_json(j.at("topic_word"), vocab.size());
    auto theta = matrix_from_json(j.at("doc_topic"), phi.rows());
    TopicModel m;
    try {
      m = from_distributions(hp, std::move(vocab), std::move(phi), std::move(theta));
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("invalid model: ") + e.what());
    }
    m.training_log_ = j.value("training_log", std::vector<double>{});
    SurfaceForms surfaces;
    if (j.contains("surface_forms"))
      for (const auto& [stem, forms] : j.at("surface_forms").items())
        for (const auto& [surface, count] : forms.items()) surfaces.add(stem, surface, count.get<std::size_t>());
    m.surfaces_ = std::move(surfaces);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Operations

double dirichlet_pdf(std::span<const double> z, std::span<const double> alpha) {
  if (z.size() != alpha.size() || z.empty()) throw std::invalid_argument("z and alpha must have equal, non-zero length");
  double sum = 0.0;
  for (double x : z) {
    if (!(x >= 0.0)) throw std::invalid_argument("not on simplex: negative coordinate");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) throw std::invalid_argument("not on simplex");
  double alpha0 = 0.0;
  double log_density = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(alpha[i] > 0.0)) throw std::invalid_argument("alpha entries must be positive");
    alpha0 += alpha[i];
    log_density -= log_gamma(alpha[i]);
    if (alpha[i] != 1.0) {
      if (z[i] == 0.0) throw std::invalid_argument("zero coordinate where alpha != 1");
      log_density += (alpha[i] - 1.0) * std::log(z[i]);
    }
  }
  log_density += log_gamma(alpha0);
  return std::exp(log_density);
}

TopicModel train(const std::vector<BowDocument>& docs, const Vocabulary& vocab, const HyperParams& hp,
                 bool allow_single_topic) {
  GibbsSampler sampler(docs, vocab.size(), hp, allow_single_topic);
  TopicModel model;
  model.hp_ = hp;
  model.alpha_ = hp.alpha.resolve(hp.k);
  model.vocab_ = vocab;
  model.training_log_.reserve(hp.iterations);

  Matrix<double> phi_sum;
  Matrix<double> theta_sum;
  std::size_t samples = 0;
  for (std::size_t it = 0; it < hp.iterations; ++it) {
    sampler.sweep();
    model.training_log_.push_back(sampler.joint_log_likelihood());
    if (hp.average_samples && it >= hp.burn_in) {
      auto phi = sampler.topic_word_estimate();
      auto theta = sampler.doc_topic_estimate();
      if (samples == 0) {
        phi_sum = std::move(phi);
        theta_sum = std::move(theta);
      } else {
        for (std::size_t i = 0; i < phi.data().size(); ++i) phi_sum.data()[i] += phi.data()[i];
        for (std::size_t i = 0; i < theta.data().size(); ++i) theta_sum.data()[i] += theta.data()[i];
      }
      ++samples;
    }
  }
  if (hp.average_samples) {
    for (auto& x : phi_sum.data()) x /= static_cast<double>(samples);
    for (auto& x : theta_sum.data()) x /= static_cast<double>(samples);
    model.topic_word_ = std::move(phi_sum);
    model.doc_topic_ = std::move(theta_sum);
  } else {
    model.topic_word_ = sampler.topic_word_estimate();
    model.doc_topic_ = sampler.doc_topic_estimate();
  }
  model.final_state_ = sampler.state();
  return model;
}

namespace {

double topic_log_score(const TopicModel& model, std::size_t topic, const BowDocument& doc) {
  double score = 0.0;
  for (const auto& e : doc.entries) {
    if (e.id >= model.vocab_size()) throw std::invalid_argument("token id outside the model vocabulary");
    score += e.count * std::log(model.topic_word()(topic, e.id));
  }
  return score;
}

}  // namespace

double log_likelihood(const TopicModel& model, const std::vector<BowDocument>& docs) {
  double total = 0.0;
  for (const auto& doc : docs) {
    if (doc.empty()) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < model.topic_count(); ++t) best = std::max(best, topic_log_score(model, t, doc));
    total += best;
  }
  return total;
}

double predictive_word_probability(const TopicModel& model, std::span<const double> theta, TokenId v) {
  if (v >= model.vocab_size()) throw std::invalid_argument("token id outside the model vocabulary");
  if (theta.size() != model.topic_count()) throw std::invalid_argument("theta length does not match K");
  double p = 0.0;
  for (std::size_t t = 0; t < theta.size(); ++t) p += theta[t] * model.topic_word()(t, v);
  return p;
}

double predictive_word_probability(const TopicModel& model, std::size_t doc_index, TokenId v) {
  if (doc_index >= model.document_count()) throw std::out_of_range("document index out of range");
  return predictive_word_probability(model, model.doc_topic().row(doc_index), v);
}

std::size_t assign_topic(const TopicModel& model, const BowDocument& doc) {
  if (doc.empty()) throw std::invalid_argument("unassignable: empty document");
  std::size_t best = 0;
  double best_score = topic_log_score(model, 0, doc);
  for (std::size_t t = 1; t < model.topic_count(); ++t) {
    const double s = topic_log_score(model, t, doc);
    if (s > best_score) {
      best = t;
      best_score = s;
    }
  }
  return best;
}

std::vector<std::size_t> assign_topics(const TopicModel& model, const std::vector<BowDocument>& docs) {
  std::vector<std::size_t> out(docs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(docs.size()); ++i) out[i] = assign_topic(model, docs[i]);
  return out;
}

std::vector<std::string> TopicTopWords::tokens() const {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(w.token);
  return out;
}

TopicTopWords top_words(const TopicModel& model, std::size_t topic, std::size_t n) {
  if (topic >= model.topic_count()) throw std::out_of_range("topic index out of range");
  if (n < 1) throw std::invalid_argument("need at least one top word");
  const auto row = model.topic_word().row(topic);
  std::vector<TokenId> ids(row.size());
  std::iota(ids.begin(), ids.end(), 0);
  const std::size_t take = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(),
                    [&](TokenId a, TokenId b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
  TopicTopWords out{topic, {}};
  for (std::size_t i = 0; i < take; ++i) {
    const auto& token = model.vocabulary().token(ids[i]);
    out.words.push_back({ids[i], token, model.surface_forms().display(token), row[ids[i]]});
  }
  return out;
}

std::vector<double> infer_theta(const TopicModel& model, const BowDocument& doc, const FoldInOptions& options,
                                std::uint64_t doc_seed) {
  const std::size_t k = model.topic_count();
  const auto alpha = model.alpha();
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  std::vector<double> theta(k);
  if (doc.empty()) {
    for (std::size_t t = 0; t < k; ++t) theta[t] = alpha[t] / alpha_sum;
    return theta;
  }
  if (options.burn_in >= options.iterations) throw std::invalid_argument("fold-in burn_in must be below iterations");

  std::vector<TokenId> words;
  for (const auto& e : doc.entries) {
    if (e.id >= model.vocab_size()) throw std::invalid_argument("token id outside the model vocabulary");
    words.insert(words.end(), e.count, e.id);
  }
  Xoshiro256 rng(doc_seed);
  std::vector<std::uint32_t> z(words.size());
  std::vector<std::uint32_t> counts(k, 0);
  for (auto& t : z) {
    t = static_cast<std::uint32_t>(rng.below(k));
    ++counts[t];
  }
  std::vector<double> cumulative(k);
  std::vector<double> sum(k, 0.0);
  const double denom = static_cast<double>(words.size()) + alpha_sum;
  const auto& phi = model.topic_word();
  for (std::size_t it = 0; it < options.iterations; ++it) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      --counts[z[j]];
      double total = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        total += (counts[t] + alpha[t]) * phi(t, words[j]);
        cumulative[t] = total;
      }
      const double u = rng.uniform() * total;
      std::size_t chosen = 0;
      while (chosen + 1 < k && u >= cumulative[chosen]) ++chosen;
      z[j] = static_cast<std::uint32_t>(chosen);
      ++counts[chosen];
    }
    if (it >= options.burn_in)
      for (std::size_t t = 0; t < k; ++t) sum[t] += (counts[t] + alpha[t]) / denom;
  }
  const double samples = static_cast<double>(options.iterations - options.burn_in);
  for (std::size_t t = 0; t < k; ++t) theta[t] = sum[t] / samples;
  return theta;
}

}  // namespace ugs
