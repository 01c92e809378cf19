#include "ugs/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ugs/csv.hpp"
#include "ugs/errors.hpp"
#include "ugs/evaluation.hpp"

namespace ugs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return empty;
  if (!it->is_object()) throw ConfigError(std::string("config section '") + key + "' must be an object");
  return *it;
}

std::optional<fs::path> path_field(const json& j, const char* key, const fs::path& base) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(std::string("config path '") + key + "' must be a string");
  fs::path p = it->get<std::string>();
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::optional<Date> date_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(std::string("config field '") + key + "' must be a date string");
  auto d = parse_date(it->get<std::string>());
  if (!d) throw ConfigError(std::string("config field '") + key + "' is not a valid date");
  return d;
}

SearchGrid grid_from_json(const json& g) {
  SearchGrid grid;
  if (g.contains("alpha")) {
    if (!g["alpha"].is_array()) throw ConfigError("grid.alpha must be an array");
    grid.alphas.clear();
    for (const auto& a : g["alpha"]) grid.alphas.push_back(AlphaSpec::from_json(a));
  }
  grid.betas = get_or(g, "beta", grid.betas);
  grid.ks = get_or(g, "k", grid.ks);
  grid.base_seed = get_or(g, "seed", grid.base_seed);
  grid.iterations = get_or(g, "iterations", grid.iterations);
  grid.burn_in = get_or(g, "burn_in", grid.burn_in);
  grid.average_samples = get_or(g, "average_samples", grid.average_samples);
  grid.validate();
  HyperParams probe = grid.cell(0);
  probe.validate();
  return grid;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

fs::path ensure_out_dir(const PipelineConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
  return config.out_dir;
}

const fs::path& require(const std::optional<fs::path>& p, const char* what) {
  if (!p) throw ConfigError(std::string("config is missing inputs.") + what);
  return *p;
}

json phrases_to_json(const PhraseModel& m) {
  json bigrams = json::array();
  for (const auto& [pair, score] : m.bigrams) bigrams.push_back({pair.first, pair.second, score});
  json trigrams = json::array();
  for (const auto& [tri, score] : m.trigrams) trigrams.push_back({tri[0], tri[1], tri[2], score});
  return {{"threshold", m.threshold}, {"min_count", m.min_count}, {"bigrams", bigrams}, {"trigrams", trigrams}};
}

PhraseModel phrases_from_json(const json& j) {
  PhraseModel m;
  try {
    m.threshold = j.at("threshold").get<double>();
    m.min_count = j.at("min_count").get<std::size_t>();
    for (const auto& b : j.at("bigrams")) m.bigrams[{b.at(0).get<std::string>(), b.at(1).get<std::string>()}] = b.at(2).get<double>();
    for (const auto& t : j.at("trigrams"))
      m.trigrams[{t.at(0).get<std::string>(), t.at(1).get<std::string>(), t.at(2).get<std::string>()}] =
          t.at(3).get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed phrase table: ") + e.what());
  }
  return m;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_output(path);
  out << j.dump(1) << '\n';
}

Corpus load_filtered_reviews(const PipelineConfig& config) {
  Corpus corpus = load_reviews(require(config.reviews, "reviews"));
  if (config.date_from || config.date_to) {
    corpus = filter_by_date(corpus, config.date_from, config.date_to);
    if (corpus.empty()) throw DataError("no reviews inside the requested date range");
  }
  return corpus;
}

fs::path write_topics(const PipelineConfig& config, const TopicModel& model) {
  const fs::path path = config.out_dir / (config.format == ReportFormat::Csv ? "topics.csv" : "topics.md");
  auto out = open_output(path);
  if (config.format == ReportFormat::Csv)
    write_topics_csv(out, model, config.report_top_n);
  else
    write_topics_markdown(out, model, config.report_top_n);
  return path;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;

  const json& inputs = section(j, "inputs");
  c.districts = path_field(inputs, "districts", base_dir);
  c.reviews = path_field(inputs, "reviews", base_dir);
  c.fixture = path_field(inputs, "fixture", base_dir);
  c.stopwords = path_field(inputs, "stopwords", base_dir);

  const json& venue = section(j, "venue_api");
  const std::string mode = get_or<std::string>(venue, "mode", "fixture");
  if (mode == "fixture")
    c.venue.mode = VenueApiClient::Mode::Fixture;
  else if (mode == "live")
    c.venue.mode = VenueApiClient::Mode::Live;
  else
    throw ConfigError("venue_api.mode must be 'fixture' or 'live'");
  c.venue.base_url = get_or(venue, "base_url", c.venue.base_url);
  c.venue.radius_m = get_or(venue, "radius", c.venue.radius_m);
  if (!(c.venue.radius_m > 0.0)) throw ConfigError("venue_api.radius must be positive");
  c.venue.query = get_or(venue, "query", c.venue.query);
  if (venue.contains("limit") && !venue["limit"].is_null()) c.venue.limit = get_or<int>(venue, "limit", 0);
  c.venue.min_interval = std::chrono::milliseconds(get_or<long long>(venue, "min_request_interval_ms", 500));
  const std::string measure = get_or<std::string>(venue, "popularity", "sum");
  if (measure == "sum")
    c.venue.measure = PopularityMeasure::Sum;
  else if (measure == "mean")
    c.venue.measure = PopularityMeasure::MeanPerVenue;
  else
    throw ConfigError("venue_api.popularity must be 'sum' or 'mean'");

  const json& prep = section(j, "prep");
  c.prep.min_token_length = get_or(prep, "min_token_length", c.prep.min_token_length);
  c.prep.phrase_min_count = get_or(prep, "phrase_min_count", c.prep.phrase_min_count);
  c.prep.phrase_threshold = get_or(prep, "phrase_threshold", c.prep.phrase_threshold);
  c.prep.english_min_ratio = get_or(prep, "english_min_ratio", c.prep.english_min_ratio);
  c.prep.lemmatize = get_or(prep, "lemmatize", c.prep.lemmatize);
  c.detect_phrases = get_or(prep, "detect_phrases", c.detect_phrases);
  if (prep.contains("strip")) {
    c.prep.strip_patterns.clear();
    for (const auto& s : get_or<std::vector<std::string>>(prep, "strip", {})) {
      if (s == "url") c.prep.strip_patterns.push_back(StripRule::Url);
      else if (s == "email") c.prep.strip_patterns.push_back(StripRule::Email);
      else if (s == "emoji") c.prep.strip_patterns.push_back(StripRule::Emoji);
      else if (s == "whitespace") c.prep.strip_patterns.push_back(StripRule::ExtraWhitespace);
      else throw ConfigError("unknown prep.strip rule '" + s + "'");
    }
  }
  if (c.stopwords) c.prep.stopwords = load_word_list(*c.stopwords);
  c.prep.validate();

  const json& vec = section(j, "vectorizer");
  c.vectorizer.filter_extremes = get_or(vec, "filter_extremes", c.vectorizer.filter_extremes);
  c.vectorizer.min_df = get_or(vec, "min_df", c.vectorizer.min_df);
  c.vectorizer.max_df_fraction = get_or(vec, "max_df_fraction", c.vectorizer.max_df_fraction);

  const bool has_model = j.contains("model") && !j["model"].is_null();
  const bool has_grid = j.contains("grid") && !j["grid"].is_null();
  if (has_model && has_grid) throw ConfigError("config may define either 'model' or 'grid', not both");
  if (has_model) {
    c.model = HyperParams::from_json(section(j, "model"));
    c.model->validate();
  }
  if (has_grid) c.grid = grid_from_json(section(j, "grid"));

  const json& ev = section(j, "evaluation");
  c.evaluation.top_n = get_or(ev, "top_n", c.evaluation.top_n);
  if (c.evaluation.top_n < 2) throw ConfigError("evaluation.top_n must be at least 2");
  const std::string measure_name = get_or<std::string>(ev, "coherence", "pmi");
  if (measure_name == "pmi")
    c.evaluation.ranking = CoherenceMeasure::Pmi;
  else if (measure_name == "umass")
    c.evaluation.ranking = CoherenceMeasure::UMass;
  else
    throw ConfigError("evaluation.coherence must be 'pmi' or 'umass'");
  c.evaluation.cooccurrence.window = get_or(ev, "window", c.evaluation.cooccurrence.window);
  if (c.evaluation.cooccurrence.window == 1) throw ConfigError("evaluation.window must be 0 or at least 2");
  c.evaluation.fold_in.iterations = get_or(ev, "fold_in_iterations", c.evaluation.fold_in.iterations);
  c.evaluation.fold_in.burn_in = get_or(ev, "fold_in_burn_in", c.evaluation.fold_in.burn_in);
  if (c.evaluation.fold_in.burn_in >= c.evaluation.fold_in.iterations)
    throw ConfigError("evaluation.fold_in_burn_in must be below fold_in_iterations");
  c.heldout_fraction = get_or(ev, "heldout_fraction", c.heldout_fraction);
  if (c.heldout_fraction < 0.0 || c.heldout_fraction >= 1.0)
    throw ConfigError("evaluation.heldout_fraction must lie in [0, 1)");

  const json& report = section(j, "report");
  const std::string format = get_or<std::string>(report, "format", "csv");
  if (format == "csv")
    c.format = ReportFormat::Csv;
  else if (format == "markdown")
    c.format = ReportFormat::Markdown;
  else
    throw ConfigError("report.format must be 'csv' or 'markdown'");
  c.report_top_n = get_or(report, "top_words", c.report_top_n);
  if (c.report_top_n < 1) throw ConfigError("report.top_words must be at least 1");

  const json& filter = section(j, "filter");
  c.date_from = date_field(filter, "from");
  c.date_to = date_field(filter, "to");

  if (auto out = path_field(j, "out_dir", base_dir)) c.out_dir = *out;
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void PipelineConfig::override_seed(std::uint64_t seed) {
  if (model) model->seed = seed;
  if (grid) grid->base_seed = seed;
}

PreparedCorpus prepare_corpus(const Corpus& corpus, const PipelineConfig& config, bool hold_out) {
  PreparedCorpus out;
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& r : corpus.reviews) {
    std::string text = r.text();
    if (!is_english(text, config.prep)) {
      ++out.dropped_non_english;
      continue;
    }
    texts.push_back(std::move(text));
  }
  if (out.dropped_non_english) warn(std::to_string(out.dropped_non_english) + " non-English review(s) dropped");

  std::vector<Tokens> docs = preprocess_corpus(texts, config.prep, &out.surfaces);
  const std::size_t held = hold_out && config.heldout_fraction > 0.0 ? heldout_count(docs.size(), config.heldout_fraction) : 0;
  const std::size_t train_n = docs.size() - held;

  std::vector<Tokens> train_docs(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(train_n));
  if (config.detect_phrases && !train_docs.empty()) {
    out.phrases = build_phrase_model(train_docs, config.prep);
    for (auto& d : docs) d = apply_phrases(d, out.phrases);
    train_docs.assign(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(train_n));
  }

  bool any_tokens = false;
  for (const auto& d : train_docs) any_tokens = any_tokens || !d.empty();
  if (!any_tokens) throw DataError("every review is empty after preprocessing");
  out.vocab = build_vocabulary(train_docs);
  if (config.vectorizer.filter_extremes)
    out.vocab = filter_extremes(out.vocab, config.vectorizer.min_df, config.vectorizer.max_df_fraction);

  const auto bows = to_bow_corpus(docs, out.vocab);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (bows[i].empty()) {
      ++out.dropped_empty;
      continue;
    }
    if (i < train_n) {
      Tokens kept;
      for (const auto& t : docs[i])
        if (out.vocab.find(t)) kept.push_back(t);
      out.split.train_tokens.push_back(std::move(kept));
      out.split.train.push_back(bows[i]);
    } else {
      out.split.heldout.push_back(bows[i]);
    }
  }
  if (out.dropped_empty) warn(std::to_string(out.dropped_empty) + " document(s) empty after preprocessing excluded");
  if (out.split.train.empty()) throw DataError("every review is empty after preprocessing");
  return out;
}

std::string format_weight(double weight) {
  const auto scaled = static_cast<long long>(std::floor(weight * 1000.0 + 0.5));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", scaled / 1000, scaled % 1000);
  return buf;
}

void write_topics_csv(std::ostream& out, const TopicModel& model, std::size_t top_n) {
  out << "topic,rank,word,token,weight\n";
  for (std::size_t t = 0; t < model.topic_count(); ++t) {
    const auto top = top_words(model, t, top_n);
    for (std::size_t i = 0; i < top.words.size(); ++i) {
      const auto& w = top.words[i];
      out << (t + 1) << ',' << (i + 1) << ',' << csv::escape(w.display) << ',' << csv::escape(w.token) << ','
          << format_weight(w.weight) << '\n';
    }
  }
}

void write_topics_markdown(std::ostream& out, const TopicModel& model, std::size_t top_n) {
  out << "| Topic | Keywords and weights |\n|---|---|\n";
  for (std::size_t t = 0; t < model.topic_count(); ++t) {
    const auto top = top_words(model, t, top_n);
    out << "| Topic #" << (t + 1) << " | ";
    for (std::size_t i = 0; i < top.words.size(); ++i)
      out << (i ? " · " : "") << '"' << top.words[i].display << "\": " << format_weight(top.words[i].weight);
    out << " |\n";
  }
}

void save_model(const fs::path& path, const TopicModel& model) { write_json(path, model.to_json()); }

TopicModel load_model(const fs::path& path) { return TopicModel::from_json(read_json(path)); }

CommandOutput cmd_ingest_venues(const PipelineConfig& config) {
  const auto districts = load_districts(require(config.districts, "districts"));
  if (districts.empty()) throw ConfigError("no districts in " + config.districts->string());

  std::optional<VenueApiClient> client;
  if (config.venue.mode == VenueApiClient::Mode::Fixture)
    client = VenueApiClient::fixture(require(config.fixture, "fixture"));
  else
    client = VenueApiClient::live(config.venue.base_url, Credentials::from_environment(), config.venue.min_interval);

  IngestOptions options;
  options.radius_m = config.venue.radius_m;
  options.query = config.venue.query;
  options.limit = config.venue.limit;
  options.measure = config.venue.measure;
  const auto result = ingest_venues(districts, *client, options);

  const fs::path dir = ensure_out_dir(config);
  CommandOutput out;
  {
    auto f = open_output(dir / "venues.csv");
    write_venues_csv(f, result.venues);
    out.written.push_back(dir / "venues.csv");
  }
  {
    auto f = open_output(dir / "ranking.csv");
    write_ranking_csv(f, result.ranking, config.venue.measure);
    out.written.push_back(dir / "ranking.csv");
  }
  if (!result.failed_districts.empty()) {
    std::string msg = "venue search failed for " + std::to_string(result.failed_districts.size()) + " district(s):";
    for (const auto& f : result.failed_districts) msg += "\n  " + f;
    throw BackendError(msg);
  }
  return out;
}

namespace {

void save_model_with_phrases(const fs::path& path, const TopicModel& model, const PhraseModel& phrases) {
  json j = model.to_json();
  j["phrases"] = phrases_to_json(phrases);
  write_json(path, j);
}

}  // namespace

CommandOutput cmd_train(const PipelineConfig& config) {
  if (config.grid) throw ConfigError("train expects a 'model' section, found 'grid'");
  const HyperParams hp = config.model.value_or(HyperParams{});
  const Corpus corpus = load_filtered_reviews(config);
  PreparedCorpus prepared = prepare_corpus(corpus, config, false);

  TopicModel model = train(prepared.split.train, prepared.vocab, hp);
  model.set_surface_forms(std::move(prepared.surfaces));

  const fs::path dir = ensure_out_dir(config);
  CommandOutput out;
  save_model_with_phrases(dir / "model.json", model, prepared.phrases);
  out.written.push_back(dir / "model.json");
  out.written.push_back(write_topics(config, model));
  return out;
}

CommandOutput cmd_sweep(const PipelineConfig& config) {
  if (config.model) throw ConfigError("sweep expects a 'grid' section, found 'model'");
  if (!config.grid) throw ConfigError("sweep requires a 'grid' section");
  const Corpus corpus = load_filtered_reviews(config);
  PreparedCorpus prepared = prepare_corpus(corpus, config, true);

  auto result = grid_search(prepared.split, prepared.vocab, *config.grid, config.evaluation);
  result.best_model.set_surface_forms(std::move(prepared.surfaces));

  const fs::path dir = ensure_out_dir(config);
  CommandOutput out;
  {
    auto f = open_output(dir / "sweep.csv");
    write_report_csv(f, result.report);
    out.written.push_back(dir / "sweep.csv");
  }
  save_model_with_phrases(dir / "model.json", result.best_model, prepared.phrases);
  out.written.push_back(dir / "model.json");
  out.written.push_back(write_topics(config, result.best_model));
  return out;
}

CommandOutput cmd_evaluate(const PipelineConfig& config, const fs::path& model_path) {
  const json j = read_json(model_path);
  const TopicModel model = TopicModel::from_json(j);
  const PhraseModel phrases = j.contains("phrases") ? phrases_from_json(j["phrases"]) : PhraseModel{};
  const Corpus corpus = load_filtered_reviews(config);

  std::vector<std::string> texts;
  for (const auto& r : corpus.reviews)
    if (is_english(r.text(), config.prep)) texts.push_back(r.text());
  std::vector<Tokens> docs = preprocess_corpus(texts, config.prep);
  std::vector<Tokens> kept_tokens;
  std::vector<BowDocument> bows;
  for (auto& d : docs) {
    d = apply_phrases(d, phrases);
    auto bow = to_bow(d, model.vocabulary());
    if (bow.empty()) continue;
    Tokens kept;
    for (const auto& t : d)
      if (model.vocabulary().find(t)) kept.push_back(t);
    kept_tokens.push_back(std::move(kept));
    bows.push_back(std::move(bow));
  }
  if (bows.empty()) throw DataError("no review shares vocabulary with the model");

  CooccurrenceOptions co = config.evaluation.cooccurrence;
  co.tracked = top_word_set(model, config.evaluation.top_n);
  const auto stats = build_cooccurrence(kept_tokens, co);
  // Top words absent from these reviews have no probability to score.
  for (const auto& token : *co.tracked)
    if (!stats.contains(token))
      throw DataError("top word '" + token + "' does not occur in the evaluation reviews");
  const auto coherence = model_coherence(model, stats, config.evaluation.top_n);
  const auto ppl = heldout_perplexity(model, bows, config.evaluation.fold_in);

  EvaluationRow row;
  row.alpha = model.hyperparams().alpha;
  row.beta = model.hyperparams().beta;
  row.k = model.topic_count();
  row.coherence_pmi = coherence.pmi;
  row.coherence_umass = coherence.umass;
  row.coherence = config.evaluation.ranking == CoherenceMeasure::Pmi ? coherence.pmi : coherence.umass;
  row.log_likelihood = ppl.log_likelihood_per_word;
  row.perplexity = ppl.perplexity;

  const fs::path dir = ensure_out_dir(config);
  auto f = open_output(dir / "evaluation.csv");
  write_report_csv(f, EvaluationReport{{row}});
  return {{dir / "evaluation.csv"}};
}

CommandOutput cmd_report(const PipelineConfig& config, const fs::path& model_path) {
  const TopicModel model = load_model(model_path);
  ensure_out_dir(config);
  return {{write_topics(config, model)}};
}

}  // namespace ugs
