#pragma once

// Pipeline configuration and the end-to-end commands behind the CLI.

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ugs/corpus.hpp"
#include "ugs/lda.hpp"
#include "ugs/text_prep.hpp"
#include "ugs/tuning.hpp"
#include "ugs/vectorizer.hpp"
#include "ugs/venue_ingest.hpp"

namespace ugs {

enum class ReportFormat { Csv, Markdown };

struct VenueSettings {
  VenueApiClient::Mode mode = VenueApiClient::Mode::Fixture;
  std::string base_url = "https://api.foursquare.com";
  double radius_m = 1200.0;
  std::string query = "park";
  std::optional<int> limit;
  std::chrono::milliseconds min_interval{500};
  PopularityMeasure measure = PopularityMeasure::Sum;
};

struct VectorizerOptions {
  bool filter_extremes = false;
  std::size_t min_df = 2;
  double max_df_fraction = 0.9;
};

struct PipelineConfig {
  std::optional<std::filesystem::path> districts;
  std::optional<std::filesystem::path> reviews;
  std::optional<std::filesystem::path> fixture;
  std::optional<std::filesystem::path> stopwords;

  VenueSettings venue;
  PrepConfig prep;
  bool detect_phrases = true;
  VectorizerOptions vectorizer;

  std::optional<HyperParams> model;
  std::optional<SearchGrid> grid;

  EvaluationSettings evaluation;
  double heldout_fraction = 0.1;

  ReportFormat format = ReportFormat::Csv;
  std::size_t report_top_n = 6;

  std::optional<Date> date_from;
  std::optional<Date> date_to;

  std::filesystem::path out_dir = "out";

  // Relative paths resolve against `base_dir`. Throws ConfigError for unknown
  // enum values, bad types, or both "model" and "grid" present.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
  static PipelineConfig load(const std::filesystem::path& path);

  // Applies --seed to whichever of model / grid is active.
  void override_seed(std::uint64_t seed);
};

struct PreparedCorpus {
  SplitCorpus split;
  Vocabulary vocab;
  SurfaceForms surfaces;
  PhraseModel phrases;
  std::size_t dropped_non_english = 0;
  std::size_t dropped_empty = 0;
};

// Date filter, English filter, preprocessing, phrases, vocabulary and
// bag-of-words. The last `heldout_fraction` of documents (in corpus order)
// is held out when `hold_out` is set; the vocabulary comes from the rest.
// Throws DataError when nothing trainable remains.
PreparedCorpus prepare_corpus(const Corpus& corpus, const PipelineConfig& config, bool hold_out);

// Topic keyword tables. Weights are Θ rounded half-up to 3 decimals.
std::string format_weight(double weight);
void write_topics_csv(std::ostream& out, const TopicModel& model, std::size_t top_n);
void write_topics_markdown(std::ostream& out, const TopicModel& model, std::size_t top_n);

void save_model(const std::filesystem::path& path, const TopicModel& model);
TopicModel load_model(const std::filesystem::path& path);

// Each command writes its artifacts under config.out_dir (created if needed)
// and returns the paths written.
struct CommandOutput {
  std::vector<std::filesystem::path> written;
};

// venues.csv + ranking.csv. Throws ConfigError for an empty district list;
// BackendError naming failed districts after writing partial output.
CommandOutput cmd_ingest_venues(const PipelineConfig& config);
// model.json + topics.{csv,md}
CommandOutput cmd_train(const PipelineConfig& config);
// evaluation.csv: coherence and held-out perplexity of a saved model on the reviews.
CommandOutput cmd_evaluate(const PipelineConfig& config, const std::filesystem::path& model_path);
// sweep.csv + model.json (winner) + topics.{csv,md}
CommandOutput cmd_sweep(const PipelineConfig& config);
// topics.{csv,md} regenerated from a saved model.
CommandOutput cmd_report(const PipelineConfig& config, const std::filesystem::path& model_path);

}  // namespace ugs
