// ugs: venue popularity and review topic modelling from the command line.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ugs/errors.hpp"
#include "ugs/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kUnexpected = 1, kConfig = 2, kData = 3, kBackend = 4 };

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string reviews;
  std::string from;
  std::string to;
  std::string format;
  std::optional<std::size_t> top_n;
};

ugs::Date date_flag(const std::string& text, const char* name) {
  auto d = ugs::parse_date(text);
  if (!d) throw ugs::ConfigError(std::string("--") + name + ": not a date: " + text);
  return *d;
}

ugs::PipelineConfig build_config(const GlobalFlags& g) {
  ugs::PipelineConfig config = g.config.empty() ? ugs::PipelineConfig{} : ugs::PipelineConfig::load(g.config);
  if (g.seed) config.override_seed(*g.seed);
  if (!g.out.empty()) config.out_dir = g.out;
  if (!g.reviews.empty()) config.reviews = g.reviews;
  if (!g.from.empty()) config.date_from = date_flag(g.from, "from");
  if (!g.to.empty()) config.date_to = date_flag(g.to, "to");
  if (g.format == "csv") config.format = ugs::ReportFormat::Csv;
  if (g.format == "markdown") config.format = ugs::ReportFormat::Markdown;
  if (g.top_n) config.report_top_n = *g.top_n;
  return config;
}

void print_written(const ugs::CommandOutput& out) {
  for (const auto& p : out.written) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Urban green space venue popularity and review topic analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override the model or grid seed");
  app.add_option("--out", g.out, "Output directory");

  auto add_review_flags = [&](CLI::App* sub) {
    sub->add_option("--reviews", g.reviews, "Reviews file (JSON lines)");
    sub->add_option("--from", g.from, "Keep reviews on or after this date");
    sub->add_option("--to", g.to, "Keep reviews on or before this date");
  };
  auto add_report_flags = [&](CLI::App* sub) {
    sub->add_option("--format", g.format, "Topic report format")->check(CLI::IsMember({"csv", "markdown"}));
    sub->add_option("--top-words", g.top_n, "Words per topic in the report")->check(CLI::PositiveNumber);
  };

  // ingest-venues
  auto* ingest = app.add_subcommand("ingest-venues", "Search parks per district and rank districts by likes");
  std::string districts, fixture, popularity;
  std::optional<double> radius;
  std::optional<std::string> query;
  std::optional<int> limit;
  bool live = false;
  ingest->add_option("--districts", districts, "District CSV");
  ingest->add_option("--fixture", fixture, "Recorded API responses (JSON)");
  ingest->add_flag("--live", live, "Query the live venue API (credentials from the environment)");
  ingest->add_option("--radius", radius, "Search radius in metres")->check(CLI::PositiveNumber);
  ingest->add_option("--query", query, "Venue search query");
  ingest->add_option("--limit", limit, "Maximum venues per district")->check(CLI::PositiveNumber);
  ingest->add_option("--popularity", popularity, "District popularity measure")
      ->check(CLI::IsMember({"sum", "mean"}));

  // train
  auto* train = app.add_subcommand("train", "Train one topic model and write its keyword report");
  std::optional<std::size_t> k, iterations;
  add_review_flags(train);
  add_report_flags(train);
  train->add_option("-k,--topics", k, "Number of topics");
  train->add_option("--iterations", iterations, "Gibbs sweeps");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on a review set");
  std::string model_path;
  add_review_flags(evaluate);
  evaluate->add_option("--model", model_path, "Saved model (model.json)")->required()->check(CLI::ExistingFile);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid search over alpha, beta and the topic count");
  std::vector<std::size_t> ks;
  add_review_flags(sweep);
  add_report_flags(sweep);
  sweep->add_option("--k-sweep", ks, "Topic counts to try (replaces the grid's list)");

  // report
  auto* report = app.add_subcommand("report", "Regenerate the keyword report from a saved model");
  add_report_flags(report);
  report->add_option("--model", model_path, "Saved model (model.json)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    ugs::PipelineConfig config = build_config(g);
    ugs::CommandOutput out;
    if (*ingest) {
      if (!districts.empty()) config.districts = districts;
      if (!fixture.empty()) config.fixture = fixture;
      if (live) config.venue.mode = ugs::VenueApiClient::Mode::Live;
      if (radius) config.venue.radius_m = *radius;
      if (query) config.venue.query = *query;
      if (limit) config.venue.limit = *limit;
      if (popularity == "sum") config.venue.measure = ugs::PopularityMeasure::Sum;
      if (popularity == "mean") config.venue.measure = ugs::PopularityMeasure::MeanPerVenue;
      out = ugs::cmd_ingest_venues(config);
    } else if (*train) {
      if (!config.model && !config.grid) config.model = ugs::HyperParams{};
      if (config.model) {
        if (k) config.model->k = *k;
        if (iterations) config.model->iterations = *iterations;
        config.model->validate();
      }
      if (g.seed) config.override_seed(*g.seed);
      out = ugs::cmd_train(config);
    } else if (*evaluate) {
      out = ugs::cmd_evaluate(config, model_path);
    } else if (*sweep) {
      if (!config.model && !config.grid) config.grid = ugs::SearchGrid{};
      if (config.grid && !ks.empty()) {
        config.grid->ks = ks;
        config.grid->validate();
      }
      if (g.seed) config.override_seed(*g.seed);
      out = ugs::cmd_sweep(config);
    } else if (*report) {
      out = ugs::cmd_report(config, model_path);
    }
    print_written(out);
    return kOk;
  } catch (const ugs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ugs::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ugs::BackendError& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
}
