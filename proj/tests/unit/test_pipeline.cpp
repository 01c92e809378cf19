#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "ugs/csv.hpp"
#include "ugs/errors.hpp"
#include "ugs/pipeline.hpp"

using namespace ugs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ugs_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PipelineConfig base_config(const fs::path& out) {
  PipelineConfig c;
  c.districts = testing::data_path("districts.csv");
  c.fixture = testing::data_path("fixtures/venues_fixture.json");
  c.reviews = testing::data_path("reviews/synthetic_two_topic.jsonl");
  c.out_dir = out;
  return c;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("config parsing") {
    const json j = json::parse(R"({
      "inputs": {"reviews": "r.jsonl", "districts": "/abs/d.csv"},
      "venue_api": {"radius": 800, "limit": 5, "popularity": "mean"},
      "prep": {"min_token_length": 4, "strip": ["url", "emoji"]},
      "model": {"k": 3, "alpha": 0.1, "beta": 0.01, "seed": 9, "iterations": 50, "burn_in": 10},
      "evaluation": {"top_n": 5, "coherence": "umass", "window": 10, "heldout_fraction": 0.2},
      "report": {"format": "markdown", "top_words": 4},
      "filter": {"from": "01-01-2010"},
      "out_dir": "out"})");
    const auto c = PipelineConfig::from_json(j, "/base");
    CHECK(*c.reviews == fs::path("/base/r.jsonl"));
    CHECK(*c.districts == fs::path("/abs/d.csv"));
    CHECK(c.venue.radius_m == 800);
    CHECK(*c.venue.limit == 5);
    CHECK(c.venue.measure == PopularityMeasure::MeanPerVenue);
    CHECK(c.prep.min_token_length == 4);
    CHECK(c.prep.strip_patterns.size() == 2);
    REQUIRE(c.model);
    CHECK(c.model->k == 3);
    CHECK(c.model->alpha == AlphaSpec::scalar(0.1));
    CHECK(c.evaluation.ranking == CoherenceMeasure::UMass);
    CHECK(c.evaluation.cooccurrence.window == 10);
    CHECK(c.heldout_fraction == 0.2);
    CHECK(c.format == ReportFormat::Markdown);
    CHECK(c.report_top_n == 4);
    CHECK(to_iso(*c.date_from) == "2010-01-01");
    CHECK(c.out_dir == fs::path("/base/out"));
  }

  TEST_CASE("config errors") {
    auto bad = [](const char* text) { return PipelineConfig::from_json(json::parse(text), "."); };
    CHECK_THROWS_WITH_AS(bad(R"({"model": {"k": 2}, "grid": {"k": [2]}})"), doctest::Contains("not both"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"report": {"format": "pdf"}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"venue_api": {"mode": "carrier-pigeon"}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"prep": {"min_token_length": "three"}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"model": {"k": 1}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"grid": {"k": []}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"evaluation": {"top_n": 1}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"filter": {"from": "soon"}})"), ConfigError);
    CHECK_THROWS_AS(bad("[]"), ConfigError);
    CHECK_THROWS_AS(PipelineConfig::load("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("bundled configs load") {
    for (const char* name : {"train.json", "sweep.json"}) {
      const auto c = PipelineConfig::load(fs::path(UGS_SOURCE_DIR) / "configs" / name);
      CHECK(fs::exists(*c.reviews));
    }
  }

  TEST_CASE("seed override applies to the active section") {
    PipelineConfig c;
    c.model = HyperParams{};
    c.override_seed(77);
    CHECK(c.model->seed == 77);
    c.model.reset();
    c.grid = SearchGrid{};
    c.override_seed(5);
    CHECK(c.grid->base_seed == 5);
  }

  TEST_CASE("weights round half up to three decimals") {
    CHECK(format_weight(0.0535) == "0.054");
    CHECK(format_weight(0.0534999) == "0.053");
    CHECK(format_weight(0.044) == "0.044");
    CHECK(format_weight(1.0) == "1.000");
    CHECK(format_weight(0.0) == "0.000");
  }

  TEST_CASE("prepared corpus splits and keeps vocabulary to the training part") {
    TempDir tmp("prepare");
    auto c = base_config(tmp.path);
    const auto corpus = load_reviews(*c.reviews);
    const auto held = prepare_corpus(corpus, c, true);
    CHECK(held.split.train.size() + held.split.heldout.size() + held.dropped_empty + held.dropped_non_english ==
          corpus.size());
    CHECK(held.split.heldout.size() == 30);
    CHECK(held.split.train_tokens.size() == held.split.train.size());
    CHECK(held.vocab.document_count() == corpus.size() - 30);
    const auto all = prepare_corpus(corpus, c, false);
    CHECK(all.split.heldout.empty());
    CHECK(all.surfaces.display("shop") == "shopping");
  }

  TEST_CASE("non-English and empty reviews are dropped") {
    TempDir tmp("drop");
    write_text(tmp.path / "r.jsonl",
               R"({"body":"the swans and the ducks on the pond","rating":5,"date":"2019-01-01"})"
               "\n"
               R"({"body":"Tá an pháirc go hálainn agus cairdiúil","rating":4,"date":"2019-01-02"})"
               "\n"
               R"({"body":"it was the","rating":3,"date":"2019-01-03"})"
               "\n");
    auto c = base_config(tmp.path);
    const auto p = prepare_corpus(load_reviews(tmp.path / "r.jsonl"), c, false);
    CHECK(p.dropped_non_english == 1);
    CHECK(p.dropped_empty == 1);
    CHECK(p.split.train.size() == 1);
  }

  TEST_CASE("every review empty after stopwording is an error") {
    TempDir tmp("empty");
    write_text(tmp.path / "r.jsonl", R"({"body":"it was the best of the it","rating":3,"date":"2019-01-03"})"
                                     "\n");
    auto c = base_config(tmp.path);
    c.reviews = tmp.path / "r.jsonl";
    c.prep.stopwords.insert("best");
    c.model = HyperParams{};
    CHECK_THROWS_AS(cmd_train(c), DataError);
  }

  TEST_CASE("ingest writes both tables") {
    TempDir tmp("ingest");
    const auto out = cmd_ingest_venues(base_config(tmp.path));
    CHECK(out.written.size() == 2);
    const auto ranking = testing::read_file(tmp.path / "ranking.csv");
    CHECK(ranking.rfind("district,total_likes,venue_count\nDublin 2,1776,3\nDublin 8,696,1\n", 0) == 0);
  }

  TEST_CASE("ingest with no districts or a missing district") {
    TempDir tmp("ingest_err");
    write_text(tmp.path / "d.csv", "district,area,lat,lon\n");
    auto c = base_config(tmp.path);
    c.districts = tmp.path / "d.csv";
    CHECK_THROWS_WITH_AS(cmd_ingest_venues(c), doctest::Contains("no districts"), ConfigError);

    write_text(tmp.path / "d.csv", "district,area,lat,lon\nDublin 2,Southside,53.338940,-6.252713\nDublin 99,Northside,1,1\n");
    CHECK_THROWS_WITH_AS(cmd_ingest_venues(c), doctest::Contains("Dublin 99"), BackendError);
    CHECK(testing::read_file(tmp.path / "ranking.csv").find("Dublin 2,1776,3") != std::string::npos);
  }

  TEST_CASE("train, report and evaluate") {
    TempDir tmp("train");
    auto c = base_config(tmp.path);
    c.model = HyperParams{};
    c.model->k = 2;
    c.model->beta = 0.01;
    c.model->iterations = 150;
    c.model->burn_in = 50;
    cmd_train(c);
    const auto topics = testing::read_file(tmp.path / "topics.csv");
    CHECK(topics.rfind("topic,rank,word,token,weight\n", 0) == 0);

    const auto model = load_model(tmp.path / "model.json");
    CHECK(testing::check_invariants(model).ok());
    // Report weights equal Θ to three decimals and never increase.
    std::istringstream lines(topics);
    std::string line;
    std::getline(lines, line);
    double last = 2.0;
    std::size_t last_topic = 0;
    while (std::getline(lines, line)) {
      const auto f = csv::split_record(line);
      const auto t = std::stoul(f[0]) - 1;
      const double w = std::stod(f[4]);
      if (t != last_topic) last = 2.0;
      CHECK(w <= last);
      last = w;
      last_topic = t;
      const auto id = *model.vocabulary().find(f[3]);
      CHECK(f[4] == format_weight(model.topic_word()(t, id)));
    }

    c.format = ReportFormat::Markdown;
    cmd_report(c, tmp.path / "model.json");
    const auto md = testing::read_file(tmp.path / "topics.md");
    CHECK(md.find("| Topic #1 | \"") != std::string::npos);

    cmd_evaluate(c, tmp.path / "model.json");
    const auto eval = testing::read_file(tmp.path / "evaluation.csv");
    CHECK(eval.rfind("alpha,beta,coherence,perplexity,k", 0) == 0);
    CHECK(eval.find("\nsymmetric,0.01,") != std::string::npos);
  }

  TEST_CASE("sweep writes the report and the winner") {
    TempDir tmp("sweep");
    auto c = base_config(tmp.path);
    c.grid = SearchGrid{};
    c.grid->iterations = 60;
    c.grid->burn_in = 20;
    cmd_sweep(c);
    const auto sweep = testing::read_file(tmp.path / "sweep.csv");
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 9);
    CHECK(fs::exists(tmp.path / "model.json"));
    CHECK(fs::exists(tmp.path / "topics.csv"));

    c.model = HyperParams{};
    CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
    c.grid.reset();
    CHECK_THROWS_AS(cmd_sweep(c), ConfigError);
  }

  TEST_CASE("date filter that removes everything") {
    TempDir tmp("dates");
    auto c = base_config(tmp.path);
    c.model = HyperParams{};
    c.date_from = parse_date("2030-01-01");
    CHECK_THROWS_AS(cmd_train(c), DataError);
  }
}
