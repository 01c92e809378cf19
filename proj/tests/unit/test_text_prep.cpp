#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_support.hpp"
#include "ugs/corpus.hpp"
#include "ugs/errors.hpp"
#include "ugs/porter_stemmer.hpp"
#include "ugs/text_prep.hpp"

using namespace ugs;

namespace {

bool clean_token(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (!((c >= 'a' && c <= 'z') || c == '_')) return false;
  return true;
}

}  // namespace

TEST_SUITE("text_prep") {
  TEST_CASE("example review text") {
    PrepConfig cfg;
    CHECK(preprocess("Absolutely beautiful if you get the weather to enjoy it.", cfg) ==
          Tokens{"absolut", "beauti", "weather", "enjoy"});
    CHECK(preprocess("", cfg).empty());
    CHECK(preprocess("Visit https://example.com NOW!! \xF0\x9F\x98\x80", cfg) == Tokens{"visit"});
  }

  TEST_CASE("tokenize strips urls, emails and emoji and folds accents") {
    PrepConfig cfg;
    CHECK(tokenize("Mail me at someone@example.ie or see www.park.ie/info today", cfg) ==
          Tokens{"mail", "me", "at", "or", "see", "today"});
    CHECK(tokenize("Caf\xC3\xA9 na\xC3\xAFve \xF0\x9F\x8C\xB3trees", cfg) == Tokens{"cafe", "naive", "trees"});
    CHECK(tokenize("St. Stephen's   Green", cfg) == Tokens{"st", "stephen", "s", "green"});
    cfg.strip_patterns.clear();
    // Without URL stripping the pieces of the address survive as words.
    CHECK(tokenize("see http://park.ie", cfg) == Tokens{"see", "http", "park", "ie"});
  }

  TEST_CASE("surface forms show the common unstemmed word") {
    PrepConfig cfg;
    SurfaceForms forms;
    preprocess("The park was well maintained, maintained and kept clean. Maintaining it", cfg, &forms);
    CHECK(forms.display("maintain") == "maintained");
    CHECK(forms.display("unknownstem") == "unknownstem");
    SurfaceForms phrase;
    phrase.add("stephen", "stephen");
    phrase.add("green", "greens");
    phrase.add("green", "green", 2);
    CHECK(phrase.display("stephen_green") == "stephen green");
  }

  TEST_CASE("lemmatizer exception table") {
    CHECK(lemmatize("geese") == "goose");
    CHECK(lemmatize("children") == "child");
    CHECK(lemmatize("ducks") == "ducks");
    PrepConfig cfg;
    CHECK(preprocess("geese and children", cfg) == Tokens{"goos", "child"});
    cfg.lemmatize = false;
    CHECK(preprocess("geese and children", cfg) == Tokens{"gees", "children"});
  }

  TEST_CASE("min token length and custom stopwords") {
    PrepConfig cfg;
    cfg.min_token_length = 6;
    CHECK(preprocess("swans ducks flowers", cfg) == Tokens{"flower"});
    cfg.min_token_length = 1;
    cfg.stopwords = parse_word_list("swans\n  \nducks\n");
    CHECK(preprocess("swans ducks flowers", cfg) == Tokens{"flower"});
    cfg.min_token_length = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("english filter") {
    PrepConfig cfg;
    CHECK(is_english("The park is lovely and the people are friendly", cfg));
    CHECK_FALSE(is_english("Tá an pháirc go hálainn agus tá na daoine cairdiúil", cfg));
    CHECK(english_ratio("", cfg) == 0.0);
  }

  TEST_CASE("phrase score and acceptance") {
    // ten documents with "stephen green": c_ab = c_a = c_b = 10, V = 3.
    std::vector<Tokens> docs(10, Tokens{"stephen", "green", "walk"});
    PrepConfig cfg;
    cfg.phrase_threshold = 1.0;
    const auto model = build_phrase_model(docs, cfg);
    CHECK(phrase_score(10, 10, 10, 3, 5) == doctest::Approx(0.15));
    CHECK(model.bigrams.count({"stephen", "green"}) == 0);  // 0.15 < 1.0

    std::vector<Tokens> varied;
    for (int i = 0; i < 10; ++i) varied.push_back({"stephen", "green", "w" + std::string(1, char('a' + i)), "x" + std::to_string(i)});
    const auto vm = build_phrase_model(varied, cfg);
    // V = 22, score = (10 - 5) * 22 / 100 = 1.1
    REQUIRE(vm.bigrams.count({"stephen", "green"}) == 1);
    CHECK(vm.bigrams.at({"stephen", "green"}) == doctest::Approx(1.1));
    for (const auto& [pair, score] : vm.bigrams) CHECK(score >= cfg.phrase_threshold);
    CHECK(apply_phrases({"st", "stephen", "green"}, vm) == Tokens{"st", "stephen_green"});
  }

  TEST_CASE("phrase floors and empty input") {
    PrepConfig cfg;
    cfg.phrase_threshold = 0.0;
    std::vector<Tokens> four;
    for (int i = 0; i < 4; ++i) four.push_back({"herbert", "park", "z" + std::to_string(i)});
    CHECK(build_phrase_model(four, cfg).bigrams.count({"herbert", "park"}) == 0);
    CHECK(build_phrase_model({{"a", "b", "c", "d"}}, cfg).bigrams.empty());
    cfg.phrase_threshold = 10.0;
    CHECK(build_phrase_model({{"a", "b", "c", "d"}}, cfg).empty());
    CHECK_THROWS_AS(build_phrase_model({}, cfg), DataError);
    CHECK(apply_phrases({}, PhraseModel{}).empty());
  }

  TEST_CASE("trigrams come from the second pass") {
    PrepConfig cfg;
    cfg.phrase_threshold = 1.0;
    std::vector<Tokens> docs;
    for (int i = 0; i < 30; ++i)
      docs.push_back({"phoenix", "park", "visitor", "u" + std::to_string(i), "v" + std::to_string(i)});
    const auto model = build_phrase_model(docs, cfg);
    CHECK_FALSE(model.trigrams.empty());
    const auto once = apply_phrases(docs[0], model);
    CHECK(once == Tokens{"phoenix_park_visitor", "u0", "v0"});
    CHECK(apply_phrases(once, model) == once);
  }

  TEST_CASE("fuzzed reviews produce clean tokens and idempotent phrases") {
    std::mt19937_64 g(11);
    const auto& stop = bundled_stopwords();
    const std::vector<std::string> pieces = {"The", "park", "was", "LOVELY", "swans", "!!", "https://x.ie/a?b=1",
                                             "me@mail.com", "\xF0\x9F\x98\x80", "caf\xC3\xA9", "\xE2\x80\x94", "it's",
                                             "don't", "  ", "\t", "42", "rose-garden", "\xC3\x97", "\xFF", "ducks,"};
    PrepConfig cfg;
    std::vector<Tokens> docs;
    for (int i = 0; i < 300; ++i) {
      std::string text;
      for (int w = 0; w < 20; ++w) text += pieces[g() % pieces.size()] + " ";
      auto toks = preprocess(text, cfg);
      for (const auto& t : toks) {
        CHECK(clean_token(t));
        CHECK(stop.count(t) == 0);
        CHECK(t.size() >= cfg.min_token_length);
      }
      docs.push_back(std::move(toks));
    }
    cfg.phrase_threshold = 0.0;
    cfg.phrase_min_count = 1;
    const auto model = build_phrase_model(docs, cfg);
    for (const auto& d : docs) {
      const auto once = apply_phrases(d, model);
      CHECK(apply_phrases(once, model) == once);
    }
  }

  TEST_CASE("parallel and serial preprocessing agree") {
    const auto corpus = load_reviews(testing::data_path("reviews/synthetic_two_topic.jsonl"));
    std::vector<std::string> texts;
    for (const auto& r : corpus.reviews) texts.push_back(r.text());
    PrepConfig cfg;
    SurfaceForms a, b;
    CHECK(preprocess_corpus(texts, cfg, &a) == reference::preprocess_corpus(texts, cfg, &b));
    CHECK(a.table() == b.table());
  }

  TEST_CASE("word list loading") {
    CHECK(bundled_stopwords().count("the"));
    CHECK(bundled_stopwords().count("now"));
    CHECK(bundled_common_words().size() >= 1000);
    CHECK_THROWS_AS(load_word_list("/nonexistent/words.txt"), DataError);
  }
}

TEST_SUITE("porter") {
  TEST_CASE("bundled vectors and fixed points") {
    std::ifstream in(testing::data_path("testdata/porter_vectors.txt"));
    REQUIRE(in);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string word, stem;
      ls >> word >> stem;
      CHECK_MESSAGE(porter_stem(word) == stem, word);
      CHECK_MESSAGE(porter_stem(stem) == stem, stem);
      ++n;
    }
    CHECK(n == 100);
  }

  TEST_CASE("short words and irregular forms") {
    CHECK(porter_stem("a") == "a");
    CHECK(porter_stem("is") == "is");
    CHECK(porter_stem("dying") == "die");
    CHECK(porter_stem("skies") == "sky");
    CHECK(porter_stem("news") == "news");
    CHECK(porter_stem("") == "");
  }
}
