#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ugs/wordlists.hpp"

namespace ugs {

using Tokens = std::vector<std::string>;

enum class StripRule { Url, Email, Emoji, ExtraWhitespace };

struct PrepConfig {
  std::size_t min_token_length = 3;
  WordSet stopwords = bundled_stopwords();
  std::vector<StripRule> strip_patterns = {StripRule::Url, StripRule::Email, StripRule::Emoji,
                                           StripRule::ExtraWhitespace};
  std::size_t phrase_min_count = 5;
  double phrase_threshold = 10.0;
  // Documents whose share of known English words falls below this are dropped.
  double english_min_ratio = 0.2;
  bool lemmatize = true;

  // Throws ConfigError when min_token_length or phrase_min_count is zero.
  void validate() const;
};

// Records which lowercase surface words produced each stem, so reports can
// show "maintained" instead of "maintain".
class SurfaceForms {
 public:
  void add(const std::string& stem, const std::string& surface, std::size_t count = 1);
  void merge(const SurfaceForms& other);

  // Most frequent surface for a stem, ties broken by the lexicographically
  // smallest word; the stem itself when unseen. Phrase tokens ("a_b") are
  // resolved part by part and joined by a space.
  std::string display(const std::string& token) const;

  const std::map<std::string, std::map<std::string, std::size_t>>& table() const { return forms_; }
  bool empty() const { return forms_.empty(); }

 private:
  std::map<std::string, std::map<std::string, std::size_t>> forms_;
};

// Removes URLs, email addresses and emoji per config, folds Latin-1 accents,
// lowercases, and splits into maximal [a-z] runs. No stopword handling.
Tokens tokenize(std::string_view text, const PrepConfig& config);

// Plural/irregular exception table applied before stemming ("geese" -> "goose").
std::string lemmatize(const std::string& word);

// tokenize, drop stopwords, lemmatize, Porter-stem, then drop stems that are
// stopwords or shorter than min_token_length. Total; may return empty.
Tokens preprocess(std::string_view text, const PrepConfig& config, SurfaceForms* surfaces = nullptr);

// Fraction of tokens found in the stopword or common-word lists; 0 for no tokens.
double english_ratio(std::string_view text, const PrepConfig& config);
bool is_english(std::string_view text, const PrepConfig& config);

// Parallel over documents; output order matches input order and the merged
// SurfaceForms are independent of the thread count.
std::vector<Tokens> preprocess_corpus(const std::vector<std::string>& texts, const PrepConfig& config,
                                      SurfaceForms* surfaces = nullptr);

struct PhraseModel {
  std::map<std::pair<std::string, std::string>, double> bigrams;
  std::map<std::array<std::string, 3>, double> trigrams;
  double threshold = 10.0;
  std::size_t min_count = 5;

  bool empty() const { return bigrams.empty() && trigrams.empty(); }
};

// Collocation score for an adjacent pair.
double phrase_score(std::size_t pair_count, std::size_t count_a, std::size_t count_b,
                    std::size_t vocab_size, std::size_t min_count);

// Bigrams from adjacent-pair counts; trigrams from a second pass over the
// bigram-merged documents. Throws DataError on an empty corpus.
PhraseModel build_phrase_model(const std::vector<Tokens>& token_docs, const PrepConfig& config);

// Left-to-right greedy joining, trigrams before bigrams, with "_". Tokens that
// already contain "_" never join, which makes the operation idempotent.
Tokens apply_phrases(const Tokens& tokens, const PhraseModel& model);

}  // namespace ugs

namespace ugs::reference {

// Serial baseline for preprocess_corpus.
std::vector<Tokens> preprocess_corpus(const std::vector<std::string>& texts, const PrepConfig& config,
                                      SurfaceForms* surfaces = nullptr);

}  // namespace ugs::reference
