#include "ugs/text_prep.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>

#include "ugs/errors.hpp"
#include "ugs/parallel.hpp"
#include "ugs/porter_stemmer.hpp"

namespace ugs {

namespace {

bool has_rule(const PrepConfig& config, StripRule rule) {
  return std::find(config.strip_patterns.begin(), config.strip_patterns.end(), rule) !=
         config.strip_patterns.end();
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (s.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (ascii_lower(s[pos + i]) != prefix[i]) return false;
  return true;
}

// An email is a chunk with letters on both sides of '@' and a dot after it.
bool looks_like_email(std::string_view chunk) {
  const auto at = chunk.find('@');
  if (at == std::string_view::npos || at == 0) return false;
  return chunk.find('.', at) != std::string_view::npos;
}

// Drops URL tails and email chunks, working on whitespace-separated chunks.
std::string strip_links(std::string_view text, bool urls, bool emails) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      out.push_back(' ');
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    std::string_view chunk = text.substr(i, end - i);
    if (emails && looks_like_email(chunk)) {
      out.push_back(' ');
    } else {
      std::size_t cut = chunk.size();
      if (urls) {
        for (std::size_t p = 0; p < chunk.size(); ++p) {
          if (starts_with_ci(chunk, p, "http://") || starts_with_ci(chunk, p, "https://") ||
              starts_with_ci(chunk, p, "www.")) {
            cut = p;
            break;
          }
        }
      }
      out.append(chunk.substr(0, cut));
      out.push_back(' ');
    }
    i = end;
  }
  return out;
}

// Decodes one UTF-8 sequence; nullopt for invalid bytes (one byte consumed).
std::optional<char32_t> decode_utf8(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return std::nullopt;
  }
  if (i + len > s.size()) {
    ++i;
    return std::nullopt;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return std::nullopt;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

// Latin-1 Supplement letters folded to ASCII; 0 for anything else.
char fold_latin1(char32_t cp) {
  static constexpr char table[] =
      // U+00C0 .. U+00FF
      "aaaaaaaceeeeiiii"
      "dnooooo\0ouuuuyts"
      "aaaaaaaceeeeiiii"
      "dnooooo\0ouuuuyty";
  if (cp < 0xC0 || cp > 0xFF) return 0;
  return table[cp - 0xC0];
}

}  // namespace

void PrepConfig::validate() const {
  if (min_token_length < 1) throw ConfigError("min_token_length must be >= 1");
  if (phrase_min_count < 1) throw ConfigError("phrase_min_count must be >= 1");
  if (english_min_ratio < 0.0 || english_min_ratio > 1.0)
    throw ConfigError("english_min_ratio must lie in [0, 1]");
}

void SurfaceForms::add(const std::string& stem, const std::string& surface, std::size_t count) {
  forms_[stem][surface] += count;
}

void SurfaceForms::merge(const SurfaceForms& other) {
  for (const auto& [stem, surfaces] : other.forms_)
    for (const auto& [surface, count] : surfaces) forms_[stem][surface] += count;
}

std::string SurfaceForms::display(const std::string& token) const {
  std::string out;
  std::size_t start = 0;
  while (true) {
    const auto sep = token.find('_', start);
    const std::string part = token.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
    std::string best = part;
    if (auto it = forms_.find(part); it != forms_.end()) {
      std::size_t best_count = 0;
      for (const auto& [surface, count] : it->second) {
        // map iteration is lexicographic, so strict > keeps the smallest on ties
        if (count > best_count) {
          best = surface;
          best_count = count;
        }
      }
    }
    if (!out.empty()) out.push_back(' ');
    out += best;
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return out;
}

Tokens tokenize(std::string_view text, const PrepConfig& config) {
  const bool urls = has_rule(config, StripRule::Url);
  const bool emails = has_rule(config, StripRule::Email);
  const std::string cleaned = (urls || emails) ? strip_links(text, urls, emails) : std::string(text);

  Tokens tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  std::size_t i = 0;
  while (i < cleaned.size()) {
    const auto cp = decode_utf8(cleaned, i);
    if (!cp) {
      flush();
      continue;
    }
    if (*cp < 0x80) {
      const char c = ascii_lower(static_cast<char>(*cp));
      if (c >= 'a' && c <= 'z')
        current.push_back(c);
      else
        flush();
      continue;
    }
    // Accented Latin letters fold into the word. Any other code point ends
    // the word; emoji are dropped that way whether or not the rule is listed.
    if (const char folded = fold_latin1(*cp); folded != 0)
      current.push_back(folded);
    else
      flush();
  }
  flush();
  return tokens;
}

std::string lemmatize(const std::string& word) {
  static const std::map<std::string, std::string, std::less<>> exceptions = {
      {"children", "child"}, {"geese", "goose"}, {"mice", "mouse"}, {"feet", "foot"},
      {"teeth", "tooth"},    {"men", "man"},     {"women", "woman"}, {"leaves", "leaf"},
      {"wolves", "wolf"},    {"knives", "knife"}, {"lives", "life"},  {"sheep", "sheep"},
  };
  if (auto it = exceptions.find(word); it != exceptions.end()) return it->second;
  return word;
}

Tokens preprocess(std::string_view text, const PrepConfig& config, SurfaceForms* surfaces) {
  Tokens out;
  for (auto& word : tokenize(text, config)) {
    if (config.stopwords.count(word)) continue;
    const std::string base = config.lemmatize ? lemmatize(word) : word;
    std::string stem = porter_stem(base);
    if (stem.size() < config.min_token_length || config.stopwords.count(stem)) continue;
    if (surfaces) surfaces->add(stem, word);
    out.push_back(std::move(stem));
  }
  return out;
}

double english_ratio(std::string_view text, const PrepConfig& config) {
  const Tokens tokens = tokenize(text, config);
  if (tokens.empty()) return 0.0;
  const auto& common = bundled_common_words();
  std::size_t known = 0;
  for (const auto& t : tokens)
    if (config.stopwords.count(t) || common.count(t)) ++known;
  return static_cast<double>(known) / static_cast<double>(tokens.size());
}

bool is_english(std::string_view text, const PrepConfig& config) {
  return english_ratio(text, config) >= config.english_min_ratio;
}

std::vector<Tokens> preprocess_corpus(const std::vector<std::string>& texts, const PrepConfig& config,
                                      SurfaceForms* surfaces) {
  const auto n = static_cast<std::int64_t>(texts.size());
  std::vector<Tokens> out(texts.size());
  std::vector<SurfaceForms> per_doc(surfaces ? texts.size() : 0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = preprocess(texts[i], config, surfaces ? &per_doc[i] : nullptr);
  if (surfaces)
    for (const auto& s : per_doc) surfaces->merge(s);
  return out;
}

double phrase_score(std::size_t pair_count, std::size_t count_a, std::size_t count_b,
                    std::size_t vocab_size, std::size_t min_count) {
  if (count_a == 0 || count_b == 0) return 0.0;
  return (static_cast<double>(pair_count) - static_cast<double>(min_count)) *
         static_cast<double>(vocab_size) / (static_cast<double>(count_a) * static_cast<double>(count_b));
}

namespace {

// A token in the second pass: its joined text plus how many base words it spans.
struct Unit {
  std::string text;
  std::size_t parts = 1;
  std::string first;   // base words, filled for two-part units
  std::string second;
};

bool joinable(const std::string& t) { return t.find('_') == std::string::npos; }

}  // namespace

PhraseModel build_phrase_model(const std::vector<Tokens>& token_docs, const PrepConfig& config) {
  if (token_docs.empty()) throw DataError("cannot build phrase model from an empty corpus");
  config.validate();
  PhraseModel model;
  model.threshold = config.phrase_threshold;
  model.min_count = config.phrase_min_count;

  // Pass 1: bigrams over base tokens.
  std::map<std::string, std::size_t> unigram;
  std::map<std::pair<std::string, std::string>, std::size_t> pairs;
  for (const auto& doc : token_docs) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      ++unigram[doc[i]];
      if (i + 1 < doc.size() && joinable(doc[i]) && joinable(doc[i + 1])) ++pairs[{doc[i], doc[i + 1]}];
    }
  }
  for (const auto& [pair, count] : pairs) {
    if (count < config.phrase_min_count) continue;
    const double score = phrase_score(count, unigram[pair.first], unigram[pair.second], unigram.size(),
                                      config.phrase_min_count);
    if (score >= config.phrase_threshold) model.bigrams[pair] = score;
  }

  // Pass 2: pairs over bigram-merged documents; unit + base word gives a trigram.
  std::map<std::string, std::size_t> unit_counts;
  std::map<std::pair<std::string, std::string>, std::size_t> unit_pairs;
  std::map<std::string, Unit> units;
  for (const auto& doc : token_docs) {
    std::vector<Unit> merged;
    for (std::size_t i = 0; i < doc.size();) {
      if (i + 1 < doc.size() && model.bigrams.count({doc[i], doc[i + 1]})) {
        merged.push_back(Unit{doc[i] + "_" + doc[i + 1], 2, doc[i], doc[i + 1]});
        i += 2;
      } else {
        merged.push_back(Unit{doc[i], 1, doc[i], {}});
        ++i;
      }
    }
    for (std::size_t i = 0; i < merged.size(); ++i) {
      units.emplace(merged[i].text, merged[i]);
      ++unit_counts[merged[i].text];
      if (i + 1 < merged.size()) {
        const auto& a = merged[i];
        const auto& b = merged[i + 1];
        const bool base_ok = (a.parts == 2 || joinable(a.text)) && (b.parts == 2 || joinable(b.text));
        if (base_ok && a.parts + b.parts <= 3) ++unit_pairs[{a.text, b.text}];
      }
    }
  }
  for (const auto& [pair, count] : unit_pairs) {
    if (count < config.phrase_min_count) continue;
    const double score = phrase_score(count, unit_counts[pair.first], unit_counts[pair.second],
                                      unit_counts.size(), config.phrase_min_count);
    if (score < config.phrase_threshold) continue;
    const Unit& a = units.at(pair.first);
    const Unit& b = units.at(pair.second);
    if (a.parts == 1 && b.parts == 1) {
      model.bigrams.emplace(std::make_pair(a.text, b.text), score);
    } else if (a.parts == 2) {
      model.trigrams[{a.first, a.second, b.text}] = score;
    } else {
      model.trigrams[{a.text, b.first, b.second}] = score;
    }
  }
  return model;
}

Tokens apply_phrases(const Tokens& tokens, const PhraseModel& model) {
  Tokens out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size();) {
    if (i + 2 < tokens.size() && model.trigrams.count({tokens[i], tokens[i + 1], tokens[i + 2]})) {
      out.push_back(tokens[i] + "_" + tokens[i + 1] + "_" + tokens[i + 2]);
      i += 3;
    } else if (i + 1 < tokens.size() && model.bigrams.count({tokens[i], tokens[i + 1]})) {
      out.push_back(tokens[i] + "_" + tokens[i + 1]);
      i += 2;
    } else {
      out.push_back(tokens[i]);
      ++i;
    }
  }
  return out;
}

namespace reference {

std::vector<Tokens> preprocess_corpus(const std::vector<std::string>& texts, const PrepConfig& config,
                                      SurfaceForms* surfaces) {
  std::vector<Tokens> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(preprocess(t, config, surfaces));
  return out;
}

}  // namespace reference

}  // namespace ugs
