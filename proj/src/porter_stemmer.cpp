#include "ugs/porter_stemmer.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace ugs {

namespace {

bool is_vowel_letter(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// y is a consonant at the start of a word or after a vowel.
std::vector<bool> consonant_flags(std::string_view w) {
  std::vector<bool> flags(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (is_vowel_letter(w[i]))
      flags[i] = false;
    else if (w[i] == 'y')
      flags[i] = i == 0 ? true : !flags[i - 1];
    else
      flags[i] = true;
  }
  return flags;
}

bool is_consonant(std::string_view w, std::size_t i) { return consonant_flags(w.substr(0, i + 1))[i]; }

// Number of VC sequences in [C](VC)^m[V].
int measure(std::string_view stem) {
  const auto flags = consonant_flags(stem);
  int m = 0;
  for (std::size_t i = 1; i < flags.size(); ++i)
    if (!flags[i - 1] && flags[i]) ++m;
  return m;
}

bool contains_vowel(std::string_view stem) {
  for (bool c : consonant_flags(stem))
    if (!c) return true;
  return false;
}

bool ends_double_consonant(std::string_view w) {
  return w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2] && is_consonant(w, w.size() - 1);
}

// *o: stem ends consonant-vowel-consonant, last not w/x/y; or a two-letter
// vowel-consonant word.
bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n >= 3) {
    return is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1) &&
           w[n - 1] != 'w' && w[n - 1] != 'x' && w[n - 1] != 'y';
  }
  return n == 2 && !is_consonant(w, 0) && is_consonant(w, 1);
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

std::string_view drop(std::string_view w, std::size_t n) { return w.substr(0, w.size() - n); }

using Condition = std::function<bool(std::string_view)>;

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  Condition condition;  // empty means unconditional
};

// First rule whose suffix matches decides the outcome, whether or not its
// condition holds.
std::string apply_rules(std::string_view w, const std::vector<Rule>& rules) {
  for (const auto& r : rules) {
    if (!ends_with(w, r.suffix)) continue;
    const auto stem = drop(w, r.suffix.size());
    if (!r.condition || r.condition(stem)) return std::string(stem) + std::string(r.replacement);
    return std::string(w);
  }
  return std::string(w);
}

bool positive_measure(std::string_view s) { return measure(s) > 0; }
bool measure_above_one(std::string_view s) { return measure(s) > 1; }

std::string step1a(std::string_view w) {
  if (ends_with(w, "ies") && w.size() == 4) return std::string(drop(w, 3)) + "ie";
  return apply_rules(w, {{"sses", "ss", {}}, {"ies", "i", {}}, {"ss", "ss", {}}, {"s", "", {}}});
}

std::string step1b(std::string_view w) {
  if (ends_with(w, "ied")) return std::string(drop(w, 3)) + (w.size() == 4 ? "ie" : "i");
  if (ends_with(w, "eed")) {
    const auto stem = drop(w, 3);
    return measure(stem) > 0 ? std::string(stem) + "ee" : std::string(w);
  }
  std::string_view stem;
  bool removed = false;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (ends_with(w, suffix)) {
      stem = drop(w, suffix.size());
      if (contains_vowel(stem)) {
        removed = true;
        break;
      }
    }
  }
  if (!removed) return std::string(w);

  if (ends_with(stem, "at") || ends_with(stem, "bl") || ends_with(stem, "iz"))
    return std::string(stem) + "e";
  if (ends_double_consonant(stem)) {
    const char last = stem.back();
    if (last != 'l' && last != 's' && last != 'z') return std::string(drop(stem, 1));
    return std::string(stem);
  }
  if (measure(stem) == 1 && ends_cvc(stem)) return std::string(stem) + "e";
  return std::string(stem);
}

std::string step1c(std::string_view w) {
  if (ends_with(w, "y")) {
    const auto stem = drop(w, 1);
    if (stem.size() > 1 && is_consonant(stem, stem.size() - 1)) return std::string(stem) + "i";
  }
  return std::string(w);
}

std::string step2(std::string_view w) {
  if (ends_with(w, "alli") && positive_measure(drop(w, 4))) return step2(std::string(drop(w, 4)) + "al");

  static const std::vector<Rule> rules = {
      {"ational", "ate", positive_measure}, {"tional", "tion", positive_measure},
      {"enci", "ence", positive_measure},   {"anci", "ance", positive_measure},
      {"izer", "ize", positive_measure},    {"bli", "ble", positive_measure},
      {"alli", "al", positive_measure},     {"entli", "ent", positive_measure},
      {"eli", "e", positive_measure},       {"ousli", "ous", positive_measure},
      {"ization", "ize", positive_measure}, {"ation", "ate", positive_measure},
      {"ator", "ate", positive_measure},    {"alism", "al", positive_measure},
      {"iveness", "ive", positive_measure}, {"fulness", "ful", positive_measure},
      {"ousness", "ous", positive_measure}, {"aliti", "al", positive_measure},
      {"iviti", "ive", positive_measure},   {"biliti", "ble", positive_measure},
      {"fulli", "ful", positive_measure},
  };
  auto with_logi = rules;
  // "logi" tests the measure of the word minus three letters, i.e. keeping the "l".
  with_logi.push_back({"logi", "log", [w](std::string_view) { return positive_measure(drop(w, 3)); }});
  return apply_rules(w, with_logi);
}

std::string step3(std::string_view w) {
  static const std::vector<Rule> rules = {
      {"icate", "ic", positive_measure}, {"ative", "", positive_measure},
      {"alize", "al", positive_measure}, {"iciti", "ic", positive_measure},
      {"ical", "ic", positive_measure},  {"ful", "", positive_measure},
      {"ness", "", positive_measure},
  };
  return apply_rules(w, rules);
}

std::string step4(std::string_view w) {
  static const std::vector<Rule> rules = {
      {"al", "", measure_above_one},   {"ance", "", measure_above_one},
      {"ence", "", measure_above_one}, {"er", "", measure_above_one},
      {"ic", "", measure_above_one},   {"able", "", measure_above_one},
      {"ible", "", measure_above_one}, {"ant", "", measure_above_one},
      {"ement", "", measure_above_one}, {"ment", "", measure_above_one},
      {"ent", "", measure_above_one},
      {"ion", "", [](std::string_view s) { return measure(s) > 1 && (s.back() == 's' || s.back() == 't'); }},
      {"ou", "", measure_above_one},   {"ism", "", measure_above_one},
      {"ate", "", measure_above_one},  {"iti", "", measure_above_one},
      {"ous", "", measure_above_one},  {"ive", "", measure_above_one},
      {"ize", "", measure_above_one},
  };
  return apply_rules(w, rules);
}

std::string step5a(std::string_view w) {
  if (ends_with(w, "e")) {
    const auto stem = drop(w, 1);
    const int m = measure(stem);
    if (m > 1 || (m == 1 && !ends_cvc(stem))) return std::string(stem);
  }
  return std::string(w);
}

std::string step5b(std::string_view w) {
  if (ends_with(w, "ll") && measure(drop(w, 1)) > 1) return std::string(drop(w, 1));
  return std::string(w);
}

std::string_view irregular(std::string_view w) {
  static const std::array<std::pair<std::string_view, std::string_view>, 14> table = {{
      {"skies", "sky"}, {"sky", "sky"}, {"dying", "die"}, {"lying", "lie"}, {"tying", "tie"},
      {"news", "news"}, {"innings", "inning"}, {"inning", "inning"}, {"outings", "outing"},
      {"outing", "outing"}, {"cannings", "canning"}, {"canning", "canning"}, {"howe", "howe"},
      {"proceed", "proceed"},
  }};
  for (const auto& [from, to] : table)
    if (w == from) return to;
  if (w == "exceed" || w == "succeed") return w;
  return {};
}

}  // namespace

std::string porter_stem(std::string_view word) {
  if (auto special = irregular(word); !special.empty()) return std::string(special);
  if (word.size() <= 2) return std::string(word);
  std::string w = step1a(word);
  w = step1b(w);
  w = step1c(w);
  w = step2(w);
  w = step3(w);
  w = step4(w);
  w = step5a(w);
  w = step5b(w);
  return w;
}

}  // namespace ugs
