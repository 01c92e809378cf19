#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>

namespace ugs {

using WordSet = std::unordered_set<std::string>;

// English stopword list compiled in from data/stopwords.txt.
const WordSet& bundled_stopwords();

// Frequent English words (data/common_words.txt), used with the stopwords by
// the English-text filter.
const WordSet& bundled_common_words();

// One token per line, UTF-8; blank lines and surrounding whitespace ignored.
WordSet load_word_list(const std::filesystem::path& path);
WordSet parse_word_list(const std::string& text);

}  // namespace ugs
