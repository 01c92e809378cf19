#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ugs/text_prep.hpp"

namespace ugs {

using TokenId = std::uint32_t;

class Vocabulary {
 public:
  Vocabulary() = default;

  std::size_t size() const { return tokens_.size(); }
  std::size_t document_count() const { return document_count_; }

  std::optional<TokenId> find(const std::string& token) const;
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::size_t df(TokenId id) const { return df_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // FNV-1a over the tokens in id order, newline separated.
  std::uint64_t hash() const;

  nlohmann::json to_json() const;
  // Throws DataError if ids are not dense or a df is out of range.
  static Vocabulary from_json(const nlohmann::json& j);

  bool operator==(const Vocabulary&) const = default;

 private:
  friend Vocabulary build_vocabulary(const std::vector<Tokens>&);
  friend Vocabulary filter_extremes(const Vocabulary&, std::size_t, double);

  void add(const std::string& token, std::size_t df);

  std::vector<std::string> tokens_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t document_count_ = 0;
};

// Ids by first appearance; empty documents still count towards D. Throws
// DataError when every document is empty.
Vocabulary build_vocabulary(const std::vector<Tokens>& token_docs);

// Drops tokens with df < min_df or df > max_df_fraction * D, renumbering the
// survivors in their original order.
Vocabulary filter_extremes(const Vocabulary& vocab, std::size_t min_df, double max_df_fraction);

struct BowEntry {
  TokenId id;
  std::uint32_t count;
  bool operator==(const BowEntry&) const = default;
};

// Sparse counts, strictly increasing by id.
struct BowDocument {
  std::vector<BowEntry> entries;

  std::size_t length() const;
  bool empty() const { return entries.empty(); }
  bool operator==(const BowDocument&) const = default;
};

struct TfidfEntry {
  TokenId id;
  double weight;
};

struct TfidfDocument {
  std::vector<TfidfEntry> entries;
};

BowDocument to_bow(const Tokens& tokens, const Vocabulary& vocab);
std::vector<BowDocument> to_bow_corpus(const std::vector<Tokens>& token_docs, const Vocabulary& vocab);

// weight = count * ln(D / df), zero weights omitted.
TfidfDocument tfidf(const BowDocument& bow, const Vocabulary& vocab);

}  // namespace ugs
