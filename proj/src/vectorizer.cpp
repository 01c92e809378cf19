#include "ugs/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "ugs/errors.hpp"

namespace ugs {

std::optional<TokenId> Vocabulary::find(const std::string& token) const {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  return std::nullopt;
}

void Vocabulary::add(const std::string& token, std::size_t df) {
  index_.emplace(token, static_cast<TokenId>(tokens_.size()));
  tokens_.push_back(token);
  df_.push_back(df);
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    entries.push_back({{"token", tokens_[i]}, {"id", i}, {"df", df_[i]}});
  return {{"document_count", document_count_}, {"tokens", std::move(entries)}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  Vocabulary v;
  try {
    v.document_count_ = j.at("document_count").get<std::size_t>();
    const auto& entries = j.at("tokens");
    std::vector<std::pair<std::size_t, std::pair<std::string, std::size_t>>> rows;
    for (const auto& e : entries)
      rows.push_back({e.at("id").get<std::size_t>(), {e.at("token").get<std::string>(), e.at("df").get<std::size_t>()}});
    std::sort(rows.begin(), rows.end());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].first != i) throw DataError("vocabulary ids are not dense");
      const auto& [token, df] = rows[i].second;
      if (df < 1 || df > v.document_count_) throw DataError("vocabulary df out of range for '" + token + "'");
      if (v.index_.count(token)) throw DataError("duplicate vocabulary token '" + token + "'");
      v.add(token, df);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed vocabulary: ") + e.what());
  }
  return v;
}

Vocabulary build_vocabulary(const std::vector<Tokens>& token_docs) {
  Vocabulary v;
  v.document_count_ = token_docs.size();
  std::vector<std::size_t> df;
  for (const auto& doc : token_docs) {
    std::unordered_set<TokenId> seen;
    for (const auto& t : doc) {
      auto id = v.find(t);
      if (!id) {
        v.add(t, 0);
        id = static_cast<TokenId>(v.size() - 1);
      }
      if (seen.insert(*id).second) ++v.df_[*id];
    }
  }
  if (v.size() == 0) throw DataError("cannot build a vocabulary: every document is empty");
  return v;
}

Vocabulary filter_extremes(const Vocabulary& vocab, std::size_t min_df, double max_df_fraction) {
  Vocabulary out;
  out.document_count_ = vocab.document_count_;
  const double ceiling = max_df_fraction * static_cast<double>(vocab.document_count_);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto df = vocab.df_[i];
    if (df < min_df || static_cast<double>(df) > ceiling) continue;
    out.add(vocab.tokens_[i], df);
  }
  if (out.size() == 0) throw DataError("frequency filtering removed every token");
  return out;
}

std::size_t BowDocument::length() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.count;
  return n;
}

BowDocument to_bow(const Tokens& tokens, const Vocabulary& vocab) {
  std::map<TokenId, std::uint32_t> counts;
  for (const auto& t : tokens)
    if (auto id = vocab.find(t)) ++counts[*id];
  BowDocument doc;
  doc.entries.reserve(counts.size());
  for (const auto& [id, count] : counts) doc.entries.push_back({id, count});
  return doc;
}

std::vector<BowDocument> to_bow_corpus(const std::vector<Tokens>& token_docs, const Vocabulary& vocab) {
  std::vector<BowDocument> out(token_docs.size());
  const auto n = static_cast<std::int64_t>(token_docs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = to_bow(token_docs[i], vocab);
  return out;
}

TfidfDocument tfidf(const BowDocument& bow, const Vocabulary& vocab) {
  TfidfDocument out;
  const double total = static_cast<double>(vocab.document_count());
  for (const auto& e : bow.entries) {
    const double idf = std::log(total / static_cast<double>(vocab.df(e.id)));
    const double w = static_cast<double>(e.count) * idf;
    if (w > 0.0) out.entries.push_back({e.id, w});
  }
  return out;
}

}  // namespace ugs
