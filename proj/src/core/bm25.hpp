#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "tokenizer.hpp"

namespace culturank {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;

  /// Throws InvalidConfig unless k1 >= 0 and 0 <= b <= 1.
  void validate() const;
  bool operator==(const Bm25Params&) const = default;
};

struct Posting {
  std::uint32_t doc;  // ordinal into doc_ids()
  std::uint32_t tf;

  bool operator==(const Posting&) const = default;
};

/// Immutable in-memory inverted index. Postings of each term are ordered by
/// document ordinal, which follows corpus order.
class Bm25Index {
 public:
  Bm25Index() = default;

  static Bm25Index build(const DocumentSet& docs, Bm25Params params = {});

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  std::size_t vocabulary_size() const noexcept { return postings_.size(); }
  double avg_doc_length() const noexcept { return avg_doc_length_; }
  const Bm25Params& params() const noexcept { return params_; }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  const std::vector<std::uint32_t>& doc_lengths() const noexcept { return doc_lengths_; }

  /// Empty when the term is absent.
  const std::vector<Posting>& postings(const std::string& term) const;
  const std::map<std::string, std::vector<Posting>>& all_postings() const noexcept { return postings_; }

  /// Document frequency of `term`.
  std::size_t df(const std::string& term) const { return postings(term).size(); }
  double idf(const std::string& term) const;

  /// Documents sharing no query term are omitted (implicit 0). Query terms
  /// count once regardless of repetition.
  std::map<std::string, double> scores(const TokenStream& query) const;

  std::string to_json() const;
  static Bm25Index from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Bm25Index load(const std::filesystem::path& path);

  bool operator==(const Bm25Index&) const = default;

 private:
  Bm25Params params_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  std::map<std::string, std::vector<Posting>> postings_;
};

inline Bm25Index build_index(const DocumentSet& docs, Bm25Params params = {}) {
  return Bm25Index::build(docs, params);
}

inline std::map<std::string, double> bm25_scores(const Bm25Index& index, const TokenStream& query) {
  return index.scores(query);
}

}  // namespace culturank
