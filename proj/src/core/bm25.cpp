#include "bm25.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace culturank {
namespace {

constexpr int kSnapshotVersion = 1;
const std::vector<Posting> kNoPostings;

}  // namespace

void Bm25Params::validate() const {
  if (!(k1 >= 0.0) || !std::isfinite(k1)) throw Error(ErrorCode::InvalidConfig, "bm25 k1 must be >= 0");
  if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorCode::InvalidConfig, "bm25 b must lie in [0, 1]");
}

Bm25Index Bm25Index::build(const DocumentSet& docs, Bm25Params params) {
  params.validate();
  Bm25Index index;
  index.params_ = params;
  index.doc_ids_.reserve(docs.size());
  index.doc_lengths_.reserve(docs.size());

  std::uint64_t total_length = 0;
  for (std::uint32_t ordinal = 0; ordinal < docs.size(); ++ordinal) {
    const auto tokens = tokenize(docs[ordinal].text);
    std::map<std::string, std::uint32_t> tf;
    for (const auto& t : tokens.tokens) ++tf[t];
    for (auto& [term, count] : tf) index.postings_[term].push_back({ordinal, count});

    index.doc_ids_.push_back(docs[ordinal].doc_id);
    index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    total_length += tokens.size();
  }
  if (!docs.empty()) index.avg_doc_length_ = static_cast<double>(total_length) / static_cast<double>(docs.size());
  return index;
}

const std::vector<Posting>& Bm25Index::postings(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? kNoPostings : it->second;
}

double Bm25Index::idf(const std::string& term) const {
  const auto n = static_cast<double>(doc_count());
  const auto d = static_cast<double>(df(term));
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::map<std::string, double> Bm25Index::scores(const TokenStream& query) const {
  std::map<std::string, double> out;
  const std::set<std::string> terms(query.tokens.begin(), query.tokens.end());
  const double k1 = params_.k1;
  const double b = params_.b;

  std::vector<double> acc(doc_count(), 0.0);
  std::vector<bool> hit(doc_count(), false);
  for (const auto& term : terms) {
    const auto& list = postings(term);
    if (list.empty()) continue;
    const double w = idf(term);
    for (const auto& p : list) {
      const double tf = p.tf;
      // Every document in a posting list has at least one token, so avgdl > 0.
      const double norm = k1 * (1.0 - b + b * static_cast<double>(doc_lengths_[p.doc]) / avg_doc_length_);
      acc[p.doc] += w * tf * (k1 + 1.0) / (tf + norm);
      hit[p.doc] = true;
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (hit[i]) out.emplace(doc_ids_[i], acc[i]);
  }
  return out;
}

std::string Bm25Index::to_json() const {
  nlohmann::json postings = nlohmann::json::object();
  for (const auto& [term, list] : postings_) {
    auto& arr = postings[term] = nlohmann::json::array();
    for (const auto& p : list) arr.push_back({p.doc, p.tf});
  }
  nlohmann::json j = {
      {"format", "culturank-bm25"},
      {"version", kSnapshotVersion},
      {"params", {{"k1", params_.k1}, {"b", params_.b}}},
      {"doc_ids", doc_ids_},
      {"doc_lengths", doc_lengths_},
      {"avg_doc_length", avg_doc_length_},
      {"postings", std::move(postings)},
  };
  return j.dump();
}

Bm25Index Bm25Index::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "culturank-bm25" || j.at("version") != kSnapshotVersion) {
      throw Error(ErrorCode::MalformedRecord, "unsupported index snapshot format");
    }
    Bm25Index index;
    index.params_.k1 = j.at("params").at("k1").get<double>();
    index.params_.b = j.at("params").at("b").get<double>();
    index.params_.validate();
    index.doc_ids_ = j.at("doc_ids").get<std::vector<std::string>>();
    index.doc_lengths_ = j.at("doc_lengths").get<std::vector<std::uint32_t>>();
    index.avg_doc_length_ = j.at("avg_doc_length").get<double>();
    if (index.doc_ids_.size() != index.doc_lengths_.size()) {
      throw Error(ErrorCode::MalformedRecord, "doc_ids and doc_lengths differ in length");
    }
    std::vector<std::uint64_t> tf_sum(index.doc_ids_.size(), 0);
    for (const auto& [term, arr] : j.at("postings").items()) {
      auto& list = index.postings_[term];
      for (const auto& pair : arr) {
        Posting p{pair.at(0).get<std::uint32_t>(), pair.at(1).get<std::uint32_t>()};
        if (p.doc >= index.doc_ids_.size()) throw Error(ErrorCode::MalformedRecord, "posting out of range");
        tf_sum[p.doc] += p.tf;
        list.push_back(p);
      }
    }
    for (std::size_t i = 0; i < tf_sum.size(); ++i) {
      if (tf_sum[i] != index.doc_lengths_[i]) {
        throw Error(ErrorCode::MalformedRecord, "term frequencies disagree with length of " + index.doc_ids_[i]);
      }
    }
    return index;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("index snapshot: ") + e.what());
  }
}

void Bm25Index::save(const std::filesystem::path& path) const { write_file_atomic(path, to_json()); }

Bm25Index Bm25Index::load(const std::filesystem::path& path) { return from_json(read_file(path)); }

}  // namespace culturank
