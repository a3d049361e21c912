#pragma once

// Shared test fixtures and independent oracles. Nothing here calls into the
// code paths the oracles check.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpus.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = fs::temp_directory_path() / ("culturank-test-" + std::to_string(rng()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Direct evaluation of Okapi BM25 with IDF ln(1 + (N - df + 0.5)/(df + 0.5))
/// and binary query terms, from plain token lists. Documents without a
/// matching term are omitted.
inline std::map<std::string, double> bm25_oracle(const std::vector<std::string>& ids,
                                                 const std::vector<std::vector<std::string>>& docs,
                                                 const std::vector<std::string>& query, double k1, double b) {
  const double n = static_cast<double>(docs.size());
  double total = 0.0;
  for (const auto& d : docs) total += static_cast<double>(d.size());
  const double avgdl = docs.empty() ? 0.0 : total / n;

  const std::set<std::string> terms(query.begin(), query.end());
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0.0;
    bool matched = false;
    for (const auto& t : terms) {
      const double tf = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), t));
      if (tf == 0.0) continue;
      double df = 0.0;
      for (const auto& d : docs) df += std::find(d.begin(), d.end(), t) != d.end() ? 1.0 : 0.0;
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double len = static_cast<double>(docs[i].size());
      score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avgdl));
      matched = true;
    }
    if (matched) out[ids[i]] = score;
  }
  return out;
}

struct Planted {
  culturank::DocumentSet docs;
  culturank::QuestionSet questions;
  std::string gazetteer_jsonl;
};

inline const std::vector<std::string>& planted_regions() {
  static const std::vector<std::string> r = {"GB", "MX", "KE"};
  return r;
}

inline std::string gazetteer_jsonl() {
  return R"({"region":"GB","aliases":["United Kingdom","British","UK","Britain"]})"
         "\n"
         R"({"region":"MX","aliases":["Mexico","Mexican","México"]})"
         "\n"
         R"({"region":"KE","aliases":["Kenya","Kenyan"]})"
         "\n";
}

/// `n` questions over three languages. Each question's correct choice text
/// appears verbatim in exactly one document, which mentions the question's
/// region and is tagged with it; distractor choices use tokens found nowhere
/// in the corpus. Filler documents carry no answers.
inline Planted planted_fixture(std::size_t n, std::size_t filler = 6) {
  static const char* const kLanguages[] = {"en", "es", "sw"};
  static const char* const kRegionNames[] = {"United Kingdom", "Mexico", "Kenya"};
  Planted p;
  p.gazetteer_jsonl = gazetteer_jsonl();
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = i % 3;
    const std::string topic = "ritual" + std::to_string(i);
    const std::string answer = "dish" + std::to_string(i) + " with sauce" + std::to_string(i);

    culturank::Document d;
    d.doc_id = "doc" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    d.text = "During the " + topic + " gathering in " + kRegionNames[r] + ", families traditionally share " +
             answer + ".";
    d.language = kLanguages[r];
    d.regions = {planted_regions()[r]};
    p.docs.push_back(d);

    culturank::Question q;
    q.question_id = "q" + std::to_string(i);
    q.text = "What do families in " + std::string(kRegionNames[r]) + " share during the " + topic + " gathering?";
    q.region = planted_regions()[r];
    q.language = kLanguages[r];
    const int gold = static_cast<int>(i % 4);
    for (int c = 0; c < 4; ++c) {
      q.choices[static_cast<std::size_t>(c)] =
          c == gold ? answer : "decoy" + std::to_string(i) + std::string(1, static_cast<char>('a' + c));
    }
    q.gold_index = gold;
    p.questions.push_back(q);
  }
  for (std::size_t f = 0; f < filler; ++f) {
    culturank::Document d;
    d.doc_id = "filler" + std::to_string(f);
    d.text = "General remarks number " + std::to_string(f) + " about weather, markets and public transport.";
    d.language = "en";
    p.docs.push_back(d);
  }
  return p;
}

inline void write_planted(const Planted& p, const TempDir& dir) {
  write_text(dir / "documents.jsonl", culturank::serialize_documents(p.docs));
  write_text(dir / "questions.jsonl", culturank::serialize_questions(p.questions));
  write_text(dir / "gazetteer.jsonl", p.gazetteer_jsonl);
}

inline std::string config_json(const TempDir& dir, std::size_t batch_size = 16,
                               const std::string& documents = "documents.jsonl") {
  nlohmann::json j = {
      {"documents", (dir / documents).string()},
      {"questions", (dir / "questions.jsonl").string()},
      {"gazetteer", (dir / "gazetteer.jsonl").string()},
      {"output_dir", (dir / "out").string()},
      {"batch_size", batch_size},
      {"embedding", {{"stub", true}}},
      {"scorer", {{"stub", true}}},
  };
  return j.dump();
}

}  // namespace testing

#include "ranker.hpp"
#include "semantic.hpp"
#include "tokenizer.hpp"

namespace testing {

/// Scores every document with the brute-force BM25 oracle, a direct cosine,
/// a direct alias scan and the fusion formula, then fully sorts by
/// (final desc, doc_id asc).
inline std::vector<culturank::ScoredEvidence> oracle_full_sort(const culturank::Question& q,
                                                                const culturank::DocumentSet& docs,
                                                                culturank::EmbeddingProvider& provider,
                                                                const culturank::RegionGazetteer& gaz,
                                                                const culturank::RankerConfig& cfg, double k1 = 1.2,
                                                                double b = 0.75) {
  std::vector<std::string> ids, texts;
  std::vector<std::vector<std::string>> doc_tokens;
  for (const auto& d : docs) {
    ids.push_back(d.doc_id);
    texts.push_back(d.text);
    doc_tokens.push_back(culturank::tokenize(d.text).tokens);
  }
  const auto raw = bm25_oracle(ids, doc_tokens, culturank::tokenize(q.text).tokens, k1, b);
  double max = 0.0;
  for (const auto& [id, s] : raw) max = std::max(max, s);

  const std::vector<std::string> qtext = {q.text};
  const auto qv = provider.embed_batch(qtext).front();
  const auto dv = provider.embed_batch(texts);

  std::vector<culturank::ScoredEvidence> all;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    culturank::ScoredEvidence e;
    e.doc_id = ids[i];
    e.text = texts[i];
    if (auto it = raw.find(ids[i]); it != raw.end()) {
      e.bm25_raw = it->second;
      e.bm25_norm = max > 0.0 ? it->second / max : 0.0;
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t k = 0; k < qv.size(); ++k) {
      dot += qv[k] * dv[i][k];
      nu += qv[k] * qv[k];
      nv += dv[i][k] * dv[i][k];
    }
    if (nu > 0.0 && nv > 0.0) {
      const double c = std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
      e.sem_norm = (c + 1.0) / 2.0;
    }
    for (const auto& alias : gaz.aliases(q.region)) {
      const auto a = culturank::tokenize(alias).tokens;
      if (!a.empty() && std::search(doc_tokens[i].begin(), doc_tokens[i].end(), a.begin(), a.end()) !=
                            doc_tokens[i].end()) {
        e.region_hit = true;
      }
    }
    e.final_score = (cfg.w_bm25 * e.bm25_norm + cfg.w_sem * e.sem_norm) *
                    (1.0 + cfg.region_bonus_weight * (e.region_hit ? 1.0 : 0.0));
    all.push_back(e);
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.final_score != y.final_score ? x.final_score > y.final_score : x.doc_id < y.doc_id;
  });
  return all;
}

/// Random corpus of up to `max_docs` documents over a small vocabulary that
/// includes the planted region aliases, plus a question over the same words.
inline std::pair<culturank::DocumentSet, culturank::Question> random_corpus(std::mt19937_64& rng,
                                                                            std::size_t max_docs) {
  static const std::vector<std::string> vocab = {
      "rice",  "bread", "tea",   "festival", "wedding", "market", "holiday", "family", "school",
      "work",  "sport", "dance", "music",    "kenya",   "mexico", "british", "united", "kingdom"};
  std::uniform_int_distribution<std::size_t> ndocs(1, max_docs), len(1, 10), word(0, vocab.size() - 1),
      reg(0, 2);
  culturank::DocumentSet docs(ndocs(rng));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto& d = docs[i];
    d.doc_id = "d" + std::to_string(i);
    d.language = "en";
    for (auto n = len(rng); n > 0; --n) d.text += vocab[word(rng)] + " ";
  }
  // Shuffle ids so corpus order differs from id order.
  std::vector<std::string> ids;
  for (const auto& d : docs) ids.push_back(d.doc_id);
  std::shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < docs.size(); ++i) docs[i].doc_id = ids[i];

  culturank::Question q;
  q.question_id = "q";
  for (auto n = len(rng); n > 0; --n) q.text += vocab[word(rng)] + " ";
  q.choices = {"a", "b", "c", "d"};
  q.region = planted_regions()[reg(rng)];
  q.language = "en";
  return {docs, q};
}

}  // namespace testing
