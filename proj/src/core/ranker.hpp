#pragma once

#include <map>
#include <string>
#include <vector>

#include "bm25.hpp"
#include "corpus.hpp"
#include "semantic.hpp"

namespace culturank {

struct RankerConfig {
  double w_bm25 = 0.4;
  double w_sem = 0.6;
  double region_bonus_weight = 0.3;
  std::size_t top_k = 5;

  /// Throws InvalidConfig.
  void validate() const;
  bool operator==(const RankerConfig&) const = default;
};

/// Which question fields feed each retrieval channel.
struct QueryOptions {
  bool bm25_include_choices = false;
  bool semantic_include_choices = false;

  bool operator==(const QueryOptions&) const = default;
};

struct ScoredEvidence {
  std::string doc_id;
  double bm25_raw = 0.0;
  double bm25_norm = 0.0;
  double sem_norm = 0.0;
  bool region_hit = false;
  double final_score = 0.0;
  std::string text;  // evidence body handed to prompting; not part of the score breakdown

  bool operator==(const ScoredEvidence&) const = default;
};

struct EvidenceBundle {
  std::string question_id;
  std::vector<ScoredEvidence> ranked;  // (final_score desc, doc_id asc)
  bool parametric_fallback = true;

  bool operator==(const EvidenceBundle&) const = default;
};

/// Strict ranking order: higher final score first, then smaller doc_id.
bool ranks_before(const ScoredEvidence& a, const ScoredEvidence& b) noexcept;

/// Divides every score by the maximum. All zeros when the maximum is zero.
/// Throws NegativeScore.
std::map<std::string, double> normalize_bm25(const std::map<std::string, double>& raw);

/// True when some alias of `question_region`, tokenized, occurs as a contiguous
/// token run of `doc_text`. Throws UnknownRegion.
bool region_bonus(const std::string& question_region, const std::string& doc_text, const RegionGazetteer& gaz);

/// Token-level variant used when the document is already tokenized.
bool region_bonus(const std::string& question_region, const TokenStream& doc_tokens, const RegionGazetteer& gaz);

/// (w_bm25 * bm25_norm + w_sem * sem_norm) * (1 + region_bonus_weight * [region_hit])
double fuse(double bm25_norm, double sem_norm, bool region_hit, const RankerConfig& cfg) noexcept;

/// Scores every document for a question and keeps the top_k. Per-document
/// tokens and embeddings are computed once at construction and reused across
/// questions. The ranker keeps references to its inputs; they must outlive it.
/// `rank` is safe to call concurrently.
class EvidenceRanker {
 public:
  EvidenceRanker(const DocumentSet& docs, const Bm25Index& index, EmbeddingProvider& provider,
                 EmbeddingCache& cache, const RegionGazetteer& gaz, RankerConfig cfg, QueryOptions query = {});

  EvidenceBundle rank(const Question& q) const;

  /// Every document scored, in corpus order, before top-k selection.
  std::vector<ScoredEvidence> score_all(const Question& q) const;

  const RankerConfig& config() const noexcept { return cfg_; }

 private:
  const DocumentSet& docs_;
  const Bm25Index& index_;
  EmbeddingProvider& provider_;
  EmbeddingCache& cache_;
  const RegionGazetteer& gaz_;
  RankerConfig cfg_;
  QueryOptions query_;
  std::vector<TokenStream> doc_tokens_;
  std::vector<EmbeddingVector> doc_vectors_;
};

EvidenceBundle rank_top_k(const Question& q, const DocumentSet& docs, const Bm25Index& index,
                          EmbeddingProvider& provider, EmbeddingCache& cache, const RegionGazetteer& gaz,
                          const RankerConfig& cfg, const QueryOptions& query = {});

}  // namespace culturank
