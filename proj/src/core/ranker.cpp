#include "ranker.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace culturank {
namespace {

std::string with_choices(const Question& q, bool include) {
  if (!include) return q.text;
  std::string s = q.text;
  for (const auto& c : q.choices) {
    s += '\n';
    s += c;
  }
  return s;
}

}  // namespace

void RankerConfig::validate() const {
  auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  if (!finite_nonneg(w_bm25) || !finite_nonneg(w_sem)) {
    throw Error(ErrorCode::InvalidConfig, "ranker weights must be finite and >= 0");
  }
  if (!(w_bm25 + w_sem > 0.0)) throw Error(ErrorCode::InvalidConfig, "w_bm25 + w_sem must be > 0");
  if (!finite_nonneg(region_bonus_weight)) throw Error(ErrorCode::InvalidConfig, "region_bonus_weight must be >= 0");
  if (top_k < 1) throw Error(ErrorCode::InvalidConfig, "top_k must be >= 1");
}

bool ranks_before(const ScoredEvidence& a, const ScoredEvidence& b) noexcept {
  if (a.final_score != b.final_score) return a.final_score > b.final_score;
  return a.doc_id < b.doc_id;
}

std::map<std::string, double> normalize_bm25(const std::map<std::string, double>& raw) {
  double max = 0.0;
  for (const auto& [id, s] : raw) {
    if (!(s >= 0.0)) throw Error(ErrorCode::NegativeScore, id);
    max = std::max(max, s);
  }
  std::map<std::string, double> out;
  for (const auto& [id, s] : raw) out.emplace(id, max > 0.0 ? s / max : 0.0);
  return out;
}

bool region_bonus(const std::string& question_region, const TokenStream& doc_tokens, const RegionGazetteer& gaz) {
  for (const auto& alias : gaz.aliases(question_region)) {
    if (contains_subsequence(doc_tokens.tokens, tokenize(alias).tokens)) return true;
  }
  return false;
}

bool region_bonus(const std::string& question_region, const std::string& doc_text, const RegionGazetteer& gaz) {
  // Resolve the region before tokenizing so unknown regions fail fast.
  (void)gaz.aliases(question_region);
  return region_bonus(question_region, tokenize(doc_text), gaz);
}

double fuse(double bm25_norm, double sem_norm, bool region_hit, const RankerConfig& cfg) noexcept {
  return (cfg.w_bm25 * bm25_norm + cfg.w_sem * sem_norm) * (1.0 + cfg.region_bonus_weight * (region_hit ? 1.0 : 0.0));
}

EvidenceRanker::EvidenceRanker(const DocumentSet& docs, const Bm25Index& index, EmbeddingProvider& provider,
                               EmbeddingCache& cache, const RegionGazetteer& gaz, RankerConfig cfg,
                               QueryOptions query)
    : docs_(docs), index_(index), provider_(provider), cache_(cache), gaz_(gaz), cfg_(cfg), query_(query) {
  cfg_.validate();
  if (index_.doc_count() != docs_.size()) {
    throw Error(ErrorCode::Internal, "index does not cover the document set");
  }
  doc_tokens_.reserve(docs_.size());
  std::vector<std::string> texts;
  texts.reserve(docs_.size());
  for (const auto& d : docs_) {
    doc_tokens_.push_back(tokenize(d.text));
    texts.push_back(d.text);
  }
  if (!texts.empty()) doc_vectors_ = embed_cached(provider_, cache_, texts);
}

std::vector<ScoredEvidence> EvidenceRanker::score_all(const Question& q) const {
  std::vector<ScoredEvidence> all;
  if (docs_.empty()) return all;

  // Validates the region even when no document could match it.
  const auto& aliases = gaz_.aliases(q.region);
  std::vector<TokenStream> alias_tokens;
  alias_tokens.reserve(aliases.size());
  for (const auto& a : aliases) alias_tokens.push_back(tokenize(a));

  const auto raw = index_.scores(tokenize(with_choices(q, query_.bm25_include_choices)));
  const auto norm = normalize_bm25(raw);

  const std::string sem_query = with_choices(q, query_.semantic_include_choices);
  const auto qvec = embed_cached(provider_, cache_, std::span<const std::string>(&sem_query, 1)).front();
  const bool q_zero = is_zero_vector(qvec);

  all.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    ScoredEvidence ev;
    ev.doc_id = docs_[i].doc_id;
    ev.text = docs_[i].text;
    if (auto it = raw.find(ev.doc_id); it != raw.end()) {
      ev.bm25_raw = it->second;
      ev.bm25_norm = norm.at(ev.doc_id);
    }
    // A text with no embeddable content carries no similarity signal.
    ev.sem_norm = (q_zero || is_zero_vector(doc_vectors_[i])) ? 0.0 : semantic_norm(cosine(qvec, doc_vectors_[i]));
    ev.region_hit = std::any_of(alias_tokens.begin(), alias_tokens.end(), [&](const TokenStream& a) {
      return contains_subsequence(doc_tokens_[i].tokens, a.tokens);
    });
    ev.final_score = fuse(ev.bm25_norm, ev.sem_norm, ev.region_hit, cfg_);
    all.push_back(std::move(ev));
  }
  return all;
}

EvidenceBundle EvidenceRanker::rank(const Question& q) const {
  EvidenceBundle bundle;
  bundle.question_id = q.question_id;
  auto all = score_all(q);
  const bool any_positive = std::any_of(all.begin(), all.end(), [](const auto& e) { return e.final_score > 0.0; });
  if (!any_positive) {
    bundle.parametric_fallback = true;
    return bundle;
  }
  const auto k = std::min(cfg_.top_k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), ranks_before);
  all.resize(k);
  bundle.ranked = std::move(all);
  bundle.parametric_fallback = false;
  return bundle;
}

EvidenceBundle rank_top_k(const Question& q, const DocumentSet& docs, const Bm25Index& index,
                          EmbeddingProvider& provider, EmbeddingCache& cache, const RegionGazetteer& gaz,
                          const RankerConfig& cfg, const QueryOptions& query) {
  return EvidenceRanker(docs, index, provider, cache, gaz, cfg, query).rank(q);
}

}  // namespace culturank
