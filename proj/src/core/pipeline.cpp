#include "pipeline.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace culturank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown key '" + where + key + "'");
  }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) out = it->get<T>();
}

void read_path(const json& obj, const char* key, std::filesystem::path& out) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) out = it->get<std::string>();
}

BackendConfig read_backend(const json& obj, const std::string& where, bool with_dimension) {
  std::set<std::string> keys = {"stub", "url"};
  if (with_dimension) keys.insert("dimension");
  reject_unknown_keys(obj, keys, where);
  BackendConfig b;
  read_if(obj, "stub", b.stub);
  read_if(obj, "url", b.url);
  if (with_dimension) read_if(obj, "dimension", b.dimension);
  return b;
}

}  // namespace

void PipelineConfig::validate() const {
  bm25.validate();
  ranker.validate();
  if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  if (max_in_flight < 1) throw Error(ErrorCode::InvalidConfig, "max_in_flight must be >= 1");
  if (!embedding.stub && embedding.url.empty()) {
    throw Error(ErrorCode::InvalidConfig, "embedding backend needs a url unless the stub is selected");
  }
  if (!scorer.stub && scorer.url.empty()) {
    throw Error(ErrorCode::InvalidConfig, "scorer backend needs a url unless the stub is selected");
  }
  if (retry.max_retries < 0) throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
}

PipelineConfig PipelineConfig::from_json(std::string_view text) {
  PipelineConfig cfg;
  try {
    const auto j = json::parse(text);
    reject_unknown_keys(j,
                        {"documents", "questions", "gazetteer", "template", "output_dir", "bm25", "ranker", "query",
                         "batch_size", "max_in_flight", "max_evidence_chars", "embedding", "scorer", "retry",
                         "deterministic"},
                        "");
    read_path(j, "documents", cfg.documents);
    read_path(j, "questions", cfg.questions);
    read_path(j, "gazetteer", cfg.gazetteer);
    read_path(j, "template", cfg.prompt_template);
    read_path(j, "output_dir", cfg.output_dir);
    if (auto it = j.find("bm25"); it != j.end()) {
      reject_unknown_keys(*it, {"k1", "b"}, "bm25.");
      read_if(*it, "k1", cfg.bm25.k1);
      read_if(*it, "b", cfg.bm25.b);
    }
    if (auto it = j.find("ranker"); it != j.end()) {
      reject_unknown_keys(*it, {"w_bm25", "w_sem", "region_bonus_weight", "top_k"}, "ranker.");
      read_if(*it, "w_bm25", cfg.ranker.w_bm25);
      read_if(*it, "w_sem", cfg.ranker.w_sem);
      read_if(*it, "region_bonus_weight", cfg.ranker.region_bonus_weight);
      read_if(*it, "top_k", cfg.ranker.top_k);
    }
    if (auto it = j.find("query"); it != j.end()) {
      reject_unknown_keys(*it, {"bm25_include_choices", "semantic_include_choices"}, "query.");
      read_if(*it, "bm25_include_choices", cfg.query.bm25_include_choices);
      read_if(*it, "semantic_include_choices", cfg.query.semantic_include_choices);
    }
    read_if(j, "batch_size", cfg.batch_size);
    read_if(j, "max_in_flight", cfg.max_in_flight);
    read_if(j, "max_evidence_chars", cfg.max_evidence_chars);
    if (auto it = j.find("embedding"); it != j.end()) cfg.embedding = read_backend(*it, "embedding.", true);
    if (auto it = j.find("scorer"); it != j.end()) cfg.scorer = read_backend(*it, "scorer.", false);
    if (auto it = j.find("retry"); it != j.end()) {
      reject_unknown_keys(*it, {"max_retries", "initial_backoff_ms", "timeout_ms"}, "retry.");
      read_if(*it, "max_retries", cfg.retry.max_retries);
      long long backoff = cfg.retry.initial_backoff.count();
      long long timeout = cfg.retry.timeout.count();
      read_if(*it, "initial_backoff_ms", backoff);
      read_if(*it, "timeout_ms", timeout);
      cfg.retry.initial_backoff = std::chrono::milliseconds(backoff);
      cfg.retry.timeout = std::chrono::milliseconds(timeout);
    }
    if (auto it = j.find("deterministic"); it != j.end() && !it->get<bool>()) {
      throw Error(ErrorCode::InvalidConfig, "the pipeline has no stochastic step; 'deterministic' must be true");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

std::string PipelineConfig::to_json() const {
  ordered_json j;
  j["documents"] = documents.string();
  j["questions"] = questions.string();
  j["gazetteer"] = gazetteer.string();
  j["template"] = prompt_template.string();
  j["output_dir"] = output_dir.string();
  j["bm25"] = {{"k1", bm25.k1}, {"b", bm25.b}};
  j["ranker"] = {{"w_bm25", ranker.w_bm25},
                 {"w_sem", ranker.w_sem},
                 {"region_bonus_weight", ranker.region_bonus_weight},
                 {"top_k", ranker.top_k}};
  j["query"] = {{"bm25_include_choices", query.bm25_include_choices},
                {"semantic_include_choices", query.semantic_include_choices}};
  j["batch_size"] = batch_size;
  j["max_in_flight"] = max_in_flight;
  j["max_evidence_chars"] = max_evidence_chars;
  j["embedding"] = {{"stub", embedding.stub}, {"url", embedding.url}, {"dimension", embedding.dimension}};
  j["scorer"] = {{"stub", scorer.stub}, {"url", scorer.url}};
  j["retry"] = {{"max_retries", retry.max_retries},
                {"initial_backoff_ms", retry.initial_backoff.count()},
                {"timeout_ms", retry.timeout.count()}};
  j["deterministic"] = true;
  return j.dump(2) + "\n";
}

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  return documents == o.documents && questions == o.questions && gazetteer == o.gazetteer &&
         prompt_template == o.prompt_template && output_dir == o.output_dir && bm25 == o.bm25 &&
         ranker == o.ranker && query == o.query && batch_size == o.batch_size && max_in_flight == o.max_in_flight &&
         max_evidence_chars == o.max_evidence_chars && embedding == o.embedding && scorer == o.scorer &&
         retry.max_retries == o.retry.max_retries && retry.initial_backoff == o.retry.initial_backoff &&
         retry.timeout == o.retry.timeout;
}

std::string bundle_to_json(const EvidenceBundle& bundle) {
  ordered_json ranked = ordered_json::array();
  for (const auto& e : bundle.ranked) {
    ordered_json item;
    item["doc_id"] = e.doc_id;
    item["bm25_raw"] = e.bm25_raw;
    item["bm25_norm"] = e.bm25_norm;
    item["sem_norm"] = e.sem_norm;
    item["region_hit"] = e.region_hit;
    item["final_score"] = e.final_score;
    ranked.push_back(std::move(item));
  }
  ordered_json j;
  j["question_id"] = bundle.question_id;
  j["parametric_fallback"] = bundle.parametric_fallback;
  j["ranked"] = std::move(ranked);
  return j.dump();
}

Pipeline::Pipeline(PipelineConfig cfg) : Pipeline(std::move(cfg), nullptr, nullptr) {}

Pipeline::Pipeline(PipelineConfig cfg, std::unique_ptr<EmbeddingProvider> provider,
                   std::unique_ptr<ChoiceScorer> scorer)
    : cfg_(std::move(cfg)), provider_(std::move(provider)), scorer_(std::move(scorer)) {
  cfg_.validate();
}

Pipeline::~Pipeline() = default;

EmbeddingProvider& Pipeline::provider() {
  if (!provider_) {
    if (cfg_.embedding.stub) provider_ = std::make_unique<HashingEmbeddingProvider>();
    else provider_ = std::make_unique<HttpEmbeddingProvider>(cfg_.embedding.url, cfg_.embedding.dimension, cfg_.retry);
  }
  return *provider_;
}

ChoiceScorer& Pipeline::scorer() {
  if (!scorer_) {
    if (cfg_.scorer.stub) scorer_ = std::make_unique<OverlapStubScorer>();
    else scorer_ = std::make_unique<HttpChoiceScorer>(cfg_.scorer.url, cfg_.retry);
  }
  return *scorer_;
}

const DocumentSet& Pipeline::documents() {
  if (!docs_) docs_ = load_documents(cfg_.documents);
  return *docs_;
}

const QuestionSet& Pipeline::questions() {
  if (!questions_) questions_ = load_questions(cfg_.questions);
  return *questions_;
}

const RegionGazetteer& Pipeline::gazetteer() {
  if (!gaz_) gaz_ = load_gazetteer(cfg_.gazetteer);
  return *gaz_;
}

const Bm25Index& Pipeline::index() {
  if (!index_) index_ = Bm25Index::build(documents(), cfg_.bm25);
  return *index_;
}

const PromptTemplate& Pipeline::prompt_template() {
  if (!template_) {
    auto t = cfg_.prompt_template.empty() ? PromptTemplate::default_template()
                                          : PromptTemplate::load(cfg_.prompt_template);
    t.max_evidence_chars = cfg_.max_evidence_chars;
    template_ = std::move(t);
  }
  return *template_;
}

const EvidenceRanker& Pipeline::ranker() {
  if (!ranker_) {
    // Load in a fixed order so the first failing input is reported consistently.
    const auto& docs = documents();
    const auto& idx = index();
    const auto& gaz = gazetteer();
    ranker_ = std::make_unique<EvidenceRanker>(docs, idx, provider(), cache_, gaz, cfg_.ranker, cfg_.query);
  }
  return *ranker_;
}

IndexStats Pipeline::index_stats() {
  const auto& idx = index();
  return {idx.doc_count(), idx.vocabulary_size(), idx.avg_doc_length()};
}

std::vector<EvidenceBundle> Pipeline::rank(const std::optional<std::string>& question_id) {
  const auto& qs = questions();
  const auto& r = ranker();
  std::vector<EvidenceBundle> out;
  for (const auto& q : qs) {
    if (question_id && q.question_id != *question_id) continue;
    out.push_back(r.rank(q));
  }
  if (question_id && out.empty()) throw Error(ErrorCode::UnknownQuestion, *question_id);
  return out;
}

std::vector<Prediction> Pipeline::answer(const std::function<void(const Prompt&)>& on_prompt) {
  const auto& qs = questions();
  const auto& r = ranker();
  const auto& tmpl = prompt_template();
  BatchOptions opts;
  opts.batch_size = cfg_.batch_size;
  opts.max_in_flight = cfg_.max_in_flight;
  opts.on_prompt = on_prompt;
  return run_batched(qs, r, tmpl, scorer(), opts);
}

std::vector<Prediction> Pipeline::answer_to_file(const std::filesystem::path& csv_path) {
  auto preds = answer();
  std::vector<OneHotRow> rows;
  rows.reserve(preds.size());
  for (const auto& p : preds) rows.push_back(to_one_hot(p));
  export_predictions(rows, csv_path);
  return preds;
}

EvalReport Pipeline::evaluate(const std::filesystem::path& predictions_csv) {
  const auto& qs = questions();
  const auto rows = load_predictions(predictions_csv);
  std::vector<Prediction> preds;
  preds.reserve(rows.size());
  for (const auto& r : rows) preds.push_back(from_one_hot(r));
  return exact_match_report(preds, qs);
}

}  // namespace culturank
