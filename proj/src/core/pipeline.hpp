#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "bm25.hpp"
#include "corpus.hpp"
#include "eval.hpp"
#include "inference.hpp"
#include "prompting.hpp"
#include "ranker.hpp"
#include "semantic.hpp"

namespace culturank {

struct BackendConfig {
  bool stub = true;
  std::string url;
  std::size_t dimension = 0;  // embeddings only; 0 adopts the backend's width

  bool operator==(const BackendConfig&) const = default;
};

struct PipelineConfig {
  std::filesystem::path documents;
  std::filesystem::path questions;
  std::filesystem::path gazetteer;
  std::filesystem::path prompt_template;  // empty selects the built-in template
  std::filesystem::path output_dir = ".";

  Bm25Params bm25;
  RankerConfig ranker;
  QueryOptions query;
  std::size_t batch_size = 16;
  std::size_t max_in_flight = 1;
  std::size_t max_evidence_chars = 0;

  BackendConfig embedding;
  BackendConfig scorer;
  RetryPolicy retry;

  /// Throws InvalidConfig.
  void validate() const;

  /// Missing keys keep their defaults; unknown keys are rejected.
  static PipelineConfig from_json(std::string_view text);
  std::string to_json() const;

  bool operator==(const PipelineConfig& o) const;
};

struct IndexStats {
  std::size_t doc_count = 0;
  std::size_t vocabulary_size = 0;
  double avg_doc_length = 0.0;
};

/// One JSON object (no trailing newline) with the per-document score breakdown.
std::string bundle_to_json(const EvidenceBundle& bundle);

/// Composition root: loads inputs on first use and wires the modules
/// together. Not thread-safe; the inner stages parallelize on their own.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);
  /// Injects backends instead of building them from the configuration.
  Pipeline(PipelineConfig cfg, std::unique_ptr<EmbeddingProvider> provider, std::unique_ptr<ChoiceScorer> scorer);
  ~Pipeline();

  const PipelineConfig& config() const noexcept { return cfg_; }

  const DocumentSet& documents();
  const QuestionSet& questions();
  const RegionGazetteer& gazetteer();
  const Bm25Index& index();
  const PromptTemplate& prompt_template();
  const EvidenceRanker& ranker();
  EmbeddingCache& embedding_cache() noexcept { return cache_; }

  IndexStats index_stats();

  /// Bundles for every question, or only for `question_id` (throws
  /// UnknownQuestion when absent).
  std::vector<EvidenceBundle> rank(const std::optional<std::string>& question_id = std::nullopt);

  std::vector<Prediction> answer(const std::function<void(const Prompt&)>& on_prompt = {});

  /// Runs answer() and writes the CSV only after every batch succeeded.
  std::vector<Prediction> answer_to_file(const std::filesystem::path& csv_path);

  EvalReport evaluate(const std::filesystem::path& predictions_csv);

 private:
  EmbeddingProvider& provider();
  ChoiceScorer& scorer();

  PipelineConfig cfg_;
  std::unique_ptr<EmbeddingProvider> provider_;
  std::unique_ptr<ChoiceScorer> scorer_;
  EmbeddingCache cache_;
  std::optional<DocumentSet> docs_;
  std::optional<QuestionSet> questions_;
  std::optional<RegionGazetteer> gaz_;
  std::optional<Bm25Index> index_;
  std::optional<PromptTemplate> template_;
  std::unique_ptr<EvidenceRanker> ranker_;
};

}  // namespace culturank
