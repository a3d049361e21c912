#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "inference.hpp"

namespace culturank {

struct OneHotRow {
  std::string question_id;
  std::array<int, kChoiceCount> cells{};

  bool operator==(const OneHotRow&) const = default;
};

struct LanguageStats {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;

  bool operator==(const LanguageStats&) const = default;
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::map<std::string, LanguageStats> per_language;
  /// Unweighted mean of per-language accuracies.
  double macro_avg = 0.0;

  std::string to_json() const;
  bool operator==(const EvalReport&) const = default;
};

/// Throws OutOfRange when chosen_index is not in [0, 3].
OneHotRow to_one_hot(const Prediction& p);

/// Exact match against gold answers. Predictions and questions must pair up
/// one-to-one by id (UnmatchedPrediction otherwise) and every question must
/// carry a gold index (MissingGold).
EvalReport exact_match_report(const std::vector<Prediction>& preds, const QuestionSet& qs);

/// CSV with header `question_id,A,B,C,D`, LF line endings, input order.
std::string predictions_csv(const std::vector<OneHotRow>& rows);

/// Writes the CSV atomically. Throws IoError.
void export_predictions(const std::vector<OneHotRow>& rows, const std::filesystem::path& path);

/// Parses a predictions CSV back into rows; each row must be one-hot.
/// Throws MissingFile / MalformedRecord.
std::vector<OneHotRow> load_predictions(const std::filesystem::path& path);
std::vector<OneHotRow> parse_predictions_csv(std::string_view content);

/// Prediction whose logits are the one-hot cells.
Prediction from_one_hot(const OneHotRow& row);

}  // namespace culturank
