#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace culturank {

inline constexpr std::size_t kChoiceCount = 4;

struct Document {
  std::string doc_id;
  std::string text;
  std::string language;
  std::vector<std::string> regions;  // audit metadata only; never used for scoring

  bool operator==(const Document&) const = default;
};

struct Question {
  std::string question_id;
  std::string text;
  std::array<std::string, kChoiceCount> choices;
  std::string region;
  std::string language;
  std::optional<int> gold_index;

  bool operator==(const Question&) const = default;
};

using DocumentSet = std::vector<Document>;
using QuestionSet = std::vector<Question>;

/// Region code -> case-folded, deduplicated aliases (first-seen order).
class RegionGazetteer {
 public:
  RegionGazetteer() = default;

  /// Adds a region. Aliases are case-folded and deduplicated.
  /// Throws EmptyAliasList when nothing is left, DuplicateId on a repeated code.
  void add(const std::string& region, const std::vector<std::string>& aliases);

  bool contains(std::string_view region) const;
  /// Throws UnknownRegion.
  const std::vector<std::string>& aliases(std::string_view region) const;
  std::size_t size() const noexcept { return regions_.size(); }

  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const noexcept {
    return regions_;
  }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> regions_;
};

DocumentSet load_documents(const std::filesystem::path& path);
QuestionSet load_questions(const std::filesystem::path& path);
RegionGazetteer load_gazetteer(const std::filesystem::path& path);

// JSONL parsing of in-memory content; `source` names the input in errors.
DocumentSet parse_documents(std::string_view content, std::string_view source = "<memory>");
QuestionSet parse_questions(std::string_view content, std::string_view source = "<memory>");
RegionGazetteer parse_gazetteer(std::string_view content, std::string_view source = "<memory>");

std::string serialize_documents(const DocumentSet& docs);
std::string serialize_questions(const QuestionSet& questions);
void save_documents(const std::filesystem::path& path, const DocumentSet& docs);

/// Reads a whole file. Throws MissingFile / IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temporary and renames, so readers never observe a
/// partially written file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace culturank
