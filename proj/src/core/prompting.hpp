#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "ranker.hpp"

namespace culturank {

/// Prompt layout with {evidence}, {question} and {choices} placeholders, each
/// required exactly once. Substitution is single-pass, so placeholder-like
/// text inside evidence or questions is copied verbatim.
struct PromptTemplate {
  std::string body;
  std::string fallback_sentence;
  /// Per-block limit in Unicode code points; 0 means unlimited.
  std::size_t max_evidence_chars = 0;

  static PromptTemplate default_template();
  /// Throws MissingFile / InvalidTemplate.
  static PromptTemplate load(const std::filesystem::path& path);
  /// Throws InvalidTemplate.
  static PromptTemplate from_text(std::string body);

  void validate() const;
};

extern const char* const kDefaultTemplateBody;
extern const char* const kParametricFallbackSentence;

struct Prompt {
  std::string text;
  std::string question_id;
  bool parametric_fallback = true;
  std::size_t evidence_count = 0;

  // Structured copies of what went into `text`, for in-process scorers.
  std::array<std::string, kChoiceCount> choices;
  std::vector<std::string> evidence;

  bool operator==(const Prompt&) const = default;
};

inline char choice_letter(std::size_t index) { return static_cast<char>('A' + index); }

/// Heading line of the n-th (1-based) evidence block.
std::string evidence_heading(std::size_t n);

/// Throws IdMismatch when the bundle belongs to another question.
Prompt build_prompt(const Question& q, const EvidenceBundle& bundle, const PromptTemplate& tmpl);

}  // namespace culturank
