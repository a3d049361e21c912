#include "prompting.hpp"

#include <string_view>

#include "error.hpp"

namespace culturank {

const char* const kDefaultTemplateBody =
    "You are a cultural reasoning model. You answer multiple-choice questions about everyday life, "
    "customs and traditions in specific countries and regions. Use the evidence below when it is relevant.\n"
    "\n"
    "{evidence}\n"
    "\n"
    "Question: {question}\n"
    "{choices}\n"
    "\n"
    "Answer with a single letter: A, B, C, or D.\n"
    "Answer:";

const char* const kParametricFallbackSentence =
    "No evidence was retrieved for this question. Answer using your own knowledge.";

namespace {

constexpr std::string_view kPlaceholders[] = {"{evidence}", "{question}", "{choices}"};

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

// Truncates to at most `limit` code points without splitting a UTF-8 sequence.
std::string_view truncate_code_points(std::string_view s, std::size_t limit) {
  if (limit == 0) return s;
  std::size_t points = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if ((c & 0xC0) != 0x80) {
      if (points == limit) return s.substr(0, i);
      ++points;
    }
  }
  return s;
}

}  // namespace

PromptTemplate PromptTemplate::default_template() { return from_text(kDefaultTemplateBody); }

PromptTemplate PromptTemplate::from_text(std::string body) {
  PromptTemplate t;
  t.body = std::move(body);
  t.fallback_sentence = kParametricFallbackSentence;
  t.validate();
  return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  auto text = read_file(path);
  // A trailing newline in the file is an editor artifact, not template content.
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return from_text(std::move(text));
}

void PromptTemplate::validate() const {
  for (auto ph : kPlaceholders) {
    const auto n = count_occurrences(body, ph);
    if (n != 1) {
      throw Error(ErrorCode::InvalidTemplate,
                  "placeholder " + std::string(ph) + " must appear exactly once (found " + std::to_string(n) + ")");
    }
  }
  if (fallback_sentence.empty()) throw Error(ErrorCode::InvalidTemplate, "fallback sentence is empty");
}

std::string evidence_heading(std::size_t n) { return "Evidence " + std::to_string(n) + ":"; }

Prompt build_prompt(const Question& q, const EvidenceBundle& bundle, const PromptTemplate& tmpl) {
  if (bundle.question_id != q.question_id) {
    throw Error(ErrorCode::IdMismatch, "bundle " + bundle.question_id + " for question " + q.question_id);
  }
  Prompt p;
  p.question_id = q.question_id;
  p.choices = q.choices;
  p.parametric_fallback = bundle.ranked.empty();
  p.evidence_count = bundle.ranked.size();

  std::string evidence;
  if (p.parametric_fallback) {
    evidence = tmpl.fallback_sentence;
  } else {
    for (std::size_t i = 0; i < bundle.ranked.size(); ++i) {
      const auto body = truncate_code_points(bundle.ranked[i].text, tmpl.max_evidence_chars);
      if (i > 0) evidence += "\n\n";
      evidence += evidence_heading(i + 1);
      evidence += '\n';
      evidence += body;
      p.evidence.emplace_back(body);
    }
  }

  std::string choices;
  for (std::size_t i = 0; i < kChoiceCount; ++i) {
    if (i > 0) choices += '\n';
    choices += choice_letter(i);
    choices += ". ";
    choices += q.choices[i];
  }

  const std::string_view body = tmpl.body;
  std::string& out = p.text;
  out.reserve(body.size() + evidence.size() + q.text.size() + choices.size());
  for (std::size_t pos = 0; pos < body.size();) {
    bool replaced = false;
    if (body[pos] == '{') {
      for (auto ph : kPlaceholders) {
        if (body.compare(pos, ph.size(), ph) != 0) continue;
        if (ph == "{evidence}") out += evidence;
        else if (ph == "{question}") out += q.text;
        else out += choices;
        pos += ph.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out += body[pos++];
  }
  return p;
}

}  // namespace culturank
