#include "corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "tokenizer.hpp"

namespace culturank {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\n\r\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::string where(std::string_view source, std::size_t line) {
  std::ostringstream os;
  os << source << ':' << line;
  return os.str();
}

[[noreturn]] void malformed(std::string_view source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + " (" + where(source, line) + "): " + what);
}

// Calls fn(line_number, line_text) for every line. A final newline does not
// start an extra line.
template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = nl + 1;
  }
}

json parse_object(std::string_view line, std::string_view source, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    malformed(source, line_no, e.what());
  }
  if (!obj.is_object()) malformed(source, line_no, "expected a JSON object");
  return obj;
}

std::string required_string(const json& obj, const char* key, std::string_view source, std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    malformed(source, line_no, std::string("field '") + key + "' must be a string");
  }
  auto value = it->get<std::string>();
  if (trim(value).empty()) malformed(source, line_no, std::string("field '") + key + "' is empty");
  return value;
}

std::vector<std::string> string_array(const json& value, const char* key, std::string_view source,
                                      std::size_t line_no) {
  if (!value.is_array()) malformed(source, line_no, std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) malformed(source, line_no, std::string("field '") + key + "' must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

void RegionGazetteer::add(const std::string& region, const std::vector<std::string>& aliases) {
  if (regions_.contains(region)) throw Error(ErrorCode::DuplicateId, region);
  std::vector<std::string> folded;
  std::unordered_set<std::string> seen;
  for (const auto& alias : aliases) {
    if (trim(alias).empty()) continue;
    auto f = fold_case(alias);
    if (seen.insert(f).second) folded.push_back(std::move(f));
  }
  if (folded.empty()) throw Error(ErrorCode::EmptyAliasList, region);
  regions_.emplace(region, std::move(folded));
}

bool RegionGazetteer::contains(std::string_view region) const { return regions_.find(region) != regions_.end(); }

const std::vector<std::string>& RegionGazetteer::aliases(std::string_view region) const {
  auto it = regions_.find(region);
  if (it == regions_.end()) throw Error(ErrorCode::UnknownRegion, std::string(region));
  return it->second;
}

DocumentSet parse_documents(std::string_view content, std::string_view source) {
  DocumentSet docs;
  std::unordered_map<std::string, std::size_t> first_line;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const auto obj = parse_object(line, source, line_no);
    Document doc;
    doc.doc_id = required_string(obj, "doc_id", source, line_no);
    doc.text = required_string(obj, "text", source, line_no);
    doc.language = required_string(obj, "language", source, line_no);
    if (auto it = obj.find("regions"); it != obj.end() && !it->is_null()) {
      doc.regions = string_array(*it, "regions", source, line_no);
    }
    if (!first_line.emplace(doc.doc_id, line_no).second) {
      throw Error(ErrorCode::DuplicateId,
                  doc.doc_id + " (line " + std::to_string(line_no) + ", first seen on line " +
                      std::to_string(first_line[doc.doc_id]) + ")");
    }
    docs.push_back(std::move(doc));
  });
  return docs;
}

QuestionSet parse_questions(std::string_view content, std::string_view source) {
  QuestionSet questions;
  std::unordered_set<std::string> ids;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const auto obj = parse_object(line, source, line_no);
    Question q;
    q.question_id = required_string(obj, "question_id", source, line_no);
    q.text = required_string(obj, "text", source, line_no);
    q.region = required_string(obj, "region", source, line_no);
    q.language = required_string(obj, "language", source, line_no);

    auto it = obj.find("choices");
    if (it == obj.end()) malformed(source, line_no, "field 'choices' is missing");
    const auto choices = string_array(*it, "choices", source, line_no);
    if (choices.size() != kChoiceCount) {
      throw Error(ErrorCode::ChoiceCountError, q.question_id + " has " + std::to_string(choices.size()) +
                                                   " choices (line " + std::to_string(line_no) + ")");
    }
    for (std::size_t i = 0; i < kChoiceCount; ++i) {
      if (trim(choices[i]).empty()) malformed(source, line_no, "choice " + std::to_string(i) + " is empty");
      q.choices[i] = choices[i];
    }

    if (auto g = obj.find("gold_index"); g != obj.end() && !g->is_null()) {
      if (!g->is_number_integer()) malformed(source, line_no, "field 'gold_index' must be an integer");
      const auto gold = g->get<long long>();
      if (gold < 0 || gold >= static_cast<long long>(kChoiceCount)) {
        throw Error(ErrorCode::GoldIndexRange, q.question_id + " gold_index " + std::to_string(gold) + " (line " +
                                                   std::to_string(line_no) + ")");
      }
      q.gold_index = static_cast<int>(gold);
    }
    if (!ids.insert(q.question_id).second) {
      throw Error(ErrorCode::DuplicateId, q.question_id + " (line " + std::to_string(line_no) + ")");
    }
    questions.push_back(std::move(q));
  });
  return questions;
}

RegionGazetteer parse_gazetteer(std::string_view content, std::string_view source) {
  RegionGazetteer gaz;
  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    const auto obj = parse_object(line, source, line_no);
    const auto region = required_string(obj, "region", source, line_no);
    auto it = obj.find("aliases");
    if (it == obj.end()) malformed(source, line_no, "field 'aliases' is missing");
    const auto aliases = string_array(*it, "aliases", source, line_no);
    for (const auto& a : aliases) {
      if (trim(a).empty()) malformed(source, line_no, "alias must be non-empty");
    }
    gaz.add(region, aliases);
  });
  return gaz;
}

std::string read_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw Error(ErrorCode::MissingFile, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed: " + path.string());
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::IoError, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot move into place: " + path.string());
  }
}

DocumentSet load_documents(const std::filesystem::path& path) { return parse_documents(read_file(path), path.string()); }

QuestionSet load_questions(const std::filesystem::path& path) { return parse_questions(read_file(path), path.string()); }

RegionGazetteer load_gazetteer(const std::filesystem::path& path) {
  return parse_gazetteer(read_file(path), path.string());
}

std::string serialize_documents(const DocumentSet& docs) {
  std::string out;
  for (const auto& d : docs) {
    json obj = {{"doc_id", d.doc_id}, {"text", d.text}, {"language", d.language}, {"regions", d.regions}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_questions(const QuestionSet& questions) {
  std::string out;
  for (const auto& q : questions) {
    json obj = {{"question_id", q.question_id}, {"text", q.text},         {"choices", q.choices},
                {"region", q.region},           {"language", q.language}};
    if (q.gold_index) obj["gold_index"] = *q.gold_index;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_documents(const std::filesystem::path& path, const DocumentSet& docs) {
  write_file_atomic(path, serialize_documents(docs));
}

}  // namespace culturank
