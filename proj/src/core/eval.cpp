#include "eval.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace culturank {

OneHotRow to_one_hot(const Prediction& p) {
  if (p.chosen_index < 0 || p.chosen_index >= static_cast<int>(kChoiceCount)) {
    throw Error(ErrorCode::OutOfRange, p.question_id + " chosen_index " + std::to_string(p.chosen_index));
  }
  OneHotRow row;
  row.question_id = p.question_id;
  row.cells[static_cast<std::size_t>(p.chosen_index)] = 1;
  return row;
}

Prediction from_one_hot(const OneHotRow& row) {
  Prediction p;
  p.question_id = row.question_id;
  const auto it = std::find(row.cells.begin(), row.cells.end(), 1);
  p.chosen_index = static_cast<int>(it - row.cells.begin());
  for (std::size_t i = 0; i < kChoiceCount; ++i) p.logits[i] = row.cells[i];
  return p;
}

EvalReport exact_match_report(const std::vector<Prediction>& preds, const QuestionSet& qs) {
  std::unordered_map<std::string, const Question*> by_id;
  for (const auto& q : qs) by_id.emplace(q.question_id, &q);

  EvalReport report;
  std::unordered_set<std::string> seen;
  for (const auto& p : preds) {
    auto it = by_id.find(p.question_id);
    if (it == by_id.end()) throw Error(ErrorCode::UnmatchedPrediction, p.question_id);
    if (!seen.insert(p.question_id).second) {
      throw Error(ErrorCode::UnmatchedPrediction, p.question_id + " predicted more than once");
    }
    const Question& q = *it->second;
    if (!q.gold_index) throw Error(ErrorCode::MissingGold, q.question_id);

    const bool hit = p.chosen_index == *q.gold_index;
    ++report.total;
    report.correct += hit ? 1 : 0;
    auto& lang = report.per_language[q.language];
    ++lang.total;
    lang.correct += hit ? 1 : 0;
  }
  for (const auto& q : qs) {
    if (!seen.contains(q.question_id)) {
      throw Error(ErrorCode::UnmatchedPrediction, q.question_id + " has no prediction");
    }
  }

  if (report.total > 0) {
    report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.total);
  }
  double macro = 0.0;
  for (auto& [code, stats] : report.per_language) {
    stats.accuracy = static_cast<double>(stats.correct) / static_cast<double>(stats.total);
    macro += stats.accuracy;
  }
  if (!report.per_language.empty()) macro /= static_cast<double>(report.per_language.size());
  report.macro_avg = macro;
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json langs = nlohmann::ordered_json::object();
  for (const auto& [code, s] : per_language) {
    langs[code] = {{"total", s.total}, {"correct", s.correct}, {"accuracy", s.accuracy}};
  }
  nlohmann::ordered_json j;
  j["total"] = total;
  j["correct"] = correct;
  j["accuracy"] = accuracy;
  j["per_language"] = std::move(langs);
  j["macro_avg"] = macro_avg;
  return j.dump(2) + "\n";
}

std::string predictions_csv(const std::vector<OneHotRow>& rows) {
  std::string out = "question_id,A,B,C,D\n";
  for (const auto& r : rows) {
    const auto ones = std::count(r.cells.begin(), r.cells.end(), 1);
    const auto zeros = std::count(r.cells.begin(), r.cells.end(), 0);
    if (ones != 1 || zeros != 3) throw Error(ErrorCode::Internal, "row " + r.question_id + " is not one-hot");
    if (r.question_id.find_first_of(",\"\r\n") != std::string::npos) {
      throw Error(ErrorCode::IoError, "question_id not representable in CSV: " + r.question_id);
    }
    out += r.question_id;
    for (int c : r.cells) {
      out += ',';
      out += static_cast<char>('0' + c);
    }
    out += '\n';
  }
  return out;
}

void export_predictions(const std::vector<OneHotRow>& rows, const std::filesystem::path& path) {
  write_file_atomic(path, predictions_csv(rows));
}

std::vector<OneHotRow> parse_predictions_csv(std::string_view content) {
  std::vector<OneHotRow> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line_no == 1) {
      if (line != "question_id,A,B,C,D") throw Error(ErrorCode::MalformedRecord, "line 1: unexpected CSV header");
      continue;
    }
    std::vector<std::string_view> fields;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const auto bad = [&](const std::string& why) {
      return Error(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != kChoiceCount + 1 || fields[0].empty()) throw bad("expected question_id and 4 cells");
    OneHotRow row;
    row.question_id = std::string(fields[0]);
    for (std::size_t i = 0; i < kChoiceCount; ++i) {
      if (fields[i + 1] == "0") row.cells[i] = 0;
      else if (fields[i + 1] == "1") row.cells[i] = 1;
      else throw bad("cells must be 0 or 1");
    }
    if (std::count(row.cells.begin(), row.cells.end(), 1) != 1) throw bad("row must contain exactly one 1");
    rows.push_back(std::move(row));
  }
  if (line_no == 0) throw Error(ErrorCode::MalformedRecord, "missing CSV header");
  return rows;
}

std::vector<OneHotRow> load_predictions(const std::filesystem::path& path) {
  return parse_predictions_csv(read_file(path));
}

}  // namespace culturank
