// culturank: command-line front end over the C API.
//
//   culturank index    [--snapshot FILE]
//   culturank rank     [--question-id ID]
//   culturank answer
//   culturank evaluate [--predictions FILE]
//
// Settings come from a JSON file (--config, else $CULTURANK_CONFIG); flags win.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "culturank/culturank.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kInputError = 1;

struct Overrides {
  std::string config;
  std::optional<std::string> documents, questions, gazetteer, prompt_template, output_dir;
  std::optional<std::string> embedding_url, scorer_url;
  std::optional<std::size_t> batch_size, top_k, max_in_flight;
  bool stub_embeddings = false;
  bool stub_scorer = false;
};

struct PipelineHandle {
  cr_pipeline* p = nullptr;
  ~PipelineHandle() { cr_pipeline_close(p); }
};

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { cr_string_free(s); }
};

int report(cr_status status) {
  std::cerr << "error: " << cr_last_error() << '\n';
  return cr_status_exit_code(status);
}

std::optional<json> effective_config(const Overrides& o) {
  std::string path = o.config;
  if (path.empty()) {
    if (const char* env = std::getenv("CULTURANK_CONFIG"); env && *env) path = env;
  }
  json cfg = json::object();
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "error: MissingFile: config " << path << '\n';
      return std::nullopt;
    }
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      std::cerr << "error: InvalidConfig: " << path << ": " << e.what() << '\n';
      return std::nullopt;
    }
    if (!cfg.is_object()) {
      std::cerr << "error: InvalidConfig: " << path << " must hold a JSON object\n";
      return std::nullopt;
    }
  }
  if (o.documents) cfg["documents"] = *o.documents;
  if (o.questions) cfg["questions"] = *o.questions;
  if (o.gazetteer) cfg["gazetteer"] = *o.gazetteer;
  if (o.prompt_template) cfg["template"] = *o.prompt_template;
  if (o.output_dir) cfg["output_dir"] = *o.output_dir;
  if (o.batch_size) cfg["batch_size"] = *o.batch_size;
  if (o.max_in_flight) cfg["max_in_flight"] = *o.max_in_flight;
  if (o.top_k) cfg["ranker"]["top_k"] = *o.top_k;
  if (o.embedding_url) cfg["embedding"]["stub"] = false, cfg["embedding"]["url"] = *o.embedding_url;
  if (o.scorer_url) cfg["scorer"]["stub"] = false, cfg["scorer"]["url"] = *o.scorer_url;
  if (o.stub_embeddings) cfg["embedding"]["stub"] = true;
  if (o.stub_scorer) cfg["scorer"]["stub"] = true;
  return cfg;
}

fs::path output_dir_of(const json& cfg) {
  if (auto it = cfg.find("output_dir"); it != cfg.end() && it->is_string()) return it->get<std::string>();
  return ".";
}

int open_pipeline(const Overrides& o, PipelineHandle& h, json& cfg_out) {
  auto cfg = effective_config(o);
  if (!cfg) return kInputError;
  cfg_out = *cfg;
  if (auto st = cr_pipeline_open(cfg->dump().c_str(), &h.p); st != CR_OK) return report(st);
  return 0;
}

int cmd_index(const Overrides& o, const std::string& snapshot) {
  PipelineHandle h;
  json cfg;
  if (int rc = open_pipeline(o, h, cfg)) return rc;
  cr_index_stats stats{};
  if (auto st = cr_pipeline_index_stats(h.p, &stats); st != CR_OK) return report(st);
  if (!snapshot.empty()) {
    if (auto st = cr_pipeline_save_index(h.p, snapshot.c_str()); st != CR_OK) return report(st);
  }
  std::cout << "N=" << stats.doc_count << '\n'
            << "vocabulary=" << stats.vocabulary_size << '\n'
            << "avg_doc_length=" << stats.avg_doc_length << '\n';
  return 0;
}

int cmd_rank(const Overrides& o, const std::string& question_id) {
  PipelineHandle h;
  json cfg;
  if (int rc = open_pipeline(o, h, cfg)) return rc;
  OwnedString out;
  const char* qid = question_id.empty() ? nullptr : question_id.c_str();
  if (auto st = cr_pipeline_rank(h.p, qid, &out.s); st != CR_OK) return report(st);
  std::cout << out.s;
  return 0;
}

bool ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: IoError: cannot create " << dir << ": " << ec.message() << '\n';
    return false;
  }
  return true;
}

int cmd_answer(const Overrides& o) {
  PipelineHandle h;
  json cfg;
  if (int rc = open_pipeline(o, h, cfg)) return rc;
  const auto dir = output_dir_of(cfg);
  if (!ensure_dir(dir)) return kInputError;

  const auto csv = (dir / "predictions.csv").string();
  std::size_t count = 0;
  if (auto st = cr_pipeline_answer(h.p, csv.c_str(), &count); st != CR_OK) return report(st);

  OwnedString effective;
  if (auto st = cr_pipeline_config_json(h.p, &effective.s); st != CR_OK) return report(st);
  std::ofstream(dir / "effective_config.json", std::ios::binary) << effective.s;

  std::cout << "answered " << count << " questions -> " << csv << '\n';
  return 0;
}

int cmd_evaluate(const Overrides& o, const std::string& predictions) {
  PipelineHandle h;
  json cfg;
  if (int rc = open_pipeline(o, h, cfg)) return rc;
  const auto dir = output_dir_of(cfg);
  if (!ensure_dir(dir)) return kInputError;

  const auto preds = predictions.empty() ? (dir / "predictions.csv").string() : predictions;
  const auto report_path = (dir / "report.json").string();
  OwnedString out;
  if (auto st = cr_pipeline_evaluate(h.p, preds.c_str(), report_path.c_str(), &out.s); st != CR_OK) {
    return report(st);
  }
  const auto rep = json::parse(out.s);
  std::cout << "accuracy=" << rep["accuracy"].get<double>() << " (" << rep["correct"] << "/" << rep["total"] << ")\n";
  for (const auto& [lang, s] : rep["per_language"].items()) {
    std::cout << "  " << lang << ": " << s["accuracy"].get<double>() << " (" << s["correct"] << "/" << s["total"]
              << ")\n";
  }
  std::cout << "macro_avg=" << rep["macro_avg"].get<double>() << '\n' << "report -> " << report_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Region-aware hybrid evidence ranking and multiple-choice answering"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(cr_version()));

  Overrides o;
  app.add_option("--config", o.config, "JSON configuration file (default: $CULTURANK_CONFIG)");
  app.add_option("--documents", o.documents, "Evidence documents (JSON lines)");
  app.add_option("--questions", o.questions, "Questions (JSON lines)");
  app.add_option("--gazetteer", o.gazetteer, "Region aliases (JSON lines)");
  app.add_option("--template", o.prompt_template, "Prompt template file");
  app.add_option("--output-dir", o.output_dir, "Directory for predictions.csv and report.json");
  app.add_option("--batch-size", o.batch_size, "Questions per scoring batch")->check(CLI::PositiveNumber);
  app.add_option("--max-in-flight", o.max_in_flight, "Batches processed concurrently")->check(CLI::PositiveNumber);
  app.add_option("--top-k", o.top_k, "Evidence chunks per question")->check(CLI::PositiveNumber);
  app.add_option("--embedding-url", o.embedding_url, "Embedding backend base URL");
  app.add_option("--scorer-url", o.scorer_url, "Choice-scoring backend base URL");
  app.add_flag("--stub-embeddings", o.stub_embeddings, "Use the offline hashing embedder");
  app.add_flag("--stub-scorer", o.stub_scorer, "Use the offline token-overlap scorer");

  std::string snapshot, question_id, predictions;
  auto* index = app.add_subcommand("index", "Build the BM25 index and print statistics");
  index->add_option("--snapshot", snapshot, "Write an index snapshot (JSON)");
  auto* rank = app.add_subcommand("rank", "Print ranked evidence bundles as JSON lines");
  rank->add_option("--question-id", question_id, "Only rank this question");
  auto* answer = app.add_subcommand("answer", "Answer every question and write predictions.csv");
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold answers");
  evaluate->add_option("--predictions", predictions, "Predictions CSV (default: <output-dir>/predictions.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  if (index->parsed()) return cmd_index(o, snapshot);
  if (rank->parsed()) return cmd_rank(o, question_id);
  if (answer->parsed()) return cmd_answer(o);
  return cmd_evaluate(o, predictions);
}
