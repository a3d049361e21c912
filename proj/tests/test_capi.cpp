#include <doctest.h>

#include <nlohmann/json.hpp>

#include "culturank/culturank.h"
#include "support.hpp"

namespace {

struct Handle {
  cr_pipeline* p = nullptr;
  ~Handle() { cr_pipeline_close(p); }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  cr_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("status helpers") {
  CHECK(cr_status_exit_code(CR_OK) == 0);
  CHECK(cr_status_exit_code(CR_ERR_MISSING_FILE) == 1);
  CHECK(cr_status_exit_code(CR_ERR_MISSING_GOLD) == 1);
  CHECK(cr_status_exit_code(CR_ERR_SCORER_UNAVAILABLE) == 2);
  CHECK(cr_status_exit_code(CR_ERR_PROVIDER_UNAVAILABLE) == 2);
  CHECK(cr_status_exit_code(CR_ERR_INTERNAL) == 3);
  CHECK(std::string(cr_status_name(CR_ERR_DUPLICATE_ID)) == "DuplicateId");
  CHECK(std::string(cr_version()).size() > 0);
}

TEST_CASE("pure helpers") {
  CHECK(cr_fuse(0.5, 0.8, 1, 0.4, 0.6, 0.3) == doctest::Approx(0.884).epsilon(1e-14));
  const double logits[4] = {1.0, 1.0, 0.0, 0.0};
  int idx = -1;
  CHECK(cr_select_answer(logits, &idx) == CR_OK);
  CHECK(idx == 0);
  const double bad[4] = {1.0, std::nan(""), 0.0, 0.0};
  CHECK(cr_select_answer(bad, &idx) == CR_ERR_NON_FINITE_LOGIT);
  CHECK(std::string(cr_last_error()).find("NonFiniteLogit") != std::string::npos);
}

TEST_CASE("open rejects bad configuration") {
  cr_pipeline* p = nullptr;
  CHECK(cr_pipeline_open("{", &p) == CR_ERR_INVALID_CONFIG);
  CHECK(p == nullptr);
  CHECK(cr_pipeline_open(R"({"ranker":{"w_bm25":-1}})", &p) == CR_ERR_INVALID_CONFIG);
  CHECK(cr_pipeline_open(R"({"typo_key":1})", &p) == CR_ERR_INVALID_CONFIG);
  CHECK(cr_pipeline_open(R"({"scorer":{"stub":false}})", &p) == CR_ERR_INVALID_CONFIG);
  CHECK(cr_pipeline_open(R"({"deterministic":false})", &p) == CR_ERR_INVALID_CONFIG);
  CHECK(cr_pipeline_open(nullptr, &p) == CR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("pipeline end to end through the C API") {
  testing::TempDir dir;
  testing::write_planted(testing::planted_fixture(20), dir);
  std::filesystem::create_directories(dir / "out");
  Handle h;
  REQUIRE(cr_pipeline_open(testing::config_json(dir).c_str(), &h.p) == CR_OK);

  cr_index_stats stats{};
  REQUIRE(cr_pipeline_index_stats(h.p, &stats) == CR_OK);
  CHECK(stats.doc_count == 26);
  CHECK(stats.vocabulary_size > 0);
  CHECK(stats.avg_doc_length > 0.0);
  CHECK(cr_pipeline_save_index(h.p, (dir / "index.json").string().c_str()) == CR_OK);
  CHECK(std::filesystem::exists(dir / "index.json"));

  char* jsonl = nullptr;
  REQUIRE(cr_pipeline_rank(h.p, "q3", &jsonl) == CR_OK);
  const auto line = take(jsonl);
  const auto bundle = nlohmann::json::parse(line);
  CHECK(bundle["question_id"] == "q3");
  CHECK(bundle["ranked"].size() == 5);
  CHECK(bundle["ranked"][0]["doc_id"] == "doc03");
  CHECK(bundle["ranked"][0]["region_hit"] == true);

  REQUIRE(cr_pipeline_rank(h.p, nullptr, &jsonl) == CR_OK);
  const auto all = take(jsonl);
  CHECK(std::count(all.begin(), all.end(), '\n') == 20);

  CHECK(cr_pipeline_rank(h.p, "nope", &jsonl) == CR_ERR_UNKNOWN_QUESTION);

  std::size_t count = 0;
  const auto csv = (dir / "out" / "predictions.csv").string();
  REQUIRE(cr_pipeline_answer(h.p, csv.c_str(), &count) == CR_OK);
  CHECK(count == 20);

  char* report = nullptr;
  const auto report_path = (dir / "out" / "report.json").string();
  REQUIRE(cr_pipeline_evaluate(h.p, csv.c_str(), report_path.c_str(), &report) == CR_OK);
  const auto rep = nlohmann::json::parse(take(report));
  CHECK(rep["accuracy"] == 1.0);
  CHECK(std::filesystem::exists(report_path));

  char* cfg = nullptr;
  REQUIRE(cr_pipeline_config_json(h.p, &cfg) == CR_OK);
  const auto effective = nlohmann::json::parse(take(cfg));
  CHECK(effective["batch_size"] == 16);
  CHECK(effective["ranker"]["top_k"] == 5);
  CHECK(effective["bm25"]["k1"] == 1.2);
}

TEST_CASE("missing inputs surface as MissingFile") {
  testing::TempDir dir;
  Handle h;
  REQUIRE(cr_pipeline_open(testing::config_json(dir).c_str(), &h.p) == CR_OK);
  cr_index_stats stats{};
  CHECK(cr_pipeline_index_stats(h.p, &stats) == CR_ERR_MISSING_FILE);
  CHECK(std::string(cr_last_error()).find("MissingFile") != std::string::npos);
}

TEST_CASE("scorer outage leaves no predictions file") {
  testing::TempDir dir;
  testing::write_planted(testing::planted_fixture(5), dir);
  auto cfg = nlohmann::json::parse(testing::config_json(dir));
  cfg["scorer"] = {{"stub", false}, {"url", "http://127.0.0.1:9"}};
  cfg["retry"] = {{"max_retries", 1}, {"initial_backoff_ms", 1}, {"timeout_ms", 500}};
  Handle h;
  REQUIRE(cr_pipeline_open(cfg.dump().c_str(), &h.p) == CR_OK);
  const auto csv = (dir / "predictions.csv").string();
  CHECK(cr_pipeline_answer(h.p, csv.c_str(), nullptr) == CR_ERR_SCORER_UNAVAILABLE);
  CHECK_FALSE(std::filesystem::exists(csv));
  CHECK_FALSE(std::filesystem::exists(csv + ".tmp"));
}
