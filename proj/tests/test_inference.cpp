#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "http_fixture.hpp"
#include "inference.hpp"
#include "support.hpp"

using namespace culturank;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected culturank::Error");
  return ErrorCode::Internal;
}

const RetryPolicy kFastRetry{3, std::chrono::milliseconds(1), std::chrono::milliseconds(2000)};

struct Fixture {
  testing::Planted planted;
  RegionGazetteer gaz;
  Bm25Index index;
  HashingEmbeddingProvider provider;
  EmbeddingCache cache;
  std::unique_ptr<EvidenceRanker> ranker;
  PromptTemplate tmpl = PromptTemplate::default_template();

  explicit Fixture(std::size_t n, bool empty_corpus = false) : planted(testing::planted_fixture(n)) {
    if (empty_corpus) planted.docs.clear();
    gaz = parse_gazetteer(planted.gazetteer_jsonl);
    index = Bm25Index::build(planted.docs);
    ranker = std::make_unique<EvidenceRanker>(planted.docs, index, provider, cache, gaz, RankerConfig{});
  }
};

class RecordingScorer : public ChoiceScorer {
 public:
  std::string name() const override { return "recording"; }
  std::vector<ChoiceLogits> score(std::span<const Prompt> prompts) override {
    std::lock_guard lock(mu);
    batch_sizes.push_back(prompts.size());
    return inner.score(prompts);
  }
  std::mutex mu;
  std::vector<std::size_t> batch_sizes;
  OverlapStubScorer inner;
};

class BrokenScorer : public ChoiceScorer {
 public:
  explicit BrokenScorer(int fail_on_call, bool misalign = false) : fail_on_(fail_on_call), misalign_(misalign) {}
  std::string name() const override { return "broken"; }
  std::vector<ChoiceLogits> score(std::span<const Prompt> prompts) override {
    if (++calls_ == fail_on_) {
      if (misalign_) return std::vector<ChoiceLogits>(prompts.size() + 1);
      throw Error(ErrorCode::ScorerUnavailable, "simulated outage");
    }
    return OverlapStubScorer().score(prompts);
  }

 private:
  std::atomic<int> calls_{0};
  int fail_on_;
  bool misalign_;
};

}  // namespace

TEST_CASE("select_answer examples") {
  CHECK(select_answer({"q", {0.1, 2.3, -1.0, 0.0}}).chosen_index == 1);
  CHECK(select_answer({"q", {1.0, 1.0, 0.0, 0.0}}).chosen_index == 0);
  CHECK(select_answer({"q", {0.0, 0.0, 5.0, 5.0}}).chosen_index == 2);
  CHECK(select_answer({"q", {-3.0, -2.0, -1.0, -0.5}}).chosen_index == 3);
  const auto p = select_answer({"qx", {1, 2, 3, 4}});
  CHECK(p.question_id == "qx");
  CHECK(p.logits == LetterLogits{1, 2, 3, 4});
  CHECK(code_of([] { select_answer({"q", {0.0, std::nan(""), 0.0, 0.0}}); }) == ErrorCode::NonFiniteLogit);
  CHECK(code_of([] { select_answer({"q", {0.0, std::numeric_limits<double>::infinity(), 0.0, 0.0}}); }) ==
        ErrorCode::NonFiniteLogit);
}

TEST_CASE("select_answer is invariant under positive affine maps") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_real_distribution<double> wide(-50.0, 50.0), scale(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    ChoiceLogits cl{"q", {}};
    // Integer-valued logits make ties common.
    for (auto& x : cl.logits) x = small(rng);
    const auto base = select_answer(cl);
    const double max = *std::max_element(cl.logits.begin(), cl.logits.end());
    const auto first = std::find(cl.logits.begin(), cl.logits.end(), max) - cl.logits.begin();
    CHECK(base.chosen_index == first);

    const double a = std::ldexp(1.0, small(rng)), c = small(rng);
    ChoiceLogits shifted = cl;
    for (auto& x : shifted.logits) x = a * x + c;
    CHECK(select_answer(shifted).chosen_index == base.chosen_index);

    ChoiceLogits real{"q", {wide(rng), wide(rng), wide(rng), wide(rng)}};
    ChoiceLogits mapped = real;
    const double ra = scale(rng), rc = wide(rng);
    for (auto& x : mapped.logits) x = ra * x + rc;
    CHECK(select_answer(mapped).chosen_index == select_answer(real).chosen_index);
  }
}

TEST_CASE("overlap stub scorer counts shared choice tokens") {
  Prompt p;
  p.question_id = "q";
  p.choices = {"jollof rice", "pasta", "Rice and beans", "sushi"};
  p.evidence = {"In Ghana, jollof rice is served", "beans are common"};
  const auto out = OverlapStubScorer().score(std::span<const Prompt>(&p, 1));
  REQUIRE(out.size() == 1);
  CHECK(out[0].logits == LetterLogits{2, 0, 2, 0});
  p.evidence.clear();
  CHECK(OverlapStubScorer().score(std::span<const Prompt>(&p, 1))[0].logits == LetterLogits{0, 0, 0, 0});
}

TEST_CASE("batch arithmetic") {
  const auto r = batch_ranges(35, 16);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == std::pair<std::size_t, std::size_t>{0, 16});
  CHECK(r[1] == std::pair<std::size_t, std::size_t>{16, 32});
  CHECK(r[2] == std::pair<std::size_t, std::size_t>{32, 35});
  CHECK(batch_ranges(0, 16).empty());
  CHECK_THROWS_AS(batch_ranges(3, 0), Error);
}

TEST_CASE("run_batched sends consecutive batches and keeps input order") {
  Fixture f(35);
  RecordingScorer scorer;
  BatchOptions opts;
  opts.batch_size = 16;
  const auto preds = run_batched(f.planted.questions, *f.ranker, f.tmpl, scorer, opts);
  CHECK(scorer.batch_sizes == std::vector<std::size_t>{16, 16, 3});
  REQUIRE(preds.size() == 35);
  for (std::size_t i = 0; i < preds.size(); ++i) CHECK(preds[i].question_id == f.planted.questions[i].question_id);
}

TEST_CASE("predictions do not depend on batch size or concurrency") {
  Fixture f(35);
  OverlapStubScorer scorer;
  BatchOptions one;
  one.batch_size = 1;
  const auto reference = run_batched(f.planted.questions, *f.ranker, f.tmpl, scorer, one);
  for (std::size_t bs : {2u, 4u, 7u, 16u, 35u, 100u}) {
    for (std::size_t in_flight : {1u, 3u}) {
      BatchOptions o;
      o.batch_size = bs;
      o.max_in_flight = in_flight;
      CHECK(run_batched(f.planted.questions, *f.ranker, f.tmpl, scorer, o) == reference);
    }
  }
}

TEST_CASE("planted answers are found by the stub pipeline") {
  Fixture f(20);
  OverlapStubScorer scorer;
  const auto preds = run_batched(f.planted.questions, *f.ranker, f.tmpl, scorer);
  for (std::size_t i = 0; i < preds.size(); ++i) CHECK(preds[i].chosen_index == f.planted.questions[i].gold_index);
}

TEST_CASE("zero questions produce no predictions") {
  Fixture f(3);
  OverlapStubScorer scorer;
  CHECK(run_batched({}, *f.ranker, f.tmpl, scorer).empty());
}

TEST_CASE("a failing batch aborts the whole run and names its questions") {
  Fixture f(10);
  BrokenScorer scorer(2);
  BatchOptions o;
  o.batch_size = 4;
  try {
    run_batched(f.planted.questions, *f.ranker, f.tmpl, scorer, o);
    FAIL("expected ScorerUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ScorerUnavailable);
    const std::string msg = e.what();
    CHECK(msg.find("q4,q5,q6,q7") != std::string::npos);
  }
  BrokenScorer misaligned(1, true);
  CHECK(code_of([&] { run_batched(f.planted.questions, *f.ranker, f.tmpl, misaligned, o); }) ==
        ErrorCode::ScorerUnavailable);

  BrokenScorer concurrent(3);
  o.max_in_flight = 3;
  CHECK(code_of([&] { run_batched(f.planted.questions, *f.ranker, f.tmpl, concurrent, o); }) ==
        ErrorCode::ScorerUnavailable);
}

TEST_CASE("HTTP scorer speaks the wire contract") {
  testing::LocalServer server("/score_choices", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json logits = nlohmann::json::array();
    for (const auto& p : body.at("prompts")) {
      const auto s = p.get<std::string>();
      // Prefer the letter whose choice line mentions "yam".
      logits.push_back({0.0, 0.5, s.find("C. yam") != std::string::npos ? 2.0 : -1.0, 0.25});
    }
    res.set_content(nlohmann::json{{"logits", logits}}.dump(), "application/json");
  });
  Fixture f(4);
  HttpChoiceScorer scorer(server.url(), kFastRetry);
  std::vector<Prompt> prompts(2);
  prompts[0].question_id = "a";
  prompts[0].text = "A. rice\nB. bread\nC. yam\nD. pasta";
  prompts[1].question_id = "b";
  prompts[1].text = "nothing";
  const auto out = scorer.score(prompts);
  REQUIRE(out.size() == 2);
  CHECK(out[0].question_id == "a");
  CHECK(select_answer(out[0]).chosen_index == 2);
  CHECK(select_answer(out[1]).chosen_index == 1);

  const auto preds = run_batched(f.planted.questions, *f.ranker, f.tmpl, scorer);
  CHECK(preds.size() == 4);
}

TEST_CASE("HTTP scorer failures become ScorerUnavailable after three retries") {
  testing::LocalServer down("/score_choices", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  HttpChoiceScorer scorer(down.url(), kFastRetry);
  std::vector<Prompt> prompts(1);
  CHECK(code_of([&] { scorer.score(prompts); }) == ErrorCode::ScorerUnavailable);
  CHECK(down.requests() == 4);

  testing::LocalServer misaligned("/score_choices", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"logits":[[1,2,3,4],[1,2,3,4]]})", "application/json");
  });
  HttpChoiceScorer m(misaligned.url(), kFastRetry);
  CHECK(code_of([&] { m.score(prompts); }) == ErrorCode::ScorerUnavailable);

  testing::LocalServer three("/score_choices", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"logits":[[1,2,3]]})", "application/json");
  });
  HttpChoiceScorer t(three.url(), kFastRetry);
  CHECK(code_of([&] { t.score(prompts); }) == ErrorCode::ScorerUnavailable);

  HttpChoiceScorer dead(testing::dead_url(), kFastRetry);
  CHECK(code_of([&] { dead.score(prompts); }) == ErrorCode::ScorerUnavailable);
}
