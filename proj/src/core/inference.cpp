#include "inference.hpp"

#include <cmath>
#include <future>
#include <set>

#include "error.hpp"
#include "tokenizer.hpp"

namespace culturank {

std::vector<ChoiceLogits> OverlapStubScorer::score(std::span<const Prompt> prompts) {
  std::vector<ChoiceLogits> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) {
    std::set<std::string> evidence_tokens;
    for (const auto& e : p.evidence) {
      for (auto& t : tokenize(e).tokens) evidence_tokens.insert(std::move(t));
    }
    ChoiceLogits cl;
    cl.question_id = p.question_id;
    for (std::size_t i = 0; i < kChoiceCount; ++i) {
      const auto toks = tokenize(p.choices[i]).tokens;
      const std::set<std::string> distinct(toks.begin(), toks.end());
      double overlap = 0.0;
      for (const auto& t : distinct) overlap += evidence_tokens.contains(t) ? 1.0 : 0.0;
      cl.logits[i] = overlap;
    }
    out.push_back(std::move(cl));
  }
  return out;
}

Prediction select_answer(const ChoiceLogits& cl) {
  for (double x : cl.logits) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteLogit, cl.question_id);
  }
  Prediction p;
  p.question_id = cl.question_id;
  p.logits = cl.logits;
  p.chosen_index = 0;
  for (std::size_t i = 1; i < kChoiceCount; ++i) {
    if (cl.logits[i] > cl.logits[static_cast<std::size_t>(p.chosen_index)]) p.chosen_index = static_cast<int>(i);
  }
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t count, std::size_t batch_size) {
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t begin = 0; begin < count; begin += batch_size) {
    ranges.emplace_back(begin, std::min(count, begin + batch_size));
  }
  return ranges;
}

namespace {

struct BatchResult {
  std::vector<Prompt> prompts;
  std::vector<Prediction> predictions;
};

std::string batch_ids(const QuestionSet& questions, std::size_t begin, std::size_t end) {
  std::string ids;
  for (auto i = begin; i < end; ++i) {
    if (i > begin) ids += ',';
    ids += questions[i].question_id;
  }
  return ids;
}

BatchResult run_one_batch(const QuestionSet& questions, std::size_t begin, std::size_t end,
                          const EvidenceRanker& ranker, const PromptTemplate& tmpl, ChoiceScorer& scorer) {
  BatchResult r;
  r.prompts.reserve(end - begin);
  for (auto i = begin; i < end; ++i) r.prompts.push_back(build_prompt(questions[i], ranker.rank(questions[i]), tmpl));

  std::vector<ChoiceLogits> logits;
  try {
    logits = scorer.score(r.prompts);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ScorerUnavailable) {
      throw Error(ErrorCode::ScorerUnavailable,
                  "batch [" + batch_ids(questions, begin, end) + "] failed: " + e.what());
    }
    throw;
  }
  if (logits.size() != r.prompts.size()) {
    throw Error(ErrorCode::ScorerUnavailable, "batch [" + batch_ids(questions, begin, end) + "]: " +
                                                  std::to_string(logits.size()) + " results for " +
                                                  std::to_string(r.prompts.size()) + " prompts");
  }
  r.predictions.reserve(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    // Alignment is positional; the id always comes from the question.
    logits[j].question_id = r.prompts[j].question_id;
    r.predictions.push_back(select_answer(logits[j]));
  }
  return r;
}

}  // namespace

std::vector<Prediction> run_batched(const QuestionSet& questions, const EvidenceRanker& ranker,
                                    const PromptTemplate& tmpl, ChoiceScorer& scorer, const BatchOptions& options) {
  const auto ranges = batch_ranges(questions.size(), options.batch_size);
  const auto in_flight = std::max<std::size_t>(1, options.max_in_flight);

  std::vector<BatchResult> results(ranges.size());
  for (std::size_t wave = 0; wave < ranges.size(); wave += in_flight) {
    const auto wave_end = std::min(ranges.size(), wave + in_flight);
    if (wave_end - wave == 1) {
      results[wave] = run_one_batch(questions, ranges[wave].first, ranges[wave].second, ranker, tmpl, scorer);
      continue;
    }
    std::vector<std::future<BatchResult>> futures;
    for (auto b = wave; b < wave_end; ++b) {
      futures.push_back(std::async(std::launch::async, run_one_batch, std::cref(questions), ranges[b].first,
                                   ranges[b].second, std::cref(ranker), std::cref(tmpl), std::ref(scorer)));
    }
    // Drain every future before rethrowing so no task outlives this frame.
    std::exception_ptr first_error;
    for (std::size_t k = 0; k < futures.size(); ++k) {
      try {
        results[wave + k] = futures[k].get();
      } catch (...) {
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<Prediction> predictions;
  predictions.reserve(questions.size());
  for (auto& r : results) {
    if (options.on_prompt) {
      for (const auto& p : r.prompts) options.on_prompt(p);
    }
    for (auto& p : r.predictions) predictions.push_back(std::move(p));
  }
  return predictions;
}

}  // namespace culturank
