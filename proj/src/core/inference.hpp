#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "prompting.hpp"
#include "ranker.hpp"
#include "semantic.hpp"

namespace culturank {

using LetterLogits = std::array<double, kChoiceCount>;

struct ChoiceLogits {
  std::string question_id;
  LetterLogits logits{};
};

struct Prediction {
  std::string question_id;
  int chosen_index = 0;
  LetterLogits logits{};

  bool operator==(const Prediction&) const = default;
};

/// Maps a batch of prompts to one logit per letter A-D, aligned with the input.
/// score() may be called from several threads when max_in_flight > 1.
class ChoiceScorer {
 public:
  virtual ~ChoiceScorer() = default;
  virtual std::string name() const = 0;
  virtual std::vector<ChoiceLogits> score(std::span<const Prompt> prompts) = 0;
};

/// Offline scorer: the logit of letter L is the number of distinct tokens of
/// choice L that also occur somewhere in the prompt's evidence.
class OverlapStubScorer final : public ChoiceScorer {
 public:
  std::string name() const override { return "overlap-stub"; }
  std::vector<ChoiceLogits> score(std::span<const Prompt> prompts) override;
};

/// Client for `POST /score_choices` with {"prompts": [...]} answering
/// {"logits": [[a,b,c,d], ...]}. The backend reports one logit per letter,
/// taking the maximum over the letter's surface forms (e.g. "A" and " A").
class HttpChoiceScorer final : public ChoiceScorer {
 public:
  explicit HttpChoiceScorer(std::string base_url, RetryPolicy retry = {});

  std::string name() const override { return "http:" + base_url_; }
  std::vector<ChoiceLogits> score(std::span<const Prompt> prompts) override;

 private:
  std::string base_url_;
  RetryPolicy retry_;
};

/// Argmax over the four logits, ties toward the smallest index.
/// Throws NonFiniteLogit.
Prediction select_answer(const ChoiceLogits& cl);

struct BatchOptions {
  std::size_t batch_size = 16;
  /// Upper bound on batches being ranked and scored at once.
  std::size_t max_in_flight = 1;
  /// Observes every prompt in input order after the run succeeds.
  std::function<void(const Prompt&)> on_prompt;
};

/// Ranks, prompts and scores `questions` in consecutive batches and returns
/// predictions in input order. Either every question is answered or an
/// exception is thrown; a failing backend surfaces as ScorerUnavailable naming
/// the batch's question ids.
std::vector<Prediction> run_batched(const QuestionSet& questions, const EvidenceRanker& ranker,
                                    const PromptTemplate& tmpl, ChoiceScorer& scorer,
                                    const BatchOptions& options = {});

/// Start offsets of consecutive batches covering `count` items.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t count, std::size_t batch_size);

}  // namespace culturank
