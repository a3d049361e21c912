#include <cmath>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "inference.hpp"
#include "semantic.hpp"

namespace culturank {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  Endpoint e;
  e.origin = url.substr(0, path_begin);
  if (path_begin != std::string::npos) {
    e.prefix = url.substr(path_begin);
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  }
  return e;
}

// POSTs `body` and returns the parsed reply of the first attempt that yields
// HTTP 200 and passes `validate`. Throws `failure` once retries are exhausted.
template <typename Validate>
nlohmann::json post_with_retry(const std::string& base_url, const std::string& route, const nlohmann::json& body,
                               const RetryPolicy& retry, ErrorCode failure, Validate&& validate) {
  const auto ep = split_url(base_url);
  const auto payload = body.dump();
  auto backoff = retry.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= retry.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(ep.origin);
    const auto secs = retry.timeout.count() / 1000;
    const auto usecs = (retry.timeout.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    auto res = client.Post(ep.prefix + route, payload, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      auto reply = nlohmann::json::parse(res->body);
      std::string why = validate(reply);
      if (why.empty()) return reply;
      last_error = "malformed reply: " + why;
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed reply: ") + e.what();
    }
  }
  throw Error(failure, base_url + route + " after " + std::to_string(retry.max_retries + 1) +
                           " attempts: " + last_error);
}

bool is_number_array(const nlohmann::json& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v) {
    if (!x.is_number()) return false;
  }
  return true;
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::size_t dimension, RetryPolicy retry)
    : base_url_(std::move(base_url)), retry_(retry), dimension_(dimension) {}

std::size_t HttpEmbeddingProvider::dimension() const {
  std::lock_guard lock(mu_);
  return dimension_;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  nlohmann::json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto n = texts.size();
  const auto reply = post_with_retry(
      base_url_, "/embed", body, retry_, ErrorCode::ProviderUnavailable, [n](const nlohmann::json& r) -> std::string {
        if (!r.is_object() || !r.contains("dimension") || !r["dimension"].is_number_integer()) return "no dimension";
        if (!r.contains("vectors") || !r["vectors"].is_array()) return "no vectors";
        if (r["vectors"].size() != n) return "vector count differs from text count";
        for (const auto& v : r["vectors"]) {
          if (!is_number_array(v)) return "vector is not a number array";
        }
        return {};
      });

  const auto reported = reply["dimension"].get<long long>();
  if (reported <= 0) throw Error(ErrorCode::ProviderUnavailable, "non-positive dimension");
  {
    std::lock_guard lock(mu_);
    if (dimension_ == 0) dimension_ = static_cast<std::size_t>(reported);
    if (static_cast<std::size_t>(reported) != dimension_) {
      throw Error(ErrorCode::DimensionMismatch, "backend reports " + std::to_string(reported) + ", declared " +
                                                    std::to_string(dimension_));
    }
  }
  std::vector<EmbeddingVector> out;
  out.reserve(n);
  for (const auto& v : reply["vectors"]) out.push_back(v.get<EmbeddingVector>());
  return out;
}

HttpChoiceScorer::HttpChoiceScorer(std::string base_url, RetryPolicy retry)
    : base_url_(std::move(base_url)), retry_(retry) {}

std::vector<ChoiceLogits> HttpChoiceScorer::score(std::span<const Prompt> prompts) {
  if (prompts.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(prompts.size());
  for (const auto& p : prompts) texts.push_back(p.text);
  const auto n = prompts.size();
  const auto reply = post_with_retry(
      base_url_, "/score_choices", nlohmann::json{{"prompts", texts}}, retry_, ErrorCode::ScorerUnavailable,
      [n](const nlohmann::json& r) -> std::string {
        if (!r.is_object() || !r.contains("logits") || !r["logits"].is_array()) return "no logits";
        if (r["logits"].size() != n) return "logit rows misaligned with prompts";
        for (const auto& row : r["logits"]) {
          if (!is_number_array(row) || row.size() != kChoiceCount) return "logit row must hold 4 numbers";
        }
        return {};
      });

  std::vector<ChoiceLogits> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].question_id = prompts[i].question_id;
    for (std::size_t j = 0; j < kChoiceCount; ++j) out[i].logits[j] = reply["logits"][i][j].get<double>();
  }
  return out;
}

}  // namespace culturank
