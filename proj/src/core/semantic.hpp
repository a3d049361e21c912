#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace culturank {

using EmbeddingVector = std::vector<double>;

/// A source of dense text embeddings. Implementations must be deterministic
/// and return one vector of `dimension()` components per input, order-aligned.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

/// Offline provider: tokens are hashed (FNV-1a 64) into 64 buckets, counted,
/// and the count vector is L2-normalized. Texts without tokens map to the
/// zero vector.
class HashingEmbeddingProvider final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDimension = 64;

  std::string name() const override { return "hashing-bow-64"; }
  std::size_t dimension() const override { return kDimension; }
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::milliseconds timeout{30000};
};

/// Client for `POST /embed` with body {"texts": [...]} answering
/// {"dimension": n, "vectors": [[...], ...]}. Transport failures, non-200
/// replies and malformed bodies are retried, then reported as
/// ProviderUnavailable.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  /// `dimension` is the declared width; 0 adopts the width of the first reply.
  explicit HttpEmbeddingProvider(std::string base_url, std::size_t dimension = 0, RetryPolicy retry = {});

  std::string name() const override { return "http:" + base_url_; }
  std::size_t dimension() const override;
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

 private:
  std::string base_url_;
  RetryPolicy retry_;
  mutable std::mutex mu_;
  std::size_t dimension_;
};

/// Thread-safe content-addressed store keyed by SHA-256 of the exact text bytes.
class EmbeddingCache {
 public:
  bool lookup(const std::string& text, EmbeddingVector& out) const;
  void store(const std::string& text, const EmbeddingVector& v);
  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

  static std::string content_key(const std::string& text);

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

/// Resolves `texts` through `cache`, sending only distinct misses to the
/// provider in one batch. Throws DimensionMismatch when the provider returns
/// a vector of the wrong width or the wrong number of vectors, and
/// OutOfRange on non-finite components.
std::vector<EmbeddingVector> embed_cached(EmbeddingProvider& provider, EmbeddingCache& cache,
                                          std::span<const std::string> texts);

/// Cosine similarity clamped to [-1, 1]. Throws DimensionMismatch or ZeroVector.
double cosine(std::span<const double> u, std::span<const double> v);

/// Maps cosine from [-1, 1] onto [0, 1]. Throws OutOfRange.
double semantic_norm(double c);

bool is_zero_vector(std::span<const double> v) noexcept;

}  // namespace culturank
