#include "semantic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include <openssl/sha.h>

#include "error.hpp"
#include "tokenizer.hpp"

namespace culturank {
namespace {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::vector<EmbeddingVector> HashingEmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    EmbeddingVector v(kDimension, 0.0);
    for (const auto& token : tokenize(text).tokens) v[fnv1a64(token) % kDimension] += 1.0;
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& x : v) x *= inv;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string EmbeddingCache::content_key(const std::string& text) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest.data());
  std::string hex(digest.size() * 2, '0');
  static constexpr char kHex[] = "0123456789abcdef";
  for (std::size_t i = 0; i < digest.size(); ++i) {
    hex[2 * i] = kHex[digest[i] >> 4];
    hex[2 * i + 1] = kHex[digest[i] & 0xF];
  }
  return hex;
}

bool EmbeddingCache::lookup(const std::string& text, EmbeddingVector& out) const {
  const auto key = content_key(text);
  std::unique_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    ++misses_;
    return false;
  }
  ++hits_;
  out = it->second;
  return true;
}

void EmbeddingCache::store(const std::string& text, const EmbeddingVector& v) {
  const auto key = content_key(text);
  std::unique_lock lock(mu_);
  // First writer wins; providers are deterministic so later values are equal.
  entries_.try_emplace(key, v);
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::size_t EmbeddingCache::hits() const {
  std::shared_lock lock(mu_);
  return hits_;
}

std::size_t EmbeddingCache::misses() const {
  std::shared_lock lock(mu_);
  return misses_;
}

std::vector<EmbeddingVector> embed_cached(EmbeddingProvider& provider, EmbeddingCache& cache,
                                          std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::string> pending;
  std::vector<std::size_t> pending_slots;
  std::unordered_map<std::string, std::size_t> queued;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (cache.lookup(texts[i], out[i])) continue;
    pending_slots.push_back(i);
    if (queued.try_emplace(texts[i], pending.size()).second) pending.push_back(texts[i]);
  }
  if (pending.empty()) return out;

  const auto fresh = provider.embed_batch(pending);
  if (fresh.size() != pending.size()) {
    throw Error(ErrorCode::DimensionMismatch, provider.name() + " returned " + std::to_string(fresh.size()) +
                                                  " vectors for " + std::to_string(pending.size()) + " texts");
  }
  const auto dim = provider.dimension();
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    if (fresh[i].size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, provider.name() + " returned width " +
                                                    std::to_string(fresh[i].size()) + ", declared " +
                                                    std::to_string(dim));
    }
    if (!std::all_of(fresh[i].begin(), fresh[i].end(), [](double x) { return std::isfinite(x); })) {
      throw Error(ErrorCode::OutOfRange, provider.name() + " returned a non-finite component");
    }
  }
  for (std::size_t i = 0; i < fresh.size(); ++i) cache.store(pending[i], fresh[i]);
  for (auto slot : pending_slots) out[slot] = fresh[queued.at(texts[slot])];
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cosine of widths " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

double semantic_norm(double c) {
  if (!(c >= -1.0 && c <= 1.0)) throw Error(ErrorCode::OutOfRange, "cosine outside [-1, 1]");
  return (c + 1.0) / 2.0;
}

bool is_zero_vector(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace culturank
