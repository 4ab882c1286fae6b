#include "fewl/similarity/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "fewl/core/error.hpp"
#include "fewl/util/rng.hpp"

namespace fewl {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::DimensionMismatch, "embedding", "embedding must have dim >= 1");
  double ss = 0;
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "embedding", "embedding has a non-finite entry");
    ss += v * v;
  }
  norm_ = std::sqrt(ss);
  if (!(norm_ > 0)) throw Error(ErrorCode::InvalidArgument, "embedding", "zero embedding vector");
}

double cosine(std::span<const double> a, double norm_a, std::span<const double> b, double norm_b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "cosine",
                "dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  // Multiplication commutes exactly in IEEE arithmetic, so argument order
  // does not change the result.
  return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine(a.values(), a.norm(), b.values(), b.norm());
}

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return util::SplitMix64(h).next();
}

}  // namespace

EmbeddingVector mock_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw Error(ErrorCode::EmptyText, "mock_embed", "cannot embed empty text");
  }
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "mock_embed", "mock embedding dim must be >= 2");

  std::string padded = " ";
  for (unsigned char c : text) padded.push_back(static_cast<char>(std::tolower(c)));
  padded.push_back(' ');

  std::vector<double> v(dim, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const std::uint64_t h = fnv1a(std::string_view(padded).substr(i, 3), seed);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[(h & 0x7fffffffffffffffULL) % dim] += sign;
  }
  double ss = 0;
  for (double x : v) ss += x * x;
  if (ss == 0) {
    // Every 3-gram cancelled out; fall back to one bucket from the full text.
    v[fnv1a(padded, seed) % dim] = 1.0;
    ss = 1.0;
  }
  const double inv = 1.0 / std::sqrt(ss);
  for (double& x : v) x *= inv;
  return EmbeddingVector(std::move(v));
}

}  // namespace fewl
