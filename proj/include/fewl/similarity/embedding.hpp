#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fewl {

// Dense embedding with its Euclidean norm cached. Zero vectors are rejected.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double norm() const { return norm_; }
  bool empty() const { return values_.empty(); }

  friend bool operator==(const EmbeddingVector& a, const EmbeddingVector& b) { return a.values_ == b.values_; }

 private:
  std::vector<double> values_;
  double norm_ = 0;
};

// <a,b> / (|a| |b|), clamped to [-1, 1]. Symmetric bit-for-bit.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);
double cosine(std::span<const double> a, double norm_a, std::span<const double> b, double norm_b);

// Hermetic embedder: signed feature hashing of lowercased character 3-grams,
// L2-normalised. Equal texts give equal vectors; texts sharing many 3-grams
// land close together.
EmbeddingVector mock_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

}  // namespace fewl
