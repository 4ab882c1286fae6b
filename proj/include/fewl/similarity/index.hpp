#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fewl/similarity/embedding.hpp"

namespace fewl {

struct Neighbor {
  std::string question_id;
  double similarity = 0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct SimilarityBounds {
  double lo = -1.0;
  double hi = 1.0;
  bool hi_inclusive = false;  // [lo, hi) for KNN queries, [lo, hi] for random pools

  bool contains(double s) const { return s >= lo && (hi_inclusive ? s <= hi : s < hi); }
};

// Sorted by similarity descending, ties by question_id ascending.
struct NeighborSet {
  std::string query_id;
  SimilarityBounds bounds;
  std::vector<Neighbor> entries;
};

// Immutable exact index over question embeddings; queries are read-only and
// may run concurrently.
class QuestionIndex {
 public:
  QuestionIndex() = default;

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  bool contains(const std::string& id) const { return slot_.count(id) != 0; }
  std::size_t slot(const std::string& id) const;  // throws UnknownQuery
  const std::string& id(std::size_t slot) const { return ids_[slot]; }
  const EmbeddingVector& vector(std::size_t slot) const { return vectors_[slot]; }

  // Similarity of the query to every indexed question; `parallel` selects the
  // OpenMP kernel over the serial loop. Both produce identical values.
  std::vector<double> similarities_to(std::size_t query_slot, bool parallel = true) const;

 private:
  friend QuestionIndex build_index(std::vector<std::pair<std::string, EmbeddingVector>> questions);

  std::vector<std::string> ids_;
  std::vector<EmbeddingVector> vectors_;
  std::unordered_map<std::string, std::size_t> slot_;
  std::size_t dim_ = 0;
};

QuestionIndex build_index(std::vector<std::pair<std::string, EmbeddingVector>> questions);

// Top-min(k, available) questions with similarity in [lo, hi), self excluded.
NeighborSet neighbors(const QuestionIndex& index, const std::string& query_id, std::size_t k, double lo, double hi);

// Serial sort-everything-then-filter scan, kept as the reference the OpenMP
// path is tested and benchmarked against.
NeighborSet neighbors_reference(const QuestionIndex& index, const std::string& query_id, std::size_t k, double lo,
                                double hi);

// Seeded uniform sample without replacement of min(count, available)
// questions whose similarity to the query is <= hi.
NeighborSet random_pool(const QuestionIndex& index, const std::string& query_id, std::size_t count, double hi,
                        std::uint64_t seed);

}  // namespace fewl
