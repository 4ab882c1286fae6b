#include "fewl/similarity/index.hpp"

#include <algorithm>
#include <numeric>

#include "fewl/core/error.hpp"
#include "fewl/util/rng.hpp"

namespace fewl {
namespace {

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.question_id < b.question_id;
}

void check_bounds(double lo, double hi) {
  if (!(lo >= -1.0 && lo < hi && hi <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "bounds",
                "similarity bounds must satisfy -1 <= lo < hi <= 1 (got [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "))");
  }
}

}  // namespace

std::size_t QuestionIndex::slot(const std::string& id) const {
  auto it = slot_.find(id);
  if (it == slot_.end()) throw Error(ErrorCode::UnknownQuery, id);
  return it->second;
}

std::vector<double> QuestionIndex::similarities_to(std::size_t query_slot, bool parallel) const {
  const auto n = static_cast<std::ptrdiff_t>(ids_.size());
  std::vector<double> sims(ids_.size());
  const EmbeddingVector& q = vectors_[query_slot];
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) sims[j] = cosine(q, vectors_[j]);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) sims[j] = cosine(q, vectors_[j]);
  }
  return sims;
}

QuestionIndex build_index(std::vector<std::pair<std::string, EmbeddingVector>> questions) {
  QuestionIndex index;
  for (auto& [id, vec] : questions) {
    if (index.dim_ == 0) index.dim_ = vec.dim();
    if (vec.dim() != index.dim_) {
      throw Error(ErrorCode::DimensionMismatch, id,
                  "question " + id + " has dim " + std::to_string(vec.dim()) + ", index dim is " +
                      std::to_string(index.dim_));
    }
    if (!index.slot_.emplace(id, index.ids_.size()).second) throw Error(ErrorCode::DuplicateId, id);
    index.ids_.push_back(std::move(id));
    index.vectors_.push_back(std::move(vec));
  }
  return index;
}

NeighborSet neighbors(const QuestionIndex& index, const std::string& query_id, std::size_t k, double lo, double hi) {
  check_bounds(lo, hi);
  NeighborSet out{query_id, {lo, hi, false}, {}};
  if (index.size() == 0) return out;
  const std::size_t q = index.slot(query_id);
  if (k == 0) return out;

  const std::vector<double> sims = index.similarities_to(q, true);
  std::vector<Neighbor> candidates;
  for (std::size_t j = 0; j < sims.size(); ++j) {
    if (j == q || !out.bounds.contains(sims[j])) continue;
    candidates.push_back({index.id(j), sims[j]});
  }
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    ranks_before);
  candidates.resize(take);
  out.entries = std::move(candidates);
  return out;
}

NeighborSet neighbors_reference(const QuestionIndex& index, const std::string& query_id, std::size_t k, double lo,
                                double hi) {
  check_bounds(lo, hi);
  NeighborSet out{query_id, {lo, hi, false}, {}};
  if (index.size() == 0) return out;
  const std::size_t q = index.slot(query_id);

  std::vector<Neighbor> all;
  for (std::size_t j = 0; j < index.size(); ++j) {
    all.push_back({index.id(j), cosine(index.vector(q), index.vector(j))});
  }
  std::sort(all.begin(), all.end(), ranks_before);
  for (const auto& n : all) {
    if (out.entries.size() >= k) break;
    if (n.question_id == query_id || !out.bounds.contains(n.similarity)) continue;
    out.entries.push_back(n);
  }
  return out;
}

NeighborSet random_pool(const QuestionIndex& index, const std::string& query_id, std::size_t count, double hi,
                        std::uint64_t seed) {
  NeighborSet out{query_id, {-1.0, hi, true}, {}};
  if (index.size() == 0) return out;
  const std::size_t q = index.slot(query_id);

  const std::vector<double> sims = index.similarities_to(q, true);
  std::vector<Neighbor> eligible;
  for (std::size_t j = 0; j < sims.size(); ++j) {
    if (j == q || !out.bounds.contains(sims[j])) continue;
    eligible.push_back({index.id(j), sims[j]});
  }
  // Canonical order before sampling so the draw depends only on the seed.
  std::sort(eligible.begin(), eligible.end(),
            [](const Neighbor& a, const Neighbor& b) { return a.question_id < b.question_id; });

  const std::size_t take = std::min(count, eligible.size());
  util::SplitMix64 rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(take);
  std::sort(eligible.begin(), eligible.end(), ranks_before);
  out.entries = std::move(eligible);
  return out;
}

}  // namespace fewl
