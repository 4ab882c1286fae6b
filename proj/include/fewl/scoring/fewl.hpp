#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fewl/core/types.hpp"
#include "fewl/scoring/config.hpp"
#include "fewl/similarity/embedding.hpp"

namespace fewl {

// max_k cos(ref, co_k) - max_k cos(ref, iw_k), in [-2, 2]. The two sets may
// differ in size after a partial parse. Throws EmptyContrastiveSet.
double raw_expertise(const EmbeddingVector& reference_answer, std::span<const EmbeddingVector> iw,
                     std::span<const EmbeddingVector> co);

// Same contrast against labelled answers instead of generated ones. Throws
// MissingLabels when either set is empty.
double ideal_raw_expertise(const EmbeddingVector& reference_answer, std::span<const EmbeddingVector> non_hallu,
                           std::span<const EmbeddingVector> hallu);

// Temperature softmax with max-subtraction.
ExpertiseWeights lambda_weights(std::span<const double> raw, double tau);
ExpertiseWeights uniform_weights(std::span<const double> raw);

struct PenaltyMean {
  double value = 0;
  bool empty = false;  // no neighbour answers: value is 0 and callers should warn
};

PenaltyMean laziness_penalty_mean(const EmbeddingVector& answer, std::span<const EmbeddingVector> neighbor_answers);

// Everything one reference contributes for one question.
struct ReferenceContext {
  std::string reference_id;
  EmbeddingVector answer;                        // h_i(x)
  double raw_expertise = 0;                      // r_i(x)
  std::optional<double> ideal_raw_expertise;     // from labelled answers, when present
  double lambda = 0;                             // filled by the caller or by baseline_score
  std::vector<EmbeddingVector> neighbor_answers; // h_i(x') for the penalty neighbours x'
};

// The expertise-weighted truthfulness minus laziness combination:
//   (1/N) sum_i [ g*(lambda_i cos(y, h_i(x))) - f*(g*(mean_k cos(y, h_i(x'_k)))) ]
// using each context's lambda as given. The penalty term is 0 when the config
// disables it. The stored decomposition is audited against the value.
FewlScore fewl_score(const EmbeddingVector& answer, std::span<const ReferenceContext> refs,
                     const ScoringConfig& config, const std::string& config_digest = {});

struct ReferenceBundle {
  std::vector<ReferenceContext> references;  // one per reference model
  std::vector<ReferenceContext> samples;     // diversified draws from the single reference
};

// Index of the reference used by the single-reference modes.
std::size_t single_reference_index(const ReferenceBundle& bundle, const ScoringConfig& config);

// Resolves config.reference_mode / lambda_mode into concrete contexts and
// weights, then applies fewl_score:
//   MultiModel  - all references, lambda from lambda_mode
//   SingleModel - the designated reference, lambda = 1
//   SingleBest  - argmax raw expertise (lowest index on ties), lambda = 1
//   MultiSample - the sampled pseudo-references, uniform lambda
FewlScore baseline_score(const EmbeddingVector& answer, const ReferenceBundle& bundle, const ScoringConfig& config,
                         const std::string& config_digest = {});

}  // namespace fewl
