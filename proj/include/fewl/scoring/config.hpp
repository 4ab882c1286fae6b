#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fewl/core/divergence.hpp"
#include "fewl/util/toml.hpp"

namespace fewl {

enum class PenaltySource { KNN, RandomPool };
enum class LambdaMode { Estimated, Uniform, Ideal };
enum class ReferenceMode { MultiModel, SingleModel, SingleBest, MultiSample };

std::string_view to_string(PenaltySource v);
std::string_view to_string(LambdaMode v);
std::string_view to_string(ReferenceMode v);
PenaltySource parse_penalty_source(std::string_view s);
LambdaMode parse_lambda_mode(std::string_view s);
ReferenceMode parse_reference_mode(std::string_view s);

struct ScoringConfig {
  DivergenceKind divergence = DivergenceKind::TV;
  int n_contrastive = 25;   // IW/CO pairs requested per question
  int n_neighbors = 10;     // neighbour questions feeding the laziness penalty
  double neighbor_lo = 0.2;
  double neighbor_hi = 0.8;
  PenaltySource penalty_source = PenaltySource::KNN;
  int random_pool_count = 25;
  double random_pool_hi = 0.8;
  double temperature_tau = 1.0;
  LambdaMode lambda_mode = LambdaMode::Estimated;
  ReferenceMode reference_mode = ReferenceMode::MultiModel;
  bool penalty_enabled = true;
  std::string single_reference;  // empty: first reference
  int multi_samples = 5;
  std::uint64_t seed = 0;
  std::vector<std::string> ablations;  // extra table columns, see ablation_cell()

  // Throws ConfigError naming the offending key.
  void validate() const;

  // Canonical serialization of every field; its SHA-256 is the digest.
  std::string canonical() const;
  std::string digest() const;

  // Reads the [scoring] table. `divergence` is mandatory; every other key
  // falls back to the defaults above.
  static ScoringConfig from_toml(const util::TomlDocument& doc);
};

// One cell of the ablation grid, addressable by name:
//   single_no_penalty, single_penalty, multi_no_penalty, single_best_no_penalty,
//   fewl_no_penalty, estimated_lambda, uniform_lambda, ideal_lambda
struct AblationCell {
  std::string name;
  ReferenceMode reference_mode;
  LambdaMode lambda_mode;
  bool penalty_enabled;
};

AblationCell ablation_cell(std::string_view name, const ScoringConfig& base);
const std::vector<std::string>& known_ablations();

// `base` with the cell's reference mode, lambda mode and penalty switch.
ScoringConfig apply_cell(const ScoringConfig& base, const AblationCell& cell);

}  // namespace fewl
