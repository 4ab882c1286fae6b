#include "fewl/scoring/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "fewl/core/error.hpp"
#include "fewl/util/sha256.hpp"

namespace fewl {

std::string_view to_string(PenaltySource v) { return v == PenaltySource::KNN ? "knn" : "random_pool"; }

std::string_view to_string(LambdaMode v) {
  switch (v) {
    case LambdaMode::Estimated: return "estimated";
    case LambdaMode::Uniform: return "uniform";
    case LambdaMode::Ideal: return "ideal";
  }
  return "?";
}

std::string_view to_string(ReferenceMode v) {
  switch (v) {
    case ReferenceMode::MultiModel: return "multi_model";
    case ReferenceMode::SingleModel: return "single_model";
    case ReferenceMode::SingleBest: return "single_best";
    case ReferenceMode::MultiSample: return "multi_sample";
  }
  return "?";
}

namespace {
[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* expected) {
  throw Error(ErrorCode::ConfigError, key,
              "invalid value '" + std::string(value) + "' for " + key + " (expected " + expected + ")");
}
}  // namespace

PenaltySource parse_penalty_source(std::string_view s) {
  if (s == "knn") return PenaltySource::KNN;
  if (s == "random_pool") return PenaltySource::RandomPool;
  bad_value("scoring.penalty_source", s, "knn or random_pool");
}

LambdaMode parse_lambda_mode(std::string_view s) {
  if (s == "estimated") return LambdaMode::Estimated;
  if (s == "uniform") return LambdaMode::Uniform;
  if (s == "ideal") return LambdaMode::Ideal;
  bad_value("scoring.lambda_mode", s, "estimated, uniform or ideal");
}

ReferenceMode parse_reference_mode(std::string_view s) {
  if (s == "multi_model") return ReferenceMode::MultiModel;
  if (s == "single_model") return ReferenceMode::SingleModel;
  if (s == "single_best") return ReferenceMode::SingleBest;
  if (s == "multi_sample") return ReferenceMode::MultiSample;
  bad_value("scoring.reference_mode", s, "multi_model, single_model, single_best or multi_sample");
}

void ScoringConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw Error(ErrorCode::ConfigError, key, std::string(key) + " " + what);
  };
  require(n_contrastive >= 1, "scoring.n_contrastive", "must be >= 1");
  require(n_neighbors >= 1, "scoring.n_neighbors", "must be >= 1");
  require(neighbor_lo >= -1.0 && neighbor_lo < neighbor_hi && neighbor_hi <= 1.0, "scoring.neighbor_bounds",
          "must satisfy -1 <= lo < hi <= 1");
  require(random_pool_count >= 1, "scoring.random_pool_count", "must be >= 1");
  require(random_pool_hi >= -1.0 && random_pool_hi <= 1.0, "scoring.random_pool_hi", "must lie in [-1, 1]");
  require(temperature_tau > 0, "scoring.temperature_tau", "must be positive");
  require(multi_samples >= 1, "scoring.multi_samples", "must be >= 1");
  for (const auto& a : ablations) {
    const auto& known = known_ablations();
    if (std::find(known.begin(), known.end(), a) == known.end()) bad_value("scoring.ablations", a, "a known ablation cell");
  }
}

std::string ScoringConfig::canonical() const {
  nlohmann::json j;
  j["divergence"] = std::string(to_string(divergence));
  j["n_contrastive"] = n_contrastive;
  j["n_neighbors"] = n_neighbors;
  j["neighbor_bounds"] = {neighbor_lo, neighbor_hi};
  j["penalty_source"] = std::string(to_string(penalty_source));
  j["random_pool_count"] = random_pool_count;
  j["random_pool_hi"] = random_pool_hi;
  j["temperature_tau"] = temperature_tau;
  j["lambda_mode"] = std::string(to_string(lambda_mode));
  j["reference_mode"] = std::string(to_string(reference_mode));
  j["penalty_enabled"] = penalty_enabled;
  j["single_reference"] = single_reference;
  j["multi_samples"] = multi_samples;
  j["seed"] = seed;
  j["ablations"] = ablations;
  return j.dump();
}

std::string ScoringConfig::digest() const { return util::sha256_hex(canonical()); }

ScoringConfig ScoringConfig::from_toml(const util::TomlDocument& doc) {
  ScoringConfig c;
  auto div = doc.get_string("scoring.divergence");
  if (!div) throw Error(ErrorCode::ConfigError, "scoring.divergence", "missing required config key scoring.divergence");
  try {
    c.divergence = parse_divergence(*div);
  } catch (const Error&) {
    bad_value("scoring.divergence", *div, "tv, js or kl");
  }
  auto as_int = [&](const char* key, int& field) {
    if (auto v = doc.get_int(key)) field = static_cast<int>(*v);
  };
  as_int("scoring.n_contrastive", c.n_contrastive);
  as_int("scoring.n_neighbors", c.n_neighbors);
  as_int("scoring.random_pool_count", c.random_pool_count);
  as_int("scoring.multi_samples", c.multi_samples);
  if (auto b = doc.get_double_array("scoring.neighbor_bounds")) {
    if (b->size() != 2) bad_value("scoring.neighbor_bounds", "array", "[lo, hi]");
    c.neighbor_lo = (*b)[0];
    c.neighbor_hi = (*b)[1];
  }
  if (auto v = doc.get_double("scoring.random_pool_hi")) c.random_pool_hi = *v;
  if (auto v = doc.get_double("scoring.temperature_tau")) c.temperature_tau = *v;
  if (auto v = doc.get_string("scoring.penalty_source")) c.penalty_source = parse_penalty_source(*v);
  if (auto v = doc.get_string("scoring.lambda_mode")) c.lambda_mode = parse_lambda_mode(*v);
  if (auto v = doc.get_string("scoring.reference_mode")) c.reference_mode = parse_reference_mode(*v);
  if (auto v = doc.get_bool("scoring.penalty_enabled")) c.penalty_enabled = *v;
  if (auto v = doc.get_string("scoring.single_reference")) c.single_reference = *v;
  if (auto v = doc.get_int("scoring.seed")) c.seed = static_cast<std::uint64_t>(*v);
  if (auto v = doc.get_string_array("scoring.ablations")) c.ablations = *v;
  c.validate();
  return c;
}

const std::vector<std::string>& known_ablations() {
  static const std::vector<std::string> names = {"single_no_penalty", "single_penalty",   "multi_no_penalty",
                                                 "single_best_no_penalty", "fewl_no_penalty", "estimated_lambda",
                                                 "uniform_lambda",    "ideal_lambda"};
  return names;
}

AblationCell ablation_cell(std::string_view name, const ScoringConfig& base) {
  const std::string n(name);
  if (n == "single_no_penalty") return {n, ReferenceMode::SingleModel, LambdaMode::Uniform, false};
  if (n == "single_penalty") return {n, ReferenceMode::SingleModel, LambdaMode::Uniform, true};
  if (n == "multi_no_penalty") return {n, ReferenceMode::MultiSample, LambdaMode::Uniform, false};
  if (n == "single_best_no_penalty") return {n, ReferenceMode::SingleBest, LambdaMode::Estimated, false};
  if (n == "fewl_no_penalty") return {n, ReferenceMode::MultiModel, base.lambda_mode, false};
  if (n == "estimated_lambda") return {n, ReferenceMode::MultiModel, LambdaMode::Estimated, base.penalty_enabled};
  if (n == "uniform_lambda") return {n, ReferenceMode::MultiModel, LambdaMode::Uniform, base.penalty_enabled};
  if (n == "ideal_lambda") return {n, ReferenceMode::MultiModel, LambdaMode::Ideal, base.penalty_enabled};
  bad_value("scoring.ablations", name, "a known ablation cell");
}

ScoringConfig apply_cell(const ScoringConfig& base, const AblationCell& cell) {
  ScoringConfig c = base;
  c.reference_mode = cell.reference_mode;
  c.lambda_mode = cell.lambda_mode;
  c.penalty_enabled = cell.penalty_enabled;
  return c;
}

}  // namespace fewl
