#include "fewl/scoring/fewl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fewl/core/error.hpp"

namespace fewl {
namespace {

double max_similarity(const EmbeddingVector& a, std::span<const EmbeddingVector> set) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : set) best = std::max(best, cosine(a, e));
  return best;
}

}  // namespace

double raw_expertise(const EmbeddingVector& reference_answer, std::span<const EmbeddingVector> iw,
                     std::span<const EmbeddingVector> co) {
  if (iw.empty() || co.empty()) {
    throw Error(ErrorCode::EmptyContrastiveSet, "contrastive", "expertise needs at least one IW and one CO answer");
  }
  return max_similarity(reference_answer, co) - max_similarity(reference_answer, iw);
}

double ideal_raw_expertise(const EmbeddingVector& reference_answer, std::span<const EmbeddingVector> non_hallu,
                           std::span<const EmbeddingVector> hallu) {
  if (non_hallu.empty() || hallu.empty()) {
    throw Error(ErrorCode::MissingLabels, "labels", "ideal expertise needs labelled non_hallu and hallu answers");
  }
  return max_similarity(reference_answer, non_hallu) - max_similarity(reference_answer, hallu);
}

ExpertiseWeights lambda_weights(std::span<const double> raw, double tau) {
  if (raw.empty()) throw Error(ErrorCode::InvalidArgument, "raw", "expertise vector is empty");
  if (!(tau > 0)) throw Error(ErrorCode::InvalidArgument, "tau", "softmax temperature must be positive");
  ExpertiseWeights w;
  w.raw.assign(raw.begin(), raw.end());
  w.temperature = tau;
  const double top = *std::max_element(raw.begin(), raw.end());
  w.lambda.resize(raw.size());
  double sum = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    w.lambda[i] = std::exp((raw[i] - top) / tau);
    sum += w.lambda[i];
  }
  for (double& l : w.lambda) l /= sum;
  return w;
}

ExpertiseWeights uniform_weights(std::span<const double> raw) {
  ExpertiseWeights w;
  w.raw.assign(raw.begin(), raw.end());
  w.lambda.assign(raw.size(), raw.empty() ? 0.0 : 1.0 / static_cast<double>(raw.size()));
  return w;
}

PenaltyMean laziness_penalty_mean(const EmbeddingVector& answer, std::span<const EmbeddingVector> neighbor_answers) {
  if (neighbor_answers.empty()) return {0.0, true};
  double sum = 0;
  for (const auto& e : neighbor_answers) sum += cosine(answer, e);
  return {sum / static_cast<double>(neighbor_answers.size()), false};
}

FewlScore fewl_score(const EmbeddingVector& answer, std::span<const ReferenceContext> refs,
                     const ScoringConfig& config, const std::string& config_digest) {
  if (refs.empty()) throw Error(ErrorCode::InvalidArgument, "refs", "fewl_score needs at least one reference");
  FewlScore score;
  score.divergence = config.divergence;
  score.config_digest = config_digest.empty() ? config.digest() : config_digest;

  double sum = 0;
  for (const auto& ref : refs) {
    ReferenceTerm t;
    t.reference_id = ref.reference_id;
    t.similarity = cosine(answer, ref.answer);
    t.lambda = ref.lambda;
    t.weighted_truthfulness_term = g_star(config.divergence, ref.lambda * t.similarity);
    if (config.penalty_enabled) {
      const PenaltyMean pm = laziness_penalty_mean(answer, ref.neighbor_answers);
      t.penalty_mean = pm.value;
      t.penalty_term = f_star(config.divergence, g_star(config.divergence, pm.value));
      score.empty_penalty_warning = score.empty_penalty_warning || pm.empty;
    }
    sum += t.weighted_truthfulness_term - t.penalty_term;
    score.per_reference.push_back(std::move(t));
  }
  score.value = sum / static_cast<double>(refs.size());

  if (std::fabs(score.value - score.recompute()) > 1e-9) {
    throw std::logic_error("FEWL decomposition audit failed");
  }
  return score;
}

std::size_t single_reference_index(const ReferenceBundle& bundle, const ScoringConfig& config) {
  if (config.single_reference.empty()) return 0;
  for (std::size_t i = 0; i < bundle.references.size(); ++i) {
    if (bundle.references[i].reference_id == config.single_reference) return i;
  }
  throw Error(ErrorCode::ConfigError, "scoring.single_reference",
              "single_reference '" + config.single_reference + "' is not a configured reference");
}

FewlScore baseline_score(const EmbeddingVector& answer, const ReferenceBundle& bundle, const ScoringConfig& config,
                         const std::string& config_digest) {
  std::vector<ReferenceContext> chosen;
  switch (config.reference_mode) {
    case ReferenceMode::MultiModel: {
      chosen = bundle.references;
      std::vector<double> raw;
      for (const auto& r : chosen) {
        if (config.lambda_mode == LambdaMode::Ideal) {
          if (!r.ideal_raw_expertise) {
            throw Error(ErrorCode::MissingLabels, r.reference_id, "ideal lambda needs labelled answers");
          }
          raw.push_back(*r.ideal_raw_expertise);
        } else {
          raw.push_back(r.raw_expertise);
        }
      }
      const ExpertiseWeights w = config.lambda_mode == LambdaMode::Uniform ? uniform_weights(raw)
                                                                            : lambda_weights(raw, config.temperature_tau);
      for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i].lambda = w.lambda[i];
      break;
    }
    case ReferenceMode::SingleModel: {
      if (bundle.references.empty()) throw Error(ErrorCode::InvalidArgument, "refs", "no references");
      chosen.push_back(bundle.references[single_reference_index(bundle, config)]);
      chosen.back().lambda = 1.0;
      break;
    }
    case ReferenceMode::SingleBest: {
      if (bundle.references.empty()) throw Error(ErrorCode::InvalidArgument, "refs", "no references");
      std::size_t best = 0;
      for (std::size_t i = 1; i < bundle.references.size(); ++i) {
        if (bundle.references[i].raw_expertise > bundle.references[best].raw_expertise) best = i;
      }
      chosen.push_back(bundle.references[best]);
      chosen.back().lambda = 1.0;
      break;
    }
    case ReferenceMode::MultiSample: {
      if (bundle.samples.empty()) throw Error(ErrorCode::InvalidArgument, "samples", "no sampled pseudo-references");
      chosen = bundle.samples;
      for (auto& c : chosen) c.lambda = 1.0 / static_cast<double>(chosen.size());
      break;
    }
  }
  return fewl_score(answer, chosen, config, config_digest);
}

}  // namespace fewl
