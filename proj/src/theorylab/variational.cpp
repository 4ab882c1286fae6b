#include "fewl/theorylab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fewl/core/error.hpp"

namespace fewl::theory {
namespace {

// exp(-800) is exactly 0 in double precision, so f* reaches its limit there.
constexpr double kDeepNegative = -800.0;
constexpr double kBoundTolerance = 1e-9;

}  // namespace

double variational_value(std::span<const double> p, std::span<const double> q, const Witness& witness,
                         DivergenceKind kind) {
  if (p.size() != q.size() || witness.values.size() != p.size()) {
    throw Error(ErrorCode::DimensionMismatch, "witness", "p, q and witness must have the same cell count");
  }
  double ep = 0, eq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = witness.values[i];
    const double fs = f_star(kind, g);  // validates the domain for every cell
    if (p[i] != 0) ep += p[i] * g;
    if (q[i] != 0) eq += q[i] * fs;
  }
  return ep - eq;
}

double variational_value(const JointDistribution& p, const JointDistribution& q, const Witness& witness,
                         DivergenceKind kind) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error(ErrorCode::DimensionMismatch, "joint", "shapes differ");
  return variational_value(p.cells(), q.cells(), witness, kind);
}

Witness optimal_witness(std::span<const double> p, std::span<const double> q, DivergenceKind kind) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "witness", "p and q differ in size");
  Witness w;
  w.values.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i], qi = q[i];
    if (kind == DivergenceKind::TV) {
      w.values[i] = pi > qi ? 0.5 : (pi < qi ? -0.5 : 0.0);
      continue;
    }
    if (pi > 0 && qi == 0) {
      throw Error(ErrorCode::SupportViolation, "cell " + std::to_string(i),
                  "optimal witness needs supp(p) inside supp(q) for " + std::string(to_string(kind)));
    }
    if (pi == 0) {
      w.values[i] = qi == 0 ? 0.0 : kDeepNegative;
      continue;
    }
    w.values[i] = kind == DivergenceKind::KL ? 1.0 + std::log(pi / qi) : std::log(2.0 * pi / (pi + qi));
  }
  return w;
}

Witness optimal_witness(const JointDistribution& p, const JointDistribution& q, DivergenceKind kind) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw Error(ErrorCode::DimensionMismatch, "joint", "shapes differ");
  return optimal_witness(p.cells(), q.cells(), kind);
}

double clip_to_domain(DivergenceKind kind, double u) {
  switch (kind) {
    case DivergenceKind::TV: return std::clamp(u, -0.5, 0.5);
    case DivergenceKind::JS: return std::min(u, std::nextafter(std::numbers::ln2, 0.0));
    case DivergenceKind::KL: return u;
  }
  return u;
}

BoundSuiteReport check_lower_bound(std::size_t pairs, std::size_t witnesses, DivergenceKind kind, std::uint64_t seed,
                                   std::size_t max_alphabet) {
  BoundSuiteReport report;
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < pairs; ++t) {
    util::SplitMix64 rng(util::derive_seed(seed, t));
    const std::size_t m = 2 + static_cast<std::size_t>(rng.below(max_alphabet - 1));
    const DiscreteDistribution p(dirichlet_uniform(m, rng));
    const DiscreteDistribution q(dirichlet_uniform(m, rng));
    const double exact = exact_f_divergence(p, q, kind);
    for (std::size_t w = 0; w < witnesses; ++w) {
      Witness wit;
      for (std::size_t i = 0; i < m; ++i) wit.values.push_back(clip_to_domain(kind, rng.uniform(-3.0, 3.0)));
      const double excess = variational_value(p.probs(), q.probs(), wit, kind) - exact;
      ++report.checks;
      report.max_excess = std::max(report.max_excess, excess);
      if (excess > kBoundTolerance) ++report.violations;
    }
  }
  return report;
}

BoundSuiteReport check_tightness(std::size_t pairs, DivergenceKind kind, std::uint64_t seed, std::size_t max_alphabet) {
  BoundSuiteReport report;
  for (std::size_t t = 0; t < pairs; ++t) {
    util::SplitMix64 rng(util::derive_seed(seed, t));
    const std::size_t m = 2 + static_cast<std::size_t>(rng.below(max_alphabet - 1));
    const DiscreteDistribution p(dirichlet_uniform(m, rng));
    const DiscreteDistribution q(dirichlet_uniform(m, rng));
    const double gap =
        variational_value(p.probs(), q.probs(), optimal_witness(p.probs(), q.probs(), kind), kind) -
        exact_f_divergence(p, q, kind);
    ++report.checks;
    report.max_excess = std::max(report.max_excess, std::fabs(gap));
    if (std::fabs(gap) > kBoundTolerance) ++report.violations;
  }
  return report;
}

}  // namespace fewl::theory
