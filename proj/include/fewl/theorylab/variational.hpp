#pragma once

#include <cstdint>
#include <span>

#include "fewl/theorylab/distributions.hpp"

namespace fewl::theory {

// E_P[g] - E_Q[f*(g)], summed exactly over cells. Throws DomainError when a
// witness value falls outside dom(f*).
double variational_value(std::span<const double> p, std::span<const double> q, const Witness& witness,
                         DivergenceKind kind);
double variational_value(const JointDistribution& p, const JointDistribution& q, const Witness& witness,
                         DivergenceKind kind);

// Witness attaining the supremum:
//   TV  sign(p - q)/2 (0 where p == q)
//   KL  1 + ln(p/q)
//   JS  ln(2p/(p+q))
// Cells with p = q = 0 get 0. Cells with p = 0 < q get a value deep enough
// that f* underflows to its limit exactly. KL and JS need supp(p) inside
// supp(q) (SupportViolation otherwise).
Witness optimal_witness(std::span<const double> p, std::span<const double> q, DivergenceKind kind);
Witness optimal_witness(const JointDistribution& p, const JointDistribution& q, DivergenceKind kind);

// Property suites shared by the CLI and the acceptance tests.
struct BoundSuiteReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_excess = 0;  // max(variational - exact), <= 0 when the bound holds
};

// `pairs` random full-support (P, Q) pairs with alphabets in [2, max_alphabet],
// `witnesses` random witnesses per pair clipped into dom(f*); counts
// variational_value > exact + 1e-9 as a violation.
BoundSuiteReport check_lower_bound(std::size_t pairs, std::size_t witnesses, DivergenceKind kind, std::uint64_t seed,
                                   std::size_t max_alphabet = 8);

// Optimal witnesses on random full-support pairs; counts
// |variational - exact| > 1e-9 as a violation.
BoundSuiteReport check_tightness(std::size_t pairs, DivergenceKind kind, std::uint64_t seed,
                                 std::size_t max_alphabet = 8);

double clip_to_domain(DivergenceKind kind, double u);

}  // namespace fewl::theory
