#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "fewl/theorylab/distributions.hpp"

namespace fewl::theory {

struct ChainSizes {
  std::size_t h = 4;      // reference answers
  std::size_t astar = 4;  // optimal answers
  std::size_t a = 4;      // evaluated answers
};

// h -> A* -> A, with A independent of h given A*.
struct MarkovChain {
  DiscreteDistribution h_dist;
  Channel to_astar;  // h -> A*
  Channel to_a;      // A* -> A
};

inline constexpr std::size_t kMinChainAlphabet = 2;
inline constexpr std::size_t kMaxChainAlphabet = 6;

// Seeded Dirichlet(1) distribution and channel rows. Sizes outside [2, 6]
// raise InvalidArgument.
MarkovChain random_chain(ChainSizes sizes, std::uint64_t seed);

JointDistribution joint_astar_h(const MarkovChain& chain);  // rows A*, cols h
JointDistribution joint_a_h(const MarkovChain& chain);      // rows A, cols h

// p(a, h, a*) flattened as [(a * |h| + h) * |A*| + a*].
std::vector<double> joint_a_h_astar(const MarkovChain& chain);

struct Theorem1Report {
  DivergenceKind kind = DivergenceKind::TV;
  std::size_t trials = 0;
  double fraction_satisfied = 0;
  double min_gap = 0;  // min over trials of V(A*, h) - V(A, h)
  std::uint64_t seed = 0;

  std::string to_json() const;
};

// Per trial: builds a chain from a splitmix-derived seed and compares the
// variational values of (A*, h) and (A, h), each at its own optimal witness.
// A trial is satisfied when V(A*) >= V(A) - 1e-9. Trials run under OpenMP.
Theorem1Report verify_theorem1(std::size_t trials, ChainSizes sizes, DivergenceKind kind, std::uint64_t seed);

// Serial loop over the same trials; must agree exactly with verify_theorem1.
Theorem1Report verify_theorem1_serial(std::size_t trials, ChainSizes sizes, DivergenceKind kind, std::uint64_t seed);

// V at the optimal witness for the joint vs. the product of its marginals.
double optimal_variational_information(const JointDistribution& joint, DivergenceKind kind);

// Gap V(A*, h) - V(A, h) for one chain.
double theorem1_gap(const MarkovChain& chain, DivergenceKind kind);

}  // namespace fewl::theory
