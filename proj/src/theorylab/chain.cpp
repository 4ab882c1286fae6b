#include "fewl/theorylab/chain.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <limits>

#include "fewl/core/error.hpp"
#include "fewl/theorylab/variational.hpp"

namespace fewl::theory {
namespace {

constexpr double kGapTolerance = 1e-9;

Channel random_channel(std::size_t in, std::size_t out, util::SplitMix64& rng) {
  std::vector<double> m;
  m.reserve(in * out);
  for (std::size_t r = 0; r < in; ++r) {
    auto row = dirichlet_uniform(out, rng);
    m.insert(m.end(), row.begin(), row.end());
  }
  return Channel(in, out, std::move(m));
}

void check_chain_size(std::size_t n, const char* what) {
  if (n < kMinChainAlphabet || n > kMaxChainAlphabet) {
    throw Error(ErrorCode::InvalidArgument, what,
                std::string("chain alphabet '") + what + "' must lie in [2, 6], got " + std::to_string(n));
  }
}

}  // namespace

MarkovChain random_chain(ChainSizes sizes, std::uint64_t seed) {
  check_chain_size(sizes.h, "h");
  check_chain_size(sizes.astar, "astar");
  check_chain_size(sizes.a, "a");
  util::SplitMix64 rng(seed);
  DiscreteDistribution h(dirichlet_uniform(sizes.h, rng));
  Channel t1 = random_channel(sizes.h, sizes.astar, rng);
  Channel t2 = random_channel(sizes.astar, sizes.a, rng);
  return {std::move(h), std::move(t1), std::move(t2)};
}

JointDistribution joint_astar_h(const MarkovChain& c) {
  const std::size_t nh = c.h_dist.size(), ns = c.to_astar.out();
  std::vector<double> cells(ns * nh);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t h = 0; h < nh; ++h) cells[s * nh + h] = c.h_dist[h] * c.to_astar(h, s);
  return JointDistribution(ns, nh, std::move(cells));
}

JointDistribution joint_a_h(const MarkovChain& c) {
  const std::size_t nh = c.h_dist.size(), ns = c.to_astar.out(), na = c.to_a.out();
  std::vector<double> cells(na * nh, 0.0);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t h = 0; h < nh; ++h)
      for (std::size_t s = 0; s < ns; ++s) cells[a * nh + h] += c.h_dist[h] * c.to_astar(h, s) * c.to_a(s, a);
  return JointDistribution(na, nh, std::move(cells));
}

std::vector<double> joint_a_h_astar(const MarkovChain& c) {
  const std::size_t nh = c.h_dist.size(), ns = c.to_astar.out(), na = c.to_a.out();
  std::vector<double> out(na * nh * ns);
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t h = 0; h < nh; ++h)
      for (std::size_t s = 0; s < ns; ++s) out[(a * nh + h) * ns + s] = c.h_dist[h] * c.to_astar(h, s) * c.to_a(s, a);
  return out;
}

double optimal_variational_information(const JointDistribution& joint, DivergenceKind kind) {
  const JointDistribution indep = product_of_marginals(joint);
  return variational_value(joint, indep, optimal_witness(joint, indep, kind), kind);
}

double theorem1_gap(const MarkovChain& chain, DivergenceKind kind) {
  return optimal_variational_information(joint_astar_h(chain), kind) -
         optimal_variational_information(joint_a_h(chain), kind);
}

Theorem1Report verify_theorem1(std::size_t trials, ChainSizes sizes, DivergenceKind kind, std::uint64_t seed) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials", "trials must be >= 1");
  const auto n = static_cast<std::ptrdiff_t>(trials);
  std::size_t satisfied = 0;
  double min_gap = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(+ : satisfied) reduction(min : min_gap)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const double gap = theorem1_gap(random_chain(sizes, util::derive_seed(seed, static_cast<std::uint64_t>(t))), kind);
    if (gap >= -kGapTolerance) ++satisfied;
    min_gap = std::min(min_gap, gap);
  }
  return {kind, trials, static_cast<double>(satisfied) / static_cast<double>(trials), min_gap, seed};
}

Theorem1Report verify_theorem1_serial(std::size_t trials, ChainSizes sizes, DivergenceKind kind, std::uint64_t seed) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials", "trials must be >= 1");
  std::size_t satisfied = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const double gap = theorem1_gap(random_chain(sizes, util::derive_seed(seed, t)), kind);
    if (gap >= -kGapTolerance) ++satisfied;
    min_gap = std::min(min_gap, gap);
  }
  return {kind, trials, static_cast<double>(satisfied) / static_cast<double>(trials), min_gap, seed};
}

std::string Theorem1Report::to_json() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind));
  j["trials"] = trials;
  j["fraction_satisfied"] = fraction_satisfied;
  j["min_gap"] = min_gap;
  j["seed"] = seed;
  return j.dump();
}

}  // namespace fewl::theory
