#pragma once

#include <cstdint>
#include <cmath>

namespace fewl::util {

// splitmix64: small, portable, and bit-identical on every platform, which
// std::uniform_*_distribution is not.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard exponential; used for Dirichlet(1, ..., 1) rows.
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::uint64_t state_;
};

// The t-th output of a splitmix64 stream seeded with `seed`; gives independent
// per-task seeds without sharing generator state across threads.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t t) {
  SplitMix64 g(seed + t * 0x9e3779b97f4a7c15ULL);
  return g.next();
}

}  // namespace fewl::util
