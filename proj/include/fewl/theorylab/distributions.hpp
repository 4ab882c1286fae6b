#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fewl/core/divergence.hpp"
#include "fewl/util/rng.hpp"

namespace fewl::theory {

inline constexpr std::size_t kMaxAlphabet = 16;
inline constexpr double kSimplexTolerance = 1e-12;

// Probability vector over a finite alphabet of at most 16 symbols.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);

  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

// rows x cols matrix of probabilities, row-major; rows index the answer
// variable, columns the reference variable.
class JointDistribution {
 public:
  JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> probs);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return probs_[r * cols_ + c]; }
  std::span<const double> cells() const { return probs_; }

  std::vector<double> row_marginal() const;
  std::vector<double> col_marginal() const;

 private:
  std::size_t rows_, cols_;
  std::vector<double> probs_;
};

// Row-stochastic transition matrix.
class Channel {
 public:
  Channel(std::size_t in, std::size_t out, std::vector<double> matrix);

  static Channel identity(std::size_t n);
  static Channel uniform(std::size_t in, std::size_t out);

  std::size_t in() const { return in_; }
  std::size_t out() const { return out_; }
  double operator()(std::size_t from, std::size_t to) const { return m_[from * out_ + to]; }

 private:
  std::size_t in_, out_;
  std::vector<double> m_;
};

// Value of the variational function per cell.
struct Witness {
  std::vector<double> values;
};

// Dirichlet(1, ..., 1) sample; every entry is strictly positive.
std::vector<double> dirichlet_uniform(std::size_t n, util::SplitMix64& rng);

JointDistribution product_of_marginals(const JointDistribution& joint);

// D_f(p || q) for the generator paired with each (g*, f*):
//   TV  (1/2) sum |p - q|
//   JS  sum p ln(2p/(p+q)) + q ln(2q/(p+q))   (= KL(p||m) + KL(q||m), m the midpoint)
//   KL  sum p ln(p/q); SupportViolation when p > 0 = q.
double exact_f_divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind);
double exact_f_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q, DivergenceKind kind);
double exact_f_divergence(const JointDistribution& p, const JointDistribution& q, DivergenceKind kind);

// f-mutual information: D_f(joint || product of its marginals).
double f_mutual_information(const JointDistribution& joint, DivergenceKind kind);

}  // namespace fewl::theory
