#include "fewl/theorylab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fewl/core/error.hpp"

namespace fewl::theory {
namespace {

void check_simplex(std::span<const double> p, const char* what) {
  double sum = 0;
  for (double x : p) {
    if (!(x >= 0) || !std::isfinite(x)) {
      throw Error(ErrorCode::InvalidArgument, what, std::string(what) + " has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::fabs(sum - 1.0) > kSimplexTolerance) {
    throw Error(ErrorCode::InvalidArgument, what, std::string(what) + " does not sum to 1");
  }
}

void check_size(std::size_t n, const char* what) {
  if (n == 0 || n > kMaxAlphabet) {
    throw Error(ErrorCode::InvalidArgument, what, std::string(what) + " alphabet size must lie in [1, 16]");
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  check_size(probs_.size(), "distribution");
  check_simplex(probs_, "distribution");
}

JointDistribution::JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> probs)
    : rows_(rows), cols_(cols), probs_(std::move(probs)) {
  check_size(rows_, "joint");
  check_size(cols_, "joint");
  if (probs_.size() != rows_ * cols_) throw Error(ErrorCode::DimensionMismatch, "joint", "joint has the wrong cell count");
  check_simplex(probs_, "joint");
}

std::vector<double> JointDistribution::row_marginal() const {
  std::vector<double> m(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m[r] += (*this)(r, c);
  return m;
}

std::vector<double> JointDistribution::col_marginal() const {
  std::vector<double> m(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m[c] += (*this)(r, c);
  return m;
}

Channel::Channel(std::size_t in, std::size_t out, std::vector<double> matrix) : in_(in), out_(out), m_(std::move(matrix)) {
  check_size(in_, "channel");
  check_size(out_, "channel");
  if (m_.size() != in_ * out_) throw Error(ErrorCode::DimensionMismatch, "channel", "channel has the wrong cell count");
  for (std::size_t r = 0; r < in_; ++r) check_simplex(std::span<const double>(m_).subspan(r * out_, out_), "channel row");
}

Channel Channel::identity(std::size_t n) {
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  return Channel(n, n, std::move(m));
}

Channel Channel::uniform(std::size_t in, std::size_t out) {
  return Channel(in, out, std::vector<double>(in * out, 1.0 / static_cast<double>(out)));
}

std::vector<double> dirichlet_uniform(std::size_t n, util::SplitMix64& rng) {
  std::vector<double> v(n);
  double sum = 0;
  for (double& x : v) {
    // exponential() can return exactly 0 only with probability 2^-53; the
    // floor keeps the support full regardless.
    x = std::max(rng.exponential(), 1e-300);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

JointDistribution product_of_marginals(const JointDistribution& joint) {
  const auto rm = joint.row_marginal();
  const auto cm = joint.col_marginal();
  std::vector<double> cells(joint.rows() * joint.cols());
  for (std::size_t r = 0; r < joint.rows(); ++r)
    for (std::size_t c = 0; c < joint.cols(); ++c) cells[r * joint.cols() + c] = rm[r] * cm[c];
  return JointDistribution(joint.rows(), joint.cols(), std::move(cells));
}

double exact_f_divergence(std::span<const double> p, std::span<const double> q, DivergenceKind kind) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "divergence", "p and q differ in size");
  double d = 0;
  switch (kind) {
    case DivergenceKind::TV:
      for (std::size_t i = 0; i < p.size(); ++i) d += std::fabs(p[i] - q[i]);
      return 0.5 * d;
    case DivergenceKind::JS:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double s = p[i] + q[i];
        if (p[i] > 0) d += p[i] * std::log(2.0 * p[i] / s);
        if (q[i] > 0) d += q[i] * std::log(2.0 * q[i] / s);
      }
      return d;
    case DivergenceKind::KL:
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0) continue;
        if (q[i] == 0) {
          throw Error(ErrorCode::SupportViolation, "cell " + std::to_string(i), "KL needs supp(p) inside supp(q)");
        }
        d += p[i] * std::log(p[i] / q[i]);
      }
      return d;
  }
  return d;
}

double exact_f_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q, DivergenceKind kind) {
  return exact_f_divergence(p.probs(), q.probs(), kind);
}

double exact_f_divergence(const JointDistribution& p, const JointDistribution& q, DivergenceKind kind) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "divergence", "joint shapes differ");
  }
  return exact_f_divergence(p.cells(), q.cells(), kind);
}

double f_mutual_information(const JointDistribution& joint, DivergenceKind kind) {
  return exact_f_divergence(joint, product_of_marginals(joint), kind);
}

}  // namespace fewl::theory
