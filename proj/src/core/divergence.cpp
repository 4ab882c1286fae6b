#include "fewl/core/divergence.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "fewl/core/error.hpp"

namespace fewl {

std::string_view to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::TV: return "tv";
    case DivergenceKind::JS: return "js";
    case DivergenceKind::KL: return "kl";
  }
  return "?";
}

DivergenceKind parse_divergence(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "tv") return DivergenceKind::TV;
  if (lower == "js") return DivergenceKind::JS;
  if (lower == "kl") return DivergenceKind::KL;
  throw Error(ErrorCode::ConfigError, std::string(name),
              "unknown divergence '" + std::string(name) + "' (expected tv, js or kl)");
}

double g_star(DivergenceKind kind, double v) {
  switch (kind) {
    case DivergenceKind::TV:
      return 0.5 * std::tanh(v);
    case DivergenceKind::JS: {
      // log 2 - softplus(-v), written to stay finite for large |v|. For v
      // beyond ~37 the result rounds to log 2 itself, which f* rejects, so
      // saturate one ulp below.
      const double out = v >= 0 ? std::numbers::ln2 - std::log1p(std::exp(-v))
                                : std::numbers::ln2 + v - std::log1p(std::exp(v));
      return std::min(out, std::nextafter(std::numbers::ln2, 0.0));
    }
    case DivergenceKind::KL:
      return v;
  }
  return v;
}

bool in_f_star_domain(DivergenceKind kind, double u) {
  if (!std::isfinite(u)) return false;
  switch (kind) {
    case DivergenceKind::TV: return std::fabs(u) <= 0.5;
    case DivergenceKind::JS: return u < std::numbers::ln2;
    case DivergenceKind::KL: return true;
  }
  return false;
}

double f_star(DivergenceKind kind, double u) {
  if (!in_f_star_domain(kind, u)) {
    throw Error(ErrorCode::DomainError, std::string(to_string(kind)),
                "f* argument " + std::to_string(u) + " is outside the domain for " +
                    std::string(to_string(kind)));
  }
  switch (kind) {
    case DivergenceKind::TV: return u;
    case DivergenceKind::JS: return -std::log(2.0 - std::exp(u));
    case DivergenceKind::KL: return std::exp(u - 1.0);
  }
  return u;
}

}  // namespace fewl
