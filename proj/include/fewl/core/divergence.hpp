#pragma once

#include <string>
#include <string_view>

namespace fewl {

// f-divergence families available as aggregator pairs (g*, f*).
enum class DivergenceKind { TV, JS, KL };

std::string_view to_string(DivergenceKind kind);
// Accepts "tv", "js", "kl" in any case; throws ConfigError otherwise.
DivergenceKind parse_divergence(std::string_view name);

// Output activation. Total on finite inputs and strictly increasing for every
// kind; its range always lies inside the domain of the paired f_star.
//   TV: tanh(v)/2        JS: log(2 / (1 + e^-v))        KL: v
double g_star(DivergenceKind kind, double v);

// Fenchel conjugate of the generator f.
//   TV: u  on |u| <= 1/2      JS: -log(2 - e^u)  on u < log 2      KL: e^(u-1)
// Throws DomainError when u lies outside the domain.
double f_star(DivergenceKind kind, double u);

bool in_f_star_domain(DivergenceKind kind, double u);

}  // namespace fewl
