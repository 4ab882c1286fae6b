#include <doctest.h>

#include <cmath>
#include <functional>
#include <nlohmann/json.hpp>

#include "fewl/core/error.hpp"
#include "fewl/theorylab/chain.hpp"
#include "fewl/theorylab/variational.hpp"

using namespace fewl;
using namespace fewl::theory;

namespace {

constexpr DivergenceKind kAllKinds[] = {DivergenceKind::TV, DivergenceKind::JS, DivergenceKind::KL};

// Independent long-double evaluation of sum q f(p/q) with each kind's generator.
long double oracle_divergence(const std::vector<double>& p, const std::vector<double>& q, DivergenceKind kind) {
  long double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double a = p[i], b = q[i];
    switch (kind) {
      case DivergenceKind::TV: d += std::fabs(a - b) / 2; break;
      case DivergenceKind::KL:
        if (a > 0) d += a * std::log(a / b);
        break;
      case DivergenceKind::JS:
        if (a > 0) d += a * std::log(2 * a / (a + b));
        if (b > 0) d += b * std::log(2 * b / (a + b));
        break;
    }
  }
  return d;
}

std::vector<double> random_simplex(util::SplitMix64& rng, std::size_t n) { return dirichlet_uniform(n, rng); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fewl::Error");
  return ErrorCode::Io;
}

}  // namespace

TEST_SUITE("theorylab") {
  TEST_CASE("distribution invariants") {
    CHECK_NOTHROW(DiscreteDistribution({0.25, 0.75}));
    CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.6}), Error);
    CHECK_THROWS_AS(DiscreteDistribution({-0.1, 1.1}), Error);
    CHECK_THROWS_AS(DiscreteDistribution(std::vector<double>(17, 1.0 / 17)), Error);
    CHECK_THROWS_AS(JointDistribution(2, 2, {0.5, 0.5, 0.5, 0.5}), Error);
    CHECK_THROWS_AS(Channel(2, 2, {1.0, 0.0, 0.6, 0.6}), Error);
    CHECK_NOTHROW(Channel::uniform(3, 4));
  }

  TEST_CASE("product_of_marginals examples") {
    JointDistribution j(2, 2, {0.4, 0.1, 0.1, 0.4});
    auto pm = product_of_marginals(j);
    for (double v : pm.cells()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

    JointDistribution indep(2, 3, {0.06, 0.12, 0.12, 0.14, 0.28, 0.28});
    auto fixed = product_of_marginals(indep);
    for (std::size_t i = 0; i < 6; ++i) CHECK(fixed.cells()[i] == doctest::Approx(indep.cells()[i]).epsilon(1e-12));

    JointDistribution point(2, 2, {0, 0, 1, 0});
    auto same = product_of_marginals(point);
    for (std::size_t i = 0; i < 4; ++i) CHECK(same.cells()[i] == point.cells()[i]);
  }

  TEST_CASE("exact_f_divergence examples") {
    std::vector<double> p = {0.5, 0.5};
    for (auto kind : kAllKinds) CHECK(exact_f_divergence(p, p, kind) == 0.0);
    std::vector<double> q = {0.75, 0.25};
    CHECK(exact_f_divergence(p, q, DivergenceKind::TV) == 0.25);
    std::vector<double> r = {0.25, 0.75};
    CHECK(std::abs(exact_f_divergence(p, r, DivergenceKind::KL) - 0.14384) < 1e-5);
    CHECK(exact_f_divergence(p, r, DivergenceKind::KL) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-14));
    std::vector<double> zero = {1.0, 0.0};
    CHECK(code_of([&] { (void)exact_f_divergence(p, zero, DivergenceKind::KL); }) == ErrorCode::SupportViolation);
    CHECK(exact_f_divergence(zero, p, DivergenceKind::KL) == doctest::Approx(std::log(2.0)));
    CHECK(std::isfinite(exact_f_divergence(p, zero, DivergenceKind::JS)));
  }

  TEST_CASE("exact_f_divergence agrees with the oracle; nonnegative; zero iff equal") {
    util::SplitMix64 rng(4);
    for (int t = 0; t < 300; ++t) {
      const std::size_t n = 2 + rng.below(15);
      auto p = random_simplex(rng, n), q = random_simplex(rng, n);
      for (auto kind : kAllKinds) {
        const double d = exact_f_divergence(p, q, kind);
        CHECK(d == doctest::Approx(double(oracle_divergence(p, q, kind))).epsilon(1e-12));
        CHECK(d > 1e-12);
        CHECK(std::abs(exact_f_divergence(p, p, kind)) <= 1e-12);
      }
    }
  }

  TEST_CASE("variational_value examples") {
    JointDistribution p(2, 2, {0.4, 0.1, 0.1, 0.4});
    auto q = product_of_marginals(p);
    CHECK(variational_value(p, q, Witness{{0, 0, 0, 0}}, DivergenceKind::TV) == 0.0);
    for (auto kind : kAllKinds) {
      for (double c : {-0.4, 0.0, 0.3}) {
        const double v = variational_value(p, q, Witness{{c, c, c, c}}, kind);
        CHECK(v == doctest::Approx(c - f_star(kind, c)).epsilon(1e-14));
        CHECK(v <= 1e-15);
      }
    }
    // Constant witnesses attain 0 exactly at the maximiser of u - f*(u): TV any, JS 0, KL 1.
    CHECK(variational_value(p, q, Witness{{1, 1, 1, 1}}, DivergenceKind::KL) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(code_of([&] { (void)variational_value(p, q, Witness{{0.9, 0, 0, 0}}, DivergenceKind::TV); }) ==
          ErrorCode::DomainError);
  }

  TEST_CASE("optimal_witness examples") {
    JointDistribution p(2, 2, {0.4, 0.1, 0.1, 0.4});
    auto q = product_of_marginals(p);
    auto w = optimal_witness(p, q, DivergenceKind::TV);
    CHECK(w.values == std::vector<double>{0.5, -0.5, -0.5, 0.5});
    CHECK(variational_value(p, q, w, DivergenceKind::TV) == doctest::Approx(exact_f_divergence(p, q, DivergenceKind::TV)).epsilon(1e-15));

    for (auto kind : kAllKinds) {
      auto same = optimal_witness(p, p, kind);
      CHECK(variational_value(p, p, same, kind) == doctest::Approx(0.0).epsilon(1e-15));
    }
    CHECK(optimal_witness(p, p, DivergenceKind::TV).values == std::vector<double>{0, 0, 0, 0});

    util::SplitMix64 rng(44);
    JointDistribution r(4, 4, random_simplex(rng, 16)), s(4, 4, random_simplex(rng, 16));
    auto kw = optimal_witness(r, s, DivergenceKind::KL);
    CHECK(std::abs(variational_value(r, s, kw, DivergenceKind::KL) - exact_f_divergence(r, s, DivergenceKind::KL)) < 1e-9);

    std::vector<double> a = {0.5, 0.5}, b = {1.0, 0.0};
    CHECK(code_of([&] { (void)optimal_witness(a, b, DivergenceKind::KL); }) == ErrorCode::SupportViolation);
    // p = 0 < q cells: the witness drives f* to its infimum.
    auto edge = optimal_witness(b, a, DivergenceKind::JS);
    CHECK(std::abs(variational_value(b, a, edge, DivergenceKind::JS) - exact_f_divergence(b, a, DivergenceKind::JS)) < 1e-9);
  }

  TEST_CASE("lower bound and tightness suites") {
    for (auto kind : kAllKinds) {
      auto lb = check_lower_bound(50, 100, kind, 123);
      CHECK(lb.checks == 5000);
      CHECK(lb.violations == 0);
      CHECK(lb.max_excess <= 1e-9);
      auto t = check_tightness(50, kind, 123);
      CHECK(t.checks == 50);
      CHECK(t.violations == 0);
    }
  }

  TEST_CASE("random_chain examples") {
    auto c = random_chain({3, 3, 3}, 42);
    auto d = random_chain({3, 3, 3}, 42);
    CHECK(joint_a_h(c).cells().size() == 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(joint_a_h(c).cells()[i] == joint_a_h(d).cells()[i]);
    CHECK(code_of([] { (void)random_chain({7, 3, 3}, 1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)random_chain({3, 1, 3}, 1); }) == ErrorCode::InvalidArgument);

    auto ident = random_chain({4, 4, 4}, 9);
    ident.to_a = Channel::identity(4);
    auto ja = joint_a_h(ident), js = joint_astar_h(ident);
    for (std::size_t i = 0; i < 16; ++i) CHECK(ja.cells()[i] == js.cells()[i]);
    for (auto kind : kAllKinds) CHECK(std::abs(theorem1_gap(ident, kind)) <= 1e-9);

    auto flat = random_chain({4, 3, 5}, 10);
    flat.to_a = Channel::uniform(3, 5);
    for (auto kind : kAllKinds) {
      CHECK(std::abs(f_mutual_information(joint_a_h(flat), kind)) <= 1e-12);
      CHECK(std::abs(optimal_variational_information(joint_a_h(flat), kind)) <= 1e-12);
      CHECK(theorem1_gap(flat, kind) >= 0);
    }
  }

  TEST_CASE("conditional independence of A and h given A*") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ChainSizes sz{2 + seed % 5, 2 + (seed / 2) % 5, 2 + (seed / 3) % 5};
      auto c = random_chain(sz, seed);
      auto p = joint_a_h_astar(c);
      for (std::size_t s = 0; s < sz.astar; ++s) {
        double ps = 0;
        for (std::size_t a = 0; a < sz.a; ++a)
          for (std::size_t h = 0; h < sz.h; ++h) ps += p[(a * sz.h + h) * sz.astar + s];
        for (std::size_t a = 0; a < sz.a; ++a) {
          for (std::size_t h = 0; h < sz.h; ++h) {
            double pa = 0, ph = 0;
            for (std::size_t x = 0; x < sz.h; ++x) pa += p[(a * sz.h + x) * sz.astar + s];
            for (std::size_t x = 0; x < sz.a; ++x) ph += p[(x * sz.h + h) * sz.astar + s];
            CHECK(std::abs(p[(a * sz.h + h) * sz.astar + s] / ps - (pa / ps) * (ph / ps)) <= 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("verify_theorem1: DPI holds; OpenMP equals serial; JSON shape") {
    for (auto kind : kAllKinds) {
      auto r = verify_theorem1(500, {4, 4, 4}, kind, 7);
      CHECK(r.trials == 500);
      CHECK(r.fraction_satisfied == 1.0);
      CHECK(r.min_gap >= -1e-9);
      auto s = verify_theorem1_serial(500, {4, 4, 4}, kind, 7);
      CHECK(s.fraction_satisfied == r.fraction_satisfied);
      CHECK(s.min_gap == r.min_gap);
    }
    auto j = nlohmann::json::parse(verify_theorem1(10, {3, 3, 3}, DivergenceKind::JS, 1).to_json());
    CHECK(j["kind"] == "js");
    CHECK(j["trials"] == 10);
    CHECK(j["seed"] == 1);
    CHECK(j.contains("fraction_satisfied"));
    CHECK(j.contains("min_gap"));
  }
}
