#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "fewl/core/error.hpp"
#include "fewl/scoring/config.hpp"
#include "fewl/scoring/fewl.hpp"
#include "fewl/util/rng.hpp"

using namespace fewl;

namespace {

// Unit vector at cosine `c` from e1 in the plane.
EmbeddingVector at(double c) { return EmbeddingVector({c, std::sqrt(std::max(0.0, 1 - c * c))}); }
const EmbeddingVector kY({1.0, 0.0});

ReferenceContext ref(const std::string& id, double sim, std::vector<double> neighbor_sims, double raw = 0,
                     double lambda = 1) {
  ReferenceContext r;
  r.reference_id = id;
  r.answer = at(sim);
  r.raw_expertise = raw;
  r.lambda = lambda;
  for (double s : neighbor_sims) r.neighbor_answers.push_back(at(s));
  return r;
}

ScoringConfig config(DivergenceKind kind, bool penalty = true) {
  ScoringConfig c;
  c.divergence = kind;
  c.penalty_enabled = penalty;
  return c;
}

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

TEST_SUITE("scoring") {
  TEST_CASE("raw_expertise examples") {
    std::vector<EmbeddingVector> co = {at(0.8), at(0.6)};
    std::vector<EmbeddingVector> iw = {at(0.3), at(0.5)};
    CHECK(raw_expertise(kY, iw, co) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(raw_expertise(kY, co, co) == 0.0);
    CHECK(code_of([&] { (void)raw_expertise(kY, {}, co); }) == ErrorCode::EmptyContrastiveSet);
    CHECK(code_of([&] { (void)raw_expertise(kY, iw, {}); }) == ErrorCode::EmptyContrastiveSet);

    const std::string co1 = "Consuming watermelon seeds does not pose a threat of poisoning.";
    auto r = mock_embed(co1, 256, 0);
    std::vector<EmbeddingVector> mco = {mock_embed(co1, 256, 0)};
    std::vector<EmbeddingVector> miw = {mock_embed("Quarterly tax filings are due in April.", 256, 0)};
    CHECK(raw_expertise(r, miw, mco) > 0);
  }

  TEST_CASE("ideal_raw_expertise examples") {
    std::vector<EmbeddingVector> good = {at(0.9)}, bad = {at(0.2)};
    CHECK(ideal_raw_expertise(kY, good, bad) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(ideal_raw_expertise(kY, good, good) == 0.0);
    CHECK(code_of([&] { (void)ideal_raw_expertise(kY, {}, bad); }) == ErrorCode::MissingLabels);
  }

  TEST_CASE("lambda_weights examples") {
    std::vector<double> z = {0, 0};
    auto w = lambda_weights(z, 1.0);
    CHECK(w.lambda == std::vector<double>{0.5, 0.5});
    std::vector<double> one = {1, 0};
    w = lambda_weights(one, 1.0);
    CHECK(w.lambda[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
    CHECK(w.lambda[1] == doctest::Approx(0.2689414213699951).epsilon(1e-14));
    std::vector<double> three = {0.3, 0.1, -0.2};
    w = lambda_weights(three, 1.0);
    CHECK(w.lambda[0] == doctest::Approx(0.41232668557957835).epsilon(1e-12));
    CHECK(w.lambda[1] == doctest::Approx(0.33758453779871642).epsilon(1e-12));
    CHECK(w.lambda[2] == doctest::Approx(0.25008877662170523).epsilon(1e-12));
    std::vector<double> single = {-1.7};
    CHECK(lambda_weights(single, 0.3).lambda == std::vector<double>{1.0});
    CHECK(w.raw == three);
    CHECK(w.temperature == 1.0);
  }

  TEST_CASE("lambda simplex, monotonicity and argmax invariance") {
    util::SplitMix64 rng(31);
    for (int t = 0; t < 2000; ++t) {
      const std::size_t n = 1 + rng.below(8);
      std::vector<double> raw(n);
      for (auto& r : raw) r = rng.uniform(-2, 2);
      if (n > 2 && rng.below(4) == 0) raw[1] = raw[0];  // exercise ties
      const double tau = std::vector<double>{0.05, 0.1, 1, 10, 100}[rng.below(5)];
      auto w = lambda_weights(raw, tau);
      CHECK(std::accumulate(w.lambda.begin(), w.lambda.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(w.lambda[i] > 0.0);
        CHECK(w.lambda[i] <= 1.0);
        for (std::size_t j = 0; j < n; ++j) {
          if (raw[i] > raw[j]) CHECK(w.lambda[i] > w.lambda[j]);
          if (raw[i] == raw[j]) CHECK(w.lambda[i] == w.lambda[j]);
        }
      }
      const double rmax = *std::max_element(raw.begin(), raw.end());
      const double lmax = *std::max_element(w.lambda.begin(), w.lambda.end());
      for (std::size_t i = 0; i < n; ++i) CHECK((raw[i] == rmax) == (w.lambda[i] == lmax));
    }
  }

  TEST_CASE("lambda survives extreme raw values") {
    std::vector<double> raw = {2, -2};
    auto w = lambda_weights(raw, 1e-3);
    CHECK(w.lambda[0] == 1.0);
    CHECK(std::isfinite(w.lambda[1]));
  }

  TEST_CASE("uniform weights are exactly 1/N") {
    for (std::size_t n = 1; n <= 9; ++n) {
      std::vector<double> raw(n, 0.3);
      for (double l : uniform_weights(raw).lambda) CHECK(l == 1.0 / static_cast<double>(n));
    }
  }

  TEST_CASE("laziness_penalty_mean examples") {
    std::vector<EmbeddingVector> two = {at(0.1), at(0.2)};
    CHECK(laziness_penalty_mean(kY, two).value == doctest::Approx(0.15).epsilon(1e-12));
    auto none = laziness_penalty_mean(kY, {});
    CHECK(none.value == 0.0);
    CHECK(none.empty);
    std::vector<EmbeddingVector> sym = {at(-0.5), at(0.5)};
    CHECK(laziness_penalty_mean(kY, sym).value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(laziness_penalty_mean(kY, sym).empty);
  }

  TEST_CASE("fewl_score worked examples against long-double oracles") {
    std::vector<ReferenceContext> refs = {ref("h", 0.9, {0.1, 0.2})};
    const auto tv = fewl_score(kY, refs, config(DivergenceKind::TV));
    const long double tv_oracle = std::tanh(0.9L) / 2 - std::tanh(0.15L) / 2;  // 0.2837064...
    CHECK(tv.value == doctest::Approx(double(tv_oracle)).epsilon(1e-12));
    CHECK(std::abs(tv.value - 0.2837064182878532) < 1e-12);

    const auto kl = fewl_score(kY, refs, config(DivergenceKind::KL));
    CHECK(std::abs(kl.value - 0.47259) < 1e-5);
    CHECK(kl.value == doctest::Approx(double(0.9L - std::exp(0.15L - 1))).epsilon(1e-12));

    std::vector<ReferenceContext> zero = {ref("h", 0.0, {0.0})};
    CHECK(fewl_score(kY, zero, config(DivergenceKind::TV)).value == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("fewl_score decomposition and metadata") {
    std::vector<ReferenceContext> refs = {ref("a", 0.9, {0.1, 0.2}, 0, 0.6), ref("b", 0.4, {0.3}, 0, 0.4)};
    for (auto kind : {DivergenceKind::TV, DivergenceKind::JS, DivergenceKind::KL}) {
      auto s = fewl_score(kY, refs, config(kind), "digest-x");
      CHECK(s.config_digest == "digest-x");
      CHECK(s.divergence == kind);
      REQUIRE(s.per_reference.size() == 2);
      CHECK(s.per_reference[0].reference_id == "a");
      CHECK(s.per_reference[0].lambda == 0.6);
      CHECK(s.per_reference[0].similarity == doctest::Approx(0.9).epsilon(1e-12));
      CHECK(s.per_reference[1].penalty_mean == doctest::Approx(0.3).epsilon(1e-12));
      CHECK(s.per_reference[0].weighted_truthfulness_term == g_star(kind, 0.6 * s.per_reference[0].similarity));
      CHECK(std::abs(s.value - s.recompute()) <= 1e-9);
      const double manual = 0.5 * ((g_star(kind, 0.6 * s.per_reference[0].similarity) -
                                    f_star(kind, g_star(kind, s.per_reference[0].penalty_mean))) +
                                   (g_star(kind, 0.4 * s.per_reference[1].similarity) -
                                    f_star(kind, g_star(kind, s.per_reference[1].penalty_mean))));
      CHECK(s.value == doctest::Approx(manual).epsilon(1e-14));
    }
  }

  TEST_CASE("empty neighbour set: zero penalty with warning") {
    std::vector<ReferenceContext> refs = {ref("h", 0.9, {})};
    auto s = fewl_score(kY, refs, config(DivergenceKind::TV));
    CHECK(s.empty_penalty_warning);
    CHECK(s.value == doctest::Approx(std::tanh(0.9) / 2).epsilon(1e-14));
  }

  TEST_CASE("penalty monotonicity (TV): strictly decreasing in each neighbour similarity") {
    util::SplitMix64 rng(8);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> sims(1 + rng.below(5));
      for (auto& s : sims) s = rng.uniform(-0.9, 0.9);
      const std::size_t k = rng.below(sims.size());
      auto bumped = sims;
      bumped[k] += 0.05;
      std::vector<ReferenceContext> a = {ref("h", 0.7, sims)}, b = {ref("h", 0.7, bumped)};
      CHECK(fewl_score(kY, b, config(DivergenceKind::TV)).value < fewl_score(kY, a, config(DivergenceKind::TV)).value);
    }
  }

  TEST_CASE("truthfulness monotonicity: strictly increasing in cos(y, h_i) for every kind") {
    util::SplitMix64 rng(13);
    for (auto kind : {DivergenceKind::TV, DivergenceKind::JS, DivergenceKind::KL}) {
      for (int t = 0; t < 100; ++t) {
        const double s1 = rng.uniform(-0.95, 0.9);
        const double s2 = s1 + rng.uniform(0.01, 0.05);
        const double lam = rng.uniform(0.05, 1);
        std::vector<ReferenceContext> a = {ref("h", s1, {0.3}, 0, lam), ref("g", 0.5, {0.2}, 0, 1 - lam)};
        std::vector<ReferenceContext> b = {ref("h", s2, {0.3}, 0, lam), ref("g", 0.5, {0.2}, 0, 1 - lam)};
        CHECK(fewl_score(kY, b, config(kind)).value > fewl_score(kY, a, config(kind)).value);
      }
    }
  }

  TEST_CASE("penalty disabled: independent of the neighbour set") {
    std::vector<ReferenceContext> a = {ref("h", 0.6, {0.1, 0.7, 0.3})};
    std::vector<ReferenceContext> b = {ref("h", 0.6, {0.3, 0.1})};
    std::vector<ReferenceContext> c = {ref("h", 0.6, {})};
    auto cfg = config(DivergenceKind::JS, false);
    const double va = fewl_score(kY, a, cfg).value;
    CHECK(va == fewl_score(kY, b, cfg).value);
    CHECK(va == fewl_score(kY, c, cfg).value);
    CHECK_FALSE(fewl_score(kY, c, cfg).empty_penalty_warning);
  }

  TEST_CASE("baseline modes") {
    ReferenceBundle bundle;
    bundle.references = {ref("a", 0.9, {0.1, 0.2}, 0.3), ref("b", 0.5, {0.4}, 0.1)};
    for (double s : {0.9, 0.8, 0.7, 0.6, 0.5}) bundle.samples.push_back(ref("a#s", s, {0.2}));

    ScoringConfig single = config(DivergenceKind::TV, false);
    single.reference_mode = ReferenceMode::SingleModel;
    auto s = baseline_score(kY, bundle, single);
    CHECK(s.value == doctest::Approx(double(std::tanh(0.9L) / 2)).epsilon(1e-12));
    CHECK(std::abs(s.value - 0.3581489350995122) < 1e-12);
    CHECK(s.per_reference[0].lambda == 1.0);

    single.single_reference = "b";
    CHECK(baseline_score(kY, bundle, single).per_reference[0].reference_id == "b");
    single.single_reference = "zzz";
    CHECK(code_of([&] { (void)baseline_score(kY, bundle, single); }) == ErrorCode::ConfigError);

    ScoringConfig best = config(DivergenceKind::TV, false);
    best.reference_mode = ReferenceMode::SingleBest;
    CHECK(baseline_score(kY, bundle, best).per_reference[0].reference_id == "a");
    bundle.references[1].raw_expertise = 0.3;  // tie: lowest index wins
    CHECK(baseline_score(kY, bundle, best).per_reference[0].reference_id == "a");

    ScoringConfig multi = config(DivergenceKind::TV, false);
    multi.reference_mode = ReferenceMode::MultiSample;
    auto m = baseline_score(kY, bundle, multi);
    REQUIRE(m.per_reference.size() == 5);
    double expect = 0;
    for (double sim : {0.9, 0.8, 0.7, 0.6, 0.5}) expect += std::tanh(0.2 * sim) / 2;
    CHECK(m.value == doctest::Approx(expect / 5).epsilon(1e-12));
    for (const auto& r : m.per_reference) CHECK(r.lambda == 0.2);

    ScoringConfig uni = config(DivergenceKind::TV);
    uni.lambda_mode = LambdaMode::Uniform;
    for (const auto& r : baseline_score(kY, bundle, uni).per_reference) CHECK(r.lambda == 0.5);

    ScoringConfig ideal = config(DivergenceKind::TV);
    ideal.lambda_mode = LambdaMode::Ideal;
    CHECK(code_of([&] { (void)baseline_score(kY, bundle, ideal); }) == ErrorCode::MissingLabels);
    bundle.references[0].ideal_raw_expertise = 1.0;
    bundle.references[1].ideal_raw_expertise = 0.0;
    auto id = baseline_score(kY, bundle, ideal);
    CHECK(id.per_reference[0].lambda == doctest::Approx(0.7310585786300049).epsilon(1e-14));

    ScoringConfig est = config(DivergenceKind::TV);
    bundle.references[1].raw_expertise = 0.1;
    auto e = baseline_score(kY, bundle, est);
    CHECK(e.per_reference[0].lambda == doctest::Approx(std::exp(0.3) / (std::exp(0.3) + std::exp(0.1))).epsilon(1e-14));
  }

  TEST_CASE("config toml: defaults, required key, bad values") {
    auto doc = util::TomlDocument::parse("[scoring]\ndivergence = \"js\"\n");
    auto c = ScoringConfig::from_toml(doc);
    CHECK(c.divergence == DivergenceKind::JS);
    CHECK(c.n_contrastive == 25);
    CHECK(c.n_neighbors == 10);
    CHECK(c.neighbor_lo == 0.2);
    CHECK(c.neighbor_hi == 0.8);
    CHECK(c.random_pool_count == 25);
    CHECK(c.random_pool_hi == 0.8);
    CHECK(c.temperature_tau == 1.0);
    CHECK(c.penalty_enabled);

    try {
      (void)ScoringConfig::from_toml(util::TomlDocument::parse("[scoring]\nn_neighbors = 3\n"));
      FAIL("expected ConfigError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      CHECK(e.subject() == "scoring.divergence");
      CHECK(std::string(e.what()).find("scoring.divergence") != std::string::npos);
    }
    auto bad = [](const std::string& line) {
      return code_of([&] {
        (void)ScoringConfig::from_toml(util::TomlDocument::parse("[scoring]\ndivergence = \"tv\"\n" + line + "\n"));
      });
    };
    CHECK(bad("temperature_tau = 0") == ErrorCode::ConfigError);
    CHECK(bad("neighbor_bounds = [0.8, 0.2]") == ErrorCode::ConfigError);
    CHECK(bad("lambda_mode = \"magic\"") == ErrorCode::ConfigError);
    CHECK(bad("ablations = [\"nope\"]") == ErrorCode::ConfigError);
    CHECK_NOTHROW(ScoringConfig::from_toml(util::TomlDocument::parse("[scoring]\ndivergence = \"tv\"\nnote = 1\n")));
  }

  TEST_CASE("config digest is stable and sensitive") {
    ScoringConfig a, b;
    CHECK(a.digest() == b.digest());
    CHECK(a.digest().size() == 64);
    b.seed = 1;
    CHECK_FALSE(a.digest() == b.digest());
    b = a;
    b.ablations = {"ideal_lambda"};
    CHECK_FALSE(a.digest() == b.digest());
  }

  TEST_CASE("ablation cells") {
    ScoringConfig base;
    base.lambda_mode = LambdaMode::Uniform;
    auto cell = ablation_cell("single_penalty", base);
    CHECK(cell.reference_mode == ReferenceMode::SingleModel);
    CHECK(cell.penalty_enabled);
    auto applied = apply_cell(base, ablation_cell("multi_no_penalty", base));
    CHECK(applied.reference_mode == ReferenceMode::MultiSample);
    CHECK_FALSE(applied.penalty_enabled);
    CHECK(apply_cell(base, ablation_cell("fewl_no_penalty", base)).lambda_mode == LambdaMode::Uniform);
    CHECK(apply_cell(base, ablation_cell("ideal_lambda", base)).lambda_mode == LambdaMode::Ideal);
    CHECK(apply_cell(base, ablation_cell("single_best_no_penalty", base)).reference_mode == ReferenceMode::SingleBest);
    CHECK(known_ablations().size() == 8);
    CHECK_THROWS_AS(ablation_cell("bogus", base), Error);
  }
}
