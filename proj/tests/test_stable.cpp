#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqg/parallel.hpp"
#include "lqg/stable.hpp"
#include "lqg/stats.hpp"

using namespace lqg;

TEST_CASE("spec validation") {
  StableSpec bad{1.0, JumpSide::upward, 1.0};
  CHECK_THROWS(bad.check());
  StableSpec ok{1.5, JumpSide::upward, 1.0};
  CHECK_NOTHROW(ok.check());
  // unit-scale coefficient makes psi(lambda) = lambda^alpha
  StableSpec unit{1.5, JumpSide::downward, StableSpec::unit_scale_coefficient(1.5)};
  CHECK(unit.levy_scale() == doctest::Approx(1.0));
}

TEST_CASE("jump count in [1,2] over unit time is Poisson(2/3 (1 - 2^-3/2))") {
  StableSpec spec{1.5, JumpSide::downward, 1.0};
  const double mean_target = spec.jump_count_mean(1.0, 2.0, 1.0);
  CHECK(mean_target == doctest::Approx((2.0 / 3.0) * (1.0 - std::pow(2.0, -1.5))));

  const std::size_t paths = 4000;
  std::vector<double> counts(paths, 0.0);
  parallel_for(paths, 0, [&](std::size_t i) {
    Rng rng(derive_stream(21, {1, static_cast<std::int64_t>(i)}));
    auto p = sample_stable_path(spec, 0.0, 1.0, 1e-3, 0.25, rng);
    int c = 0;
    for (const auto& j : p.jumps) {
      const double s = std::fabs(j.size);
      if (s >= 1.0 && s < 2.0) ++c;
    }
    counts[i] = c;
  });
  const double m = mean(counts);
  const double se = std::sqrt(sample_variance(counts) / static_cast<double>(paths));
  CHECK(std::fabs(m - mean_target) < 3.0 * se + 1e-12);
}

TEST_CASE("T -> 0 degenerates to the constant path") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  Rng rng(derive_stream(21, {2}));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto p = sample_stable_path(spec, 2.0, 1e-6, 1e-7, 1e-4, rng);
    for (double v : p.values) worst = std::max(worst, std::fabs(v - 2.0));
  }
  CHECK(worst < 0.05);
}

TEST_CASE("compensated path is a martingale") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  const std::size_t paths = 20000;
  std::vector<double> ends(paths, 0.0);
  parallel_for(paths, 0, [&](std::size_t i) {
    Rng rng(derive_stream(21, {3, static_cast<std::int64_t>(i)}));
    auto p = sample_stable_path(spec, 1.0, 1.0, 1e-3, 1e-3, rng);
    ends[i] = p.values.back() - 1.0;
  });
  const double m = mean(ends);
  const double se = std::sqrt(sample_variance(ends) / static_cast<double>(paths));
  CHECK(std::fabs(m) < 3.0 * se);
}

TEST_CASE("stable scaling: X_{ct} / c^{1/alpha} has the law of X_t") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  const std::size_t paths = 4000;
  const double c = 4.0;
  std::vector<double> a(paths), b(paths);
  parallel_for(paths, 0, [&](std::size_t i) {
    Rng r1(derive_stream(21, {4, static_cast<std::int64_t>(i)}));
    Rng r2(derive_stream(21, {5, static_cast<std::int64_t>(i)}));
    // self-similar discretization: dt and floor scale with the horizon
    auto p1 = sample_stable_path(spec, 0.0, 1.0, 1e-3, 1e-3, r1);
    auto p2 = sample_stable_path(spec, 0.0, c, c * 1e-3, std::pow(c, 2.0 / 3.0) * 1e-3, r2);
    a[i] = p1.values.back();
    b[i] = p2.values.back() / std::pow(c, 2.0 / 3.0);
  });
  auto ks = ks_test_two_sample(a, b);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("supremum tail bound and the exponential law at Exp(1) times") {
  // unit scale: psi(lambda) = lambda^{3/2}, Phi(1) = 1
  StableSpec spec{1.5, JumpSide::downward, StableSpec::unit_scale_coefficient(1.5)};
  CHECK(supremum_tail_bound(spec, 1.0, 0.0) == doctest::Approx(1.0));

  const std::size_t paths = 4000;
  std::vector<double> sups(paths, 0.0);
  parallel_for(paths, 0, [&](std::size_t i) {
    Rng rng(derive_stream(21, {6, static_cast<std::int64_t>(i)}));
    const double tau = rng.exponential();
    const double dt = 2e-4;
    StableStepper stepper(spec, 1e-3);
    const auto n = static_cast<std::size_t>(std::ceil(tau / dt));
    double x = 0, sup = 0;
    for (std::size_t s = 0; s < n; ++s) {
      double js = 0;
      x += stepper.step(dt, rng, &js) + js;
      sup = std::max(sup, x);
    }
    sups[i] = sup;
  });
  // S_{tau(1)} ~ Exp(Phi(1)) = Exp(1)
  const double rate = 1.0 / mean(sups);
  CHECK(std::fabs(rate - 1.0) < 0.05);
  auto ks = ks_test(sups, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("empirical supremum tail sits under e exp(-u) at unit scale") {
  StableSpec spec{1.5, JumpSide::downward, StableSpec::unit_scale_coefficient(1.5)};
  Rng rng(derive_stream(21, {7}));
  for (double u : {2.0, 4.0, 6.0}) {
    const double p = empirical_supremum_tail(spec, 1.0, u, 3000, 5e-4, 1e-3, rng);
    const double bound = supremum_tail_bound(spec, 1.0, u);
    const double se = std::sqrt(bound * (1 - bound) / 3000.0);
    CHECK(p <= bound + 3 * se);
  }
}

TEST_CASE("condition_nonnegative never goes negative and is consistent with rejection") {
  StableSpec spec{1.5, JumpSide::downward, 1.0};
  const std::size_t paths = 1500;
  std::vector<double> conditioned(paths), manual;
  parallel_for(paths, 0, [&](std::size_t i) {
    Rng rng(derive_stream(21, {8, static_cast<std::int64_t>(i)}));
    auto p = condition_nonnegative(spec, 1.0, 0.5, 1e-3, 1e-3, rng);
    for (double v : p.values) REQUIRE(v >= 0.0);
    conditioned[i] = p.values.back();
  });
  // independent rejection oracle: unconditioned paths restricted to the event
  Rng rng(derive_stream(21, {9}));
  while (manual.size() < paths) {
    auto p = sample_stable_path(spec, 1.0, 0.5, 1e-3, 1e-3, rng);
    bool ok = true;
    for (double v : p.values) {
      if (v < 0) {
        ok = false;
        break;
      }
    }
    if (ok) manual.push_back(p.values.back());
  }
  auto ks = ks_test_two_sample(conditioned, manual);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("acceptance rate of the nonnegative conditioning approaches 1 for large x0") {
  StableSpec spec{1.5, JumpSide::downward, 1.0};
  Rng rng(derive_stream(21, {10}));
  std::size_t ok = 0;
  const std::size_t n = 300;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = sample_stable_path(spec, 50.0, 0.25, 1e-3, 1e-3, rng);
    bool pos = true;
    for (double v : p.values) pos &= (v >= 0);
    ok += pos;
  }
  CHECK(static_cast<double>(ok) / n > 0.97);
}

TEST_CASE("excursions satisfy the defining invariants") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  Rng rng(derive_stream(21, {11}));
  auto e = sample_excursion(spec, ExcursionConditioning::length_near, 0.5, 0.05, 5e-4, 1e-3, rng);
  CHECK(std::fabs(e.lifetime - 0.5) <= 0.05 * 0.5 + 1e-12);
  std::string why;
  CHECK(e.validate(&why));

  auto e2 = sample_excursion(spec, ExcursionConditioning::max_at_least, 0.4, 0.05, 5e-4, 1e-3, rng);
  double sup = 0;
  for (double v : e2.path.values) sup = std::max(sup, v);
  CHECK(sup >= 0.4);
}

TEST_CASE("time reversal of an excursion is an excursion of the mirrored spec") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  Rng rng(derive_stream(21, {12}));
  auto e = sample_excursion(spec, ExcursionConditioning::length_near, 0.5, 0.05, 5e-4, 1e-3, rng);
  ExcursionSample rev;
  rev.path = time_reverse(e.path);
  rev.lifetime = e.lifetime;
  std::string why;
  CHECK(rev.validate(&why));
  // reversed jumps are downward
  for (const auto& j : rev.path.jumps) CHECK(j.size < 0);
}

TEST_CASE("reverse_exploration_boundary clamps and matches the reversed marginal") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  Rng rng(derive_stream(21, {13}));
  auto e = sample_excursion(spec, ExcursionConditioning::length_near, 0.5, 0.05, 5e-4, 1e-3, rng);
  CHECK(reverse_exploration_boundary(e, 0.0) == 0.0);
  CHECK(reverse_exploration_boundary(e, e.lifetime + 1.0) == 0.0);

  // marginal oracle: two independent batches, value at t vs reversed marginal
  const std::size_t n = 220;
  std::vector<double> direct(n), reversed(n);
  parallel_for(n, 0, [&](std::size_t i) {
    Rng r1(derive_stream(21, {14, static_cast<std::int64_t>(i)}));
    Rng r2(derive_stream(21, {15, static_cast<std::int64_t>(i)}));
    auto ea = sample_excursion(spec, ExcursionConditioning::length_near, 1.0, 0.05, 1e-3, 1e-2,
                               r1, 1e-2);
    auto eb = sample_excursion(spec, ExcursionConditioning::length_near, 1.0, 0.05, 1e-3, 1e-2,
                               r2, 1e-2);
    direct[i] = reverse_exploration_boundary(ea, 0.35);
    reversed[i] = eb.path.value_at(eb.lifetime - 0.35);
  });
  auto ks = ks_test_two_sample(direct, reversed);
  CHECK(ks.p_value > 0.01);
}
