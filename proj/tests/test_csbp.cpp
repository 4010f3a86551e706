#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqg/csbp.hpp"
#include "lqg/parallel.hpp"
#include "lqg/stable.hpp"
#include "lqg/stats.hpp"

using namespace lqg;

TEST_CASE("u_t closed form") {
  CHECK(csbp_u(1.0, 1.0, 1.5) == doctest::Approx(4.0 / 9.0));
  CHECK(csbp_u(2.5, 0.0, 1.5) == doctest::Approx(2.5));
  // lambda -> infinity limit at alpha = 3/2 is 4/t^2
  CHECK(csbp_u_infinity(2.0, 1.5) == doctest::Approx(1.0));
  CHECK(csbp_u(1e14, 2.0, 1.5) == doctest::Approx(csbp_u_infinity(2.0, 1.5)).epsilon(1e-4));
}

TEST_CASE("u_t solves du/dt = -u^alpha (finite differences)") {
  const double h = 1e-5;
  for (double alpha : {1.3, 1.5, 1.8}) {
    for (double lam : {0.5, 1.0, 2.0}) {
      for (double t : {0.1, 1.0, 3.0}) {
        const double du = (csbp_u(lam, t + h, alpha) - csbp_u(lam, t - h, alpha)) / (2 * h);
        const double rhs = -std::pow(csbp_u(lam, t, alpha), alpha);
        CHECK(std::fabs(du - rhs) / std::fabs(rhs) < 1e-6);
      }
    }
  }
}

TEST_CASE("extinction closed form") {
  CHECK(extinction_probability(1.0, 2.0, 1.5) == doctest::Approx(std::exp(-1.0)));
  CHECK(extinction_probability(0.0, 1.0, 1.5) == doctest::Approx(1.0));
  CHECK(csbp_phi(8.0, 1.5) == doctest::Approx(4.0));
}

TEST_CASE("lamperti transform of a constant path is a linear time change") {
  CadlagPath x;
  x.dt = 0.01;
  x.values.assign(101, 2.0);
  auto y = csbp_from_levy(x);
  for (double v : y.values) CHECK(v == 2.0);
  // clock: s(t) = t / 2, so the CSBP horizon is half the Levy horizon
  CHECK(y.dt * static_cast<double>(y.values.size() - 1) ==
        doctest::Approx(0.5 * x.dt * 100).epsilon(0.01));
  auto back = levy_from_csbp(y, x.dt);
  for (double v : back.values) CHECK(v == 2.0);
}

TEST_CASE("lamperti round-trip on 100 random stable paths is grid-exact") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  std::size_t checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(derive_stream(31, {1, trial}));
    auto x = sample_stable_path(spec, 1.0 + rng.uniform(), 0.5, 1e-3, 1e-2, rng);
    auto y = csbp_from_levy(x);
    auto back = levy_from_csbp(y, x.dt);
    REQUIRE(back.values.size() >= x.values.size() - 1);
    const std::size_t n = std::min(back.values.size(), x.values.size());
    for (std::size_t i = 0; i < n; ++i) {
      // values agree exactly up to one grid cell of time misalignment
      const bool hit = (back.values[i] == x.values[i]) ||
                       (i > 0 && back.values[i] == x.values[i - 1]) ||
                       (i + 1 < x.values.size() && back.values[i] == x.values[i + 1]);
      REQUIRE(hit);
      ++checked;
    }
    // jump times match within one grid cell
    REQUIRE(back.jumps.size() >= x.jumps.size());
    std::size_t bi = 0;
    for (const auto& j : x.jumps) {
      bool found = false;
      for (; bi < back.jumps.size(); ++bi) {
        if (std::fabs(back.jumps[bi].time - j.time) <= x.dt + 1e-12) {
          found = true;
          ++bi;
          break;
        }
      }
      REQUIRE(found);
    }
  }
  CHECK(checked > 100 * 400);
}

TEST_CASE("transition Laplace transform matches exp(-y0 u_t(lambda))") {
  const std::size_t paths = 20000;
  const double times[2] = {0.5, 1.0};
  for (double y0 : {0.5, 1.0, 2.0}) {
    std::vector<double> y_half(paths), y_one(paths);
    parallel_for(paths, 0, [&](std::size_t i) {
      Rng rng(derive_stream(31, {2, static_cast<std::int64_t>(i), static_cast<std::int64_t>(y0 * 2)}));
      CsbpSpec spec{1.5, y0};
      CsbpSimOptions opt;
      opt.dtau = 2e-4;
      auto r = simulate_csbp(spec, times, opt, rng);
      y_half[i] = r.y_at[0];
      y_one[i] = r.y_at[1];
    });
    for (double lam : {0.5, 1.0, 2.0}) {
      auto rows1 = laplace_compare(y_half, {&lam, 1},
                                   [&](double l) { return std::exp(-y0 * csbp_u(l, 0.5, 1.5)); });
      auto rows2 = laplace_compare(y_one, {&lam, 1},
                                   [&](double l) { return std::exp(-y0 * csbp_u(l, 1.0, 1.5)); });
      CHECK(std::fabs(rows1[0].z) < 3.5);
      CHECK(std::fabs(rows2[0].z) < 3.5);
    }
  }
}

TEST_CASE("branching property: y0 = a + b equals sum of independent copies") {
  const std::size_t paths = 6000;
  const double times[1] = {1.0};
  std::vector<double> whole(paths), split(paths);
  parallel_for(paths, 0, [&](std::size_t i) {
    CsbpSimOptions opt;
    Rng r1(derive_stream(31, {3, static_cast<std::int64_t>(i)}));
    Rng r2(derive_stream(31, {4, static_cast<std::int64_t>(i)}));
    Rng r3(derive_stream(31, {5, static_cast<std::int64_t>(i)}));
    whole[i] = simulate_csbp(CsbpSpec{1.5, 1.5}, times, opt, r1).y_at[0];
    split[i] = simulate_csbp(CsbpSpec{1.5, 1.0}, times, opt, r2).y_at[0] +
               simulate_csbp(CsbpSpec{1.5, 0.5}, times, opt, r3).y_at[0];
  });
  auto ks = ks_test_two_sample(whole, split);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("extinction frequency matches exp(-4 y0 / v^2)") {
  const std::size_t paths = 20000;
  std::vector<double> zeta(paths);
  parallel_for(paths, 0, [&](std::size_t i) {
    Rng rng(derive_stream(31, {6, static_cast<std::int64_t>(i)}));
    CsbpSimOptions opt;
    opt.max_time = 8.0;
    zeta[i] = simulate_csbp(CsbpSpec{1.5, 1.0}, {}, opt, rng).extinction_time;
  });
  for (double v : {1.0, 2.0, 4.0}) {
    std::size_t cnt = 0;
    for (double z : zeta) cnt += (z >= 0 && z <= v);
    const double p_emp = static_cast<double>(cnt) / paths;
    const double p = extinction_probability(1.0, v, 1.5);
    const double se = std::sqrt(p * (1 - p) / paths);
    CHECK(std::fabs(p_emp - p) < 3.5 * se);
  }
}

TEST_CASE("exponential integral of the extinction law") {
  Rng rng(derive_stream(31, {7}));
  CsbpSimOptions opt;
  opt.max_time = 400.0;
  auto cmp = exponential_integral_check(1.0, 8.0, 1.5, 20000, rng, opt);
  CHECK(cmp.closed_form == doctest::Approx(std::exp(-4.0)));
  CHECK(std::fabs(cmp.z) < 3.5);
  // doubling y0 doubles the log of the closed form exactly
  const double c1 = std::exp(-csbp_phi(8.0, 1.5) * 2.0);
  CHECK(std::log(c1) == doctest::Approx(2.0 * std::log(cmp.closed_form)));
}

TEST_CASE("csbp_scaling maps paths exactly and preserves the law") {
  // beta = 1 identity, beta = 4 scales y0 by 1/16 at alpha = 3/2
  CadlagPath y;
  y.dt = 0.01;
  y.alpha = 1.5;
  y.values = {1.0, 1.2, 0.9};
  auto same = csbp_scaling(y, 1.0);
  CHECK(same.values == y.values);
  auto scaled = csbp_scaling(y, 4.0);
  CHECK(scaled.values[0] == doctest::Approx(1.0 / 16.0));
  CHECK(scaled.dt == doctest::Approx(y.dt / 4.0));

  // law preservation: scaled simulation vs direct simulation from scaled start
  const std::size_t paths = 6000;
  const double beta = 4.0;
  std::vector<double> a(paths), b(paths);
  parallel_for(paths, 0, [&](std::size_t i) {
    CsbpSimOptions opt;
    Rng r1(derive_stream(31, {8, static_cast<std::int64_t>(i)}));
    Rng r2(derive_stream(31, {9, static_cast<std::int64_t>(i)}));
    const double tgrid[1] = {1.0};
    // Y~_1 = beta^{-2} Y_{beta} from y0 = 1
    const double tbeta[1] = {beta};
    a[i] = std::pow(beta, -2.0) * simulate_csbp(CsbpSpec{1.5, 1.0}, tbeta, opt, r1).y_at[0];
    b[i] = simulate_csbp(CsbpSpec{1.5, std::pow(beta, -2.0)}, tgrid, opt, r2).y_at[0];
  });
  auto ks = ks_test_two_sample(a, b);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("one-step mean change: martingale and boundedness plateau") {
  Rng rng(derive_stream(31, {10}));
  CsbpSimOptions opt;
  opt.dtau = 2e-4;
  CHECK(csbp_one_step_mean_change(0.0, 1.5, 1000, rng, opt) == 0.0);

  const std::size_t paths = 4000;
  std::vector<double> diffs(paths);
  parallel_for(paths, 0, [&](std::size_t i) {
    Rng r(derive_stream(31, {11, static_cast<std::int64_t>(i)}));
    const double t1[1] = {1.0};
    diffs[i] = simulate_csbp(CsbpSpec{1.5, 1.0}, t1, opt, r).y_at[0] - 1.0;
  });
  const double m = mean(diffs);
  const double se = std::sqrt(sample_variance(diffs) / paths);
  CHECK(std::fabs(m) < 3.5 * se);
}

TEST_CASE("agreement between recorded-path lamperti and the distance clock") {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  Rng rng(derive_stream(31, {12}));
  auto x = sample_stable_path(spec, 1.0, 0.5, 1e-3, 1e-2, rng);
  auto clock = lamperti_clock(x);
  // same left-endpoint formula computed directly
  double acc = 0;
  for (std::size_t i = 0; i + 1 < x.values.size(); ++i) {
    CHECK(clock[i] == acc);
    acc += x.dt / x.values[i];
  }
}
