#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqg/rng.hpp"
#include "lqg/stats.hpp"

using namespace lqg;

TEST_CASE("loglog_fit recovers exact powers") {
  std::vector<double> x = {1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(v * v);
  auto f = loglog_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.stderr_slope == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("loglog_fit of a constant has slope 0") {
  std::vector<double> x = {1, 2, 4, 8};
  std::vector<double> y = {3, 3, 3, 3};
  auto f = loglog_fit(x, y);
  CHECK(f.slope == doctest::Approx(0.0));
}

TEST_CASE("loglog_fit rejects nonpositive inputs") {
  std::vector<double> x = {1, 2, -4};
  std::vector<double> y = {1, 1, 1};
  CHECK_THROWS(loglog_fit(x, y));
}

TEST_CASE("loglog_fit recovers 2/3 under multiplicative noise") {
  Rng rng(derive_stream(5, {0}));
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    const double xv = std::pow(10.0, i / 49.0 * 3.0);
    x.push_back(xv);
    y.push_back(std::pow(xv, 2.0 / 3.0) * (1.0 + 0.05 * rng.normal()));
  }
  auto f = loglog_fit(x, y);
  CHECK(std::fabs(f.slope - 2.0 / 3.0) < 0.05);
}

TEST_CASE("chi2_sf matches known quantiles to 1e-3") {
  // P[chi2_1 > 3.841] = 0.05, P[chi2_5 > 15.086] = 0.01
  CHECK(std::fabs(chi2_sf(3.8415, 1) - 0.05) < 1e-3);
  CHECK(std::fabs(chi2_sf(15.0863, 5) - 0.01) < 1e-3);
  CHECK(std::fabs(chi2_sf(2.7055, 1) - 0.10) < 1e-3);
}

TEST_CASE("kolmogorov tail matches known values to 1e-3") {
  // Q(1.3581) = 0.05, Q(1.6276) = 0.01
  CHECK(std::fabs(kolmogorov_tail(1.3581) - 0.05) < 1e-3);
  CHECK(std::fabs(kolmogorov_tail(1.6276) - 0.01) < 1e-3);
}

TEST_CASE("ks_test calibrated on uniform and normal synthetic data") {
  Rng rng(derive_stream(5, {1}));
  std::vector<double> u(5000), g(5000);
  for (auto& x : u) x = rng.uniform();
  for (auto& x : g) x = rng.normal();
  CHECK(ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value > 0.01);
  CHECK(ks_test(g, [](double x) { return 1.0 - gaussian_upper_tail(x); }).p_value > 0.01);
  // shifted data must be rejected
  for (auto& x : g) x += 0.2;
  CHECK(ks_test(g, [](double x) { return 1.0 - gaussian_upper_tail(x); }).p_value < 0.01);
}

TEST_CASE("gaussian upper tail obeys the Mills-ratio correction") {
  // P[Z >= t] = phi(t)/t (1 - t^-2 + 3 t^-4 - ...); the leading ratio
  // approaches 1 from below at rate t^-2
  for (double t : {4.0, 5.0, 6.0}) {
    const double leading = std::exp(-0.5 * t * t) / (t * std::sqrt(2 * M_PI));
    const double ratio = gaussian_upper_tail(t) / leading;
    CHECK(std::fabs(ratio - (1.0 - 1.0 / (t * t) + 3.0 / (t * t * t * t))) < 0.005);
    CHECK(ratio < 1.0);
  }
  const double r4 = gaussian_upper_tail(4.0) / (std::exp(-8.0) / (4.0 * std::sqrt(2 * M_PI)));
  const double r6 = gaussian_upper_tail(6.0) / (std::exp(-18.0) / (6.0 * std::sqrt(2 * M_PI)));
  CHECK(std::fabs(r6 - 1.0) < std::fabs(r4 - 1.0));  // ratio -> 1
}

TEST_CASE("poisson deviation bound evaluates and dominates the true tail") {
  const double bound = poisson_deviation_bound(10.0, 0.5);
  CHECK(bound == doctest::Approx(0.21574).epsilon(1e-3));
  // true P[Z <= 5], lambda = 10
  double p = std::exp(-10.0), cdf = p;
  for (int k = 1; k <= 5; ++k) {
    p *= 10.0 / k;
    cdf += p;
  }
  CHECK(cdf < bound);
}

TEST_CASE("laplace_compare on degenerate and exponential samples") {
  std::vector<double> zeros(2000, 0.0);
  std::vector<double> lambdas = {0.5, 1.0, 2.0};
  auto rows = laplace_compare(zeros, lambdas, [](double) { return 1.0; });
  for (const auto& r : rows) CHECK(r.empirical == doctest::Approx(1.0));

  Rng rng(derive_stream(5, {2}));
  std::vector<double> expo(20000);
  for (auto& x : expo) x = rng.exponential();
  rows = laplace_compare(expo, lambdas, [](double lam) { return 1.0 / (1.0 + lam); });
  for (const auto& r : rows) {
    CHECK(std::fabs(r.z) < 3.0);
    CHECK(r.stderr_mean > 0);
  }
}

TEST_CASE("holder norm tail: Lipschitz process is flagged non-power-law") {
  auto sampler = [](std::size_t, std::vector<double>& out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = 0.3 * static_cast<double>(i) / static_cast<double>(out.size() - 1);
    }
  };
  std::vector<double> ts = {2, 4, 8};
  auto res = holder_norm_tail(sampler, 200, 0.4, 6, ts);
  CHECK_FALSE(res.power_law);
}

TEST_CASE("holder norm tail: Brownian motion decays fast at gamma_exp 0.4") {
  auto sampler = [](std::size_t trial, std::vector<double>& out) {
    Rng rng(derive_stream(99, {static_cast<std::int64_t>(trial)}));
    const double dt = 1.0 / static_cast<double>(out.size() - 1);
    out[0] = 0;
    for (std::size_t i = 1; i < out.size(); ++i) {
      out[i] = out[i - 1] + std::sqrt(dt) * rng.normal();
    }
  };
  std::vector<double> ts = {2, 3, 4, 6, 8};
  auto res = holder_norm_tail(sampler, 4000, 0.4, 8, ts);
  // Gaussian tails beat any power law: the fitted exponent is at least 4
  CHECK(res.fit.slope <= -4.0);
}
