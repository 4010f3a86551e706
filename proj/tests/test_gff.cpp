#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lqg/gff.hpp"
#include "lqg/parallel.hpp"
#include "lqg/stats.hpp"

using namespace lqg;

namespace {

// direct linear-solve oracle for the torus Green's function: solve
// (1/2pi) L g = delta_x - 1/n^2 by conjugate gradients on the graph
// Laplacian, then Cov(h(x), h(y)) = g(y) with zero-mean convention
std::vector<double> torus_green_column(int n, int sx, int sy) {
  const std::size_t sz = static_cast<std::size_t>(n) * n;
  std::vector<double> b(sz, -1.0 / static_cast<double>(sz));
  b[static_cast<std::size_t>(sy) * n + sx] += 1.0;
  for (auto& v : b) v *= 6.283185307179586;
  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(j) * n + i;
        const double c = x[idx];
        const double nb = x[static_cast<std::size_t>(j) * n + (i + 1) % n] +
                          x[static_cast<std::size_t>(j) * n + (i + n - 1) % n] +
                          x[static_cast<std::size_t>((j + 1) % n) * n + i] +
                          x[static_cast<std::size_t>((j + n - 1) % n) * n + i];
        out[idx] = 4.0 * c - nb;
      }
    }
  };
  std::vector<double> x(sz, 0.0), r = b, p = b, ap(sz);
  double rs = 0;
  for (double v : r) rs += v * v;
  for (int it = 0; it < 4000 && rs > 1e-22; ++it) {
    apply(p, ap);
    double pap = 0;
    for (std::size_t i = 0; i < sz; ++i) pap += p[i] * ap[i];
    const double alpha = rs / pap;
    double rs_new = 0;
    for (std::size_t i = 0; i < sz; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rs_new += r[i] * r[i];
    }
    const double beta = rs_new / rs;
    rs = rs_new;
    for (std::size_t i = 0; i < sz; ++i) p[i] = r[i] + beta * p[i];
  }
  // remove the mean (zero-mean Green's function)
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(sz);
  for (auto& v : x) v -= m;
  return x;
}

}  // namespace

TEST_CASE("torus covariance matches the direct-solve Green's function") {
  const int n = 64;
  Grid grid{n, 1.0 / n, Topology::torus};
  const int sx = n / 2, sy = n / 2;
  const auto green = torus_green_column(n, sx, sy);
  // Var(h(x) - h(y)) = 2 (G(x,x) - G(x,y)); with translation invariance
  // G(x,x) is green at the source
  const int d = n / 4;
  const double gxx = green[static_cast<std::size_t>(sy) * n + sx];
  const double gxy = green[static_cast<std::size_t>(sy) * n + sx + d];
  const double target = 2.0 * (gxx - gxy);

  const std::size_t samples = 10000;
  std::vector<double> diff(samples);
  parallel_for(samples, 0, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             derive_stream(51, {0, static_cast<std::int64_t>(i)}));
    diff[i] = f.at(sx, sy) - f.at(sx + d, sy);
  });
  const double var = sample_variance(diff);
  const double se = var * std::sqrt(2.0 / static_cast<double>(samples));
  CHECK(std::fabs(var - target) < 3.5 * se);
}

TEST_CASE("zero-boundary field has exactly zero boundary cells") {
  Grid grid{64, 1.0 / 64, Topology::box_dirichlet};
  FieldGrid f = sample_gff(grid, Normalization::zero_boundary, derive_stream(51, {1}));
  for (int i = 0; i < 64; ++i) {
    CHECK(f.at(i, 0) == 0.0);
    CHECK(f.at(i, 63) == 0.0);
    CHECK(f.at(0, i) == 0.0);
    CHECK(f.at(63, i) == 0.0);
  }
  // interior is alive
  double mx = 0;
  for (double v : f.values) mx = std::max(mx, std::fabs(v));
  CHECK(mx > 0.1);
}

TEST_CASE("dirichlet covariance matches a direct-solve oracle") {
  // solve (1/2pi) L g = delta on the interior with zero boundary
  const int n = 32;
  const int m = n - 2;
  const int sx = n / 2, sy = n / 2;
  const std::size_t sz = static_cast<std::size_t>(m) * m;
  std::vector<double> b(sz, 0.0);
  b[static_cast<std::size_t>(sy - 1) * m + (sx - 1)] = 6.283185307179586;
  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    auto get = [&](int i, int j) -> double {
      if (i < 0 || j < 0 || i >= m || j >= m) return 0.0;
      return x[static_cast<std::size_t>(j) * m + i];
    };
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        out[static_cast<std::size_t>(j) * m + i] =
            4.0 * get(i, j) - get(i - 1, j) - get(i + 1, j) - get(i, j - 1) - get(i, j + 1);
      }
    }
  };
  std::vector<double> x(sz, 0.0), r = b, p = b, ap(sz);
  double rs = 0;
  for (double v : r) rs += v * v;
  for (int it = 0; it < 3000 && rs > 1e-24; ++it) {
    apply(p, ap);
    double pap = 0;
    for (std::size_t i = 0; i < sz; ++i) pap += p[i] * ap[i];
    const double alpha = rs / pap;
    double rs_new = 0;
    for (std::size_t i = 0; i < sz; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rs_new += r[i] * r[i];
    }
    for (std::size_t i = 0; i < sz; ++i) p[i] = r[i] + (rs_new / rs) * p[i];
    rs = rs_new;
  }
  const double target_var = x[static_cast<std::size_t>(sy - 1) * m + (sx - 1)];

  Grid grid{n, 1.0 / n, Topology::box_dirichlet};
  const std::size_t samples = 20000;
  std::vector<double> vals(samples);
  parallel_for(samples, 0, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::zero_boundary,
                             derive_stream(51, {2, static_cast<std::int64_t>(i)}));
    vals[i] = f.at(sx, sy);
  });
  const double var = sample_variance(vals);
  const double se = var * std::sqrt(2.0 / static_cast<double>(samples));
  CHECK(std::fabs(var - target_var) < 3.5 * se);
}

TEST_CASE("unit-circle-average normalization zeroes the radius-1 average") {
  Grid grid{256, 2.5 / 256, Topology::torus};
  FieldGrid f = sample_gff(grid, Normalization::unit_circle_average, derive_stream(51, {3}));
  CHECK(std::fabs(circle_average(f, Point{0, 0}, 1.0)) < 1e-12);
}

TEST_CASE("circle average of a constant field is the constant") {
  Grid grid{64, 1.0 / 64, Topology::torus};
  FieldGrid f;
  f.grid = grid;
  f.values.assign(64 * 64, 3.25);
  CHECK(circle_average(f, Point{0, 0}, 0.25) == doctest::Approx(3.25).epsilon(1e-14));
  CHECK(circle_average(f, Point{0.1, -0.07}, 0.125) == doctest::Approx(3.25).epsilon(1e-14));
}

TEST_CASE("circle average linearity and log-singularity adjustment") {
  Grid grid{64, 1.0 / 64, Topology::torus};
  FieldGrid f = sample_gff(grid, Normalization::row_mean_zero, derive_stream(51, {4}));
  FieldGrid g = sample_gff(grid, Normalization::row_mean_zero, derive_stream(51, {5}));
  FieldGrid sum = f;
  for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g.values[i];
  const double a = circle_average(f, Point{0, 0}, 0.2);
  const double b = circle_average(g, Point{0, 0}, 0.2);
  CHECK(circle_average(sum, Point{0, 0}, 0.2) == doctest::Approx(a + b).epsilon(1e-12));

  FieldGrid gsing = f;
  gsing.log_singularity = 1.5;
  // centered circle picks up alpha log(1/r) exactly
  CHECK(circle_average(gsing, Point{0, 0}, 0.2) ==
        doctest::Approx(a + 1.5 * std::log(1.0 / 0.2)).epsilon(1e-12));
  // off-center circle with |z| > r picks up alpha log(1/|z|)
  const double plain = circle_average(f, Point{0.3, 0.0}, 0.05);
  CHECK(circle_average(gsing, Point{0.3, 0.0}, 0.05) ==
        doctest::Approx(plain + 1.5 * std::log(1.0 / 0.3)).epsilon(1e-12));
}

TEST_CASE("circle average precondition failures") {
  Grid grid{64, 1.0 / 64, Topology::box_dirichlet};
  FieldGrid f = sample_gff(grid, Normalization::zero_boundary, derive_stream(51, {6}));
  CHECK_THROWS(circle_average(f, Point{0, 0}, 1.0 / 64));        // r < 2 spacing
  CHECK_THROWS(circle_average(f, Point{0.45, 0.0}, 0.2));        // leaves the lattice
}

TEST_CASE("radial increments are independent N(0,1) per KS") {
  // Var(h_{e^{-(k+1)}} - h_{e^{-k}}) = 1; aggregate increments across samples
  Grid grid{512, 2.5 / 512, Topology::torus};
  const std::size_t samples = 600;
  std::vector<double> inc1(samples), inc2(samples);
  parallel_for(samples, 0, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             derive_stream(51, {7, static_cast<std::int64_t>(i)}));
    const double h1 = circle_average(f, Point{0, 0}, std::exp(-1.0));
    const double h2 = circle_average(f, Point{0, 0}, std::exp(-2.0));
    const double h3 = circle_average(f, Point{0, 0}, std::exp(-3.0));
    inc1[i] = h2 - h1;
    inc2[i] = h3 - h2;
  });
  auto ks1 = ks_test(inc1, [](double x) { return 1.0 - gaussian_upper_tail(x); });
  auto ks2 = ks_test(inc2, [](double x) { return 1.0 - gaussian_upper_tail(x); });
  CHECK(ks1.p_value > 0.01);
  CHECK(ks2.p_value > 0.01);
  // independence: correlation within 3 se of 0
  double c = 0;
  const double m1 = mean(inc1), m2 = mean(inc2);
  for (std::size_t i = 0; i < samples; ++i) c += (inc1[i] - m1) * (inc2[i] - m2);
  c /= std::sqrt(sample_variance(inc1) * sample_variance(inc2)) * (samples - 1);
  CHECK(std::fabs(c) < 3.0 / std::sqrt(static_cast<double>(samples)));
}

TEST_CASE("gaussianity of a fixed linear functional") {
  Grid grid{64, 1.0 / 64, Topology::torus};
  const std::size_t samples = 10000;
  std::vector<double> vals(samples);
  parallel_for(samples, 0, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             derive_stream(51, {8, static_cast<std::int64_t>(i)}));
    vals[i] = 0.6 * f.at(10, 20) - 0.8 * f.at(40, 40) + 0.3 * f.at(5, 60);
  });
  const double sd = std::sqrt(sample_variance(vals));
  for (auto& v : vals) v /= sd;
  auto ks = ks_test(vals, [](double x) { return 1.0 - gaussian_upper_tail(x); });
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("torus translation symmetry of the circle-average variance") {
  Grid grid{256, 1.0 / 256, Topology::torus};
  const std::size_t samples = 4000;
  std::vector<double> at0(samples), at_shift(samples);
  parallel_for(samples, 0, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             derive_stream(51, {9, static_cast<std::int64_t>(i)}));
    at0[i] = circle_average(f, Point{0, 0}, 0.05);
    at_shift[i] = circle_average(f, Point{0.3, 0.2}, 0.05);
  });
  const double v1 = sample_variance(at0), v2 = sample_variance(at_shift);
  const double se = v1 * std::sqrt(2.0 / static_cast<double>(samples));
  CHECK(std::fabs(v1 - v2) < 3.0 * std::sqrt(2.0) * se);
}

TEST_CASE("harmonic extension: fixed point, affine invariance, projection") {
  const int n = 64;
  Grid grid{n, 1.0 / n, Topology::box_dirichlet};
  FieldGrid f = sample_gff(grid, Normalization::zero_boundary, derive_stream(51, {10}));
  std::vector<uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  for (int y = 20; y < 44; ++y) {
    for (int x = 20; x < 44; ++x) mask[static_cast<std::size_t>(y) * n + x] = 1;
  }
  FieldGrid h1 = harmonic_extension(f, mask);
  FieldGrid h2 = harmonic_extension(h1, mask);
  double worst = 0;
  for (std::size_t i = 0; i < h1.values.size(); ++i) {
    worst = std::max(worst, std::fabs(h1.values[i] - h2.values[i]));
  }
  CHECK(worst < 1e-8);  // projection property at solver tolerance

  // affine fields are discrete-harmonic, hence unchanged
  FieldGrid aff = f;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) aff.at(x, y) = 1.5 * x - 0.25 * y + 3.0;
  }
  FieldGrid aff_ext = harmonic_extension(aff, mask);
  worst = 0;
  for (std::size_t i = 0; i < aff.values.size(); ++i) {
    worst = std::max(worst, std::fabs(aff.values[i] - aff_ext.values[i]));
  }
  CHECK(worst < 1e-8);

  // region touching the boundary is an error
  std::vector<uint8_t> bad(static_cast<std::size_t>(n) * n, 1);
  CHECK_THROWS(harmonic_extension(f, bad));
}

TEST_CASE("harmonic extension tail decays like exp(-c eta^2)") {
  // K = centered disk radius n/8 inside U of radius n/4; the sup of the
  // harmonic projection has a Gaussian tail: regression of log(-log P) on
  // log eta over eta in [1,3] has slope 2 +- 0.5
  const int n = 64;
  Grid grid{n, 1.0 / n, Topology::box_dirichlet};
  std::vector<uint8_t> mask(static_cast<std::size_t>(n) * n, 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double dx = x - n / 2, dy = y - n / 2;
      if (std::hypot(dx, dy) < n / 4.0) mask[static_cast<std::size_t>(y) * n + x] = 1;
    }
  }
  const std::size_t samples = 4000;
  std::vector<double> sups(samples);
  parallel_for(samples, 0, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::zero_boundary,
                             derive_stream(51, {11, static_cast<std::int64_t>(i)}));
    FieldGrid h = harmonic_extension(f, mask);
    double sup = 0;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double dx = x - n / 2, dy = y - n / 2;
        if (std::hypot(dx, dy) < n / 8.0) sup = std::max(sup, std::fabs(h.at(x, y)));
      }
    }
    sups[i] = sup;
  });
  std::vector<double> xs, ys;
  for (double eta : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    std::size_t cnt = 0;
    for (double s : sups) cnt += (s >= eta);
    const double p = std::max(0.5, static_cast<double>(cnt)) / static_cast<double>(samples);
    xs.push_back(eta);
    ys.push_back(-std::log(p));
  }
  auto fit = loglog_fit(xs, ys);
  CHECK(fit.slope > 1.5);
  CHECK(fit.slope < 2.5);
}

TEST_CASE("sup circle average: constant field and monotonicity") {
  Grid grid{64, 1.0 / 64, Topology::torus};
  FieldGrid f;
  f.grid = grid;
  f.values.assign(64 * 64, -2.0);
  CHECK(sup_circle_average(f, 0.1, 0.2) == doctest::Approx(2.0));
  FieldGrid g = sample_gff(grid, Normalization::row_mean_zero, derive_stream(51, {12}));
  CHECK(sup_circle_average(g, 0.1, 0.3) >= sup_circle_average(g, 0.1, 0.15));
}

TEST_CASE("sup circle average exceedance obeys the Prop-2.6-style bound") {
  // r = 2^-5, threshold (2+1) log(1/r): exceedance frequency below 2 r^{0.2}
  Grid grid{256, 2.5 / 256, Topology::torus};
  const double r = 1.0 / 32;
  const double thr = 3.0 * std::log(1.0 / r);
  const std::size_t samples = 2000;
  std::vector<int> exceed(samples, 0);
  parallel_for(samples, 0, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::unit_circle_average,
                             derive_stream(51, {13, static_cast<std::int64_t>(i)}));
    exceed[i] = sup_circle_average(f, r, 0.5) >= thr;
  });
  double freq = 0;
  for (int e : exceed) freq += e;
  freq /= static_cast<double>(samples);
  CHECK(freq <= 2.0 * std::pow(r, 0.2));
}

TEST_CASE("cone radial process: Q constant, drift, and driftless branch") {
  CHECK(lqg_q_constant(std::sqrt(8.0 / 3.0)) == doctest::Approx(5.0 / std::sqrt(6.0)));
  CHECK_THROWS(cone_radial_process(3.0, std::sqrt(8.0 / 3.0), 5.0, 0.01, derive_stream(51, {14})));

  // drift check: mean of (A(u) - A(0))/u -> alpha at u = 10
  const double alpha = std::sqrt(8.0 / 3.0);
  const std::size_t trials = 10000;
  std::vector<double> drift(trials), var_check(trials);
  parallel_for(trials, 0, [&](std::size_t i) {
    auto rp = cone_radial_process(alpha, std::sqrt(8.0 / 3.0), 10.0, 0.05,
                                  derive_stream(51, {15, static_cast<std::int64_t>(i)}));
    // levels decrease; u = -log(level): the deepest inward point is the back
    drift[i] = rp.averages.back() / 10.0;
    var_check[i] = rp.averages.back() - alpha * 10.0;  // B_10 ~ N(0, 10)
  });
  const double m = mean(drift);
  const double se = std::sqrt(sample_variance(drift) / static_cast<double>(trials));
  CHECK(std::fabs(m - alpha) < 3.0 * se);
  CHECK(std::fabs(sample_variance(var_check) - 10.0) < 0.5);

  // alpha = 0: inward branch is standard Brownian with variance u
  std::vector<double> b(trials);
  parallel_for(trials, 0, [&](std::size_t i) {
    auto rp = cone_radial_process(0.0, std::sqrt(8.0 / 3.0), 4.0, 0.05,
                                  derive_stream(51, {16, static_cast<std::int64_t>(i)}));
    b[i] = rp.averages.back();
  });
  CHECK(std::fabs(sample_variance(b) - 4.0) < 0.2);
  // outward branch stays above the conditioning line
  auto rp = cone_radial_process(1.0, std::sqrt(8.0 / 3.0), 4.0, 0.05, derive_stream(51, {17}));
  const double q = lqg_q_constant(std::sqrt(8.0 / 3.0));
  for (std::size_t i = 0; i < rp.levels.size(); ++i) {
    const double u = -std::log(rp.levels[i]);
    if (u <= 0) {
      // averages hold Btilde_{-u} + alpha u; the conditioned combination is
      // Btilde_v + (Q - alpha) v with v = -u
      const double v = -u;
      const double btilde = rp.averages[i] - 1.0 * u;
      CHECK(btilde + (q - 1.0) * v >= -1e-12);
    }
  }
}

TEST_CASE("field binary round-trip") {
  Grid grid{32, 0.03, Topology::box_free};
  FieldGrid f = sample_gff(grid, Normalization::row_mean_zero, derive_stream(51, {18}));
  f.log_singularity = 0.5;
  write_field_binary(f, "/tmp/lqg_test_field.bin");
  FieldGrid g = read_field_binary("/tmp/lqg_test_field.bin");
  CHECK(g.grid.size == f.grid.size);
  CHECK(g.grid.spacing == f.grid.spacing);
  CHECK(g.grid.topology == f.grid.topology);
  CHECK(g.normalization == f.normalization);
  CHECK(g.log_singularity == f.log_singularity);
  CHECK(g.values == f.values);
}

TEST_CASE("spectral topology rejects non-power-of-two sizes") {
  Grid grid{100, 0.01, Topology::torus};
  CHECK_THROWS(sample_gff(grid, Normalization::row_mean_zero, derive_stream(51, {19})));
}
