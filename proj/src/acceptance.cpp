#include "lqg/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "lqg/csbp.hpp"
#include "lqg/gff.hpp"
#include "lqg/measure.hpp"
#include "lqg/parallel.hpp"
#include "lqg/path_csv.hpp"
#include "lqg/qle.hpp"
#include "lqg/rng.hpp"
#include "lqg/stable.hpp"
#include "lqg/stats.hpp"

namespace lqg {

namespace {

constexpr double kGammaSq = 8.0 / 3.0;
const double kGamma = std::sqrt(kGammaSq);

struct Ctx {
  std::uint64_t seed = 7;
  int threads = 0;
  std::ostringstream detail;

  RngStream stream(std::int64_t experiment, std::int64_t trial) const {
    return derive_stream(seed, {experiment, trial});
  }
};

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------
// C01  CSBP transition law: E[e^{-lambda Y_t}] = exp(-y0 u_t(lambda))
// ---------------------------------------------------------------------------
void c01(Ctx& ctx, CriterionResult& out) {
  const std::size_t paths = 100000;
  const double y0s[3] = {0.5, 1.0, 2.0};
  const double ts[2] = {0.5, 1.0};
  const double lams[3] = {0.5, 1.0, 2.0};
  bool all_ok = true;
  double spot = 0.0;
  for (int yi = 0; yi < 3; ++yi) {
    const double y0 = y0s[yi];
    std::vector<double> y_half(paths), y_one(paths);
    parallel_for(paths, ctx.threads, [&](std::size_t i) {
      Rng rng(ctx.stream(100 + yi, static_cast<std::int64_t>(i)));
      CsbpSimOptions opt;
      opt.dtau = 1e-4;
      const auto r = simulate_csbp(CsbpSpec{1.5, y0}, ts, opt, rng);
      y_half[i] = r.y_at[0];
      y_one[i] = r.y_at[1];
    });
    for (int ti = 0; ti < 2; ++ti) {
      const auto& ys = (ti == 0) ? y_half : y_one;
      auto rows = laplace_compare(ys, lams, [&](double lam) {
        return std::exp(-y0 * csbp_u(lam, ts[ti], 1.5));
      });
      for (const auto& row : rows) {
        const bool ok = std::fabs(row.z) <= 3.0;
        all_ok = all_ok && ok;
        ctx.detail << "  y0=" << y0 << " t=" << ts[ti] << " lambda=" << row.lambda
                   << ": emp=" << fmt(row.empirical) << " closed=" << fmt(row.closed_form)
                   << " z=" << fmt(row.z) << (ok ? "" : "  <-- FAIL") << "\n";
        if (y0 == 1.0 && ts[ti] == 1.0 && row.lambda == 1.0) spot = row.empirical;
      }
    }
  }
  out.name = "csbp transition Laplace law";
  out.target = "spot E[e^-Y_1] = e^{-4/9} = " + fmt(std::exp(-4.0 / 9.0)) + "; all |z| <= 3";
  out.measured = spot;
  out.tolerance = 3.0;
  out.pass = all_ok;
}

// ---------------------------------------------------------------------------
// C02  extinction law: P[zeta <= v] = exp(-4 y0 / v^2)
// ---------------------------------------------------------------------------
void c02(Ctx& ctx, CriterionResult& out) {
  const std::size_t paths = 100000;
  std::vector<double> zeta(paths);
  parallel_for(paths, ctx.threads, [&](std::size_t i) {
    Rng rng(ctx.stream(200, static_cast<std::int64_t>(i)));
    CsbpSimOptions opt;
    opt.dtau = 1e-4;
    opt.max_time = 4.0;
    zeta[i] = simulate_csbp(CsbpSpec{1.5, 1.0}, {}, opt, rng).extinction_time;
  });
  bool all_ok = true;
  double spot = 0.0;
  for (double v : {1.0, 2.0, 4.0}) {
    std::size_t cnt = 0;
    for (double z : zeta) cnt += (z >= 0 && z <= v);
    const double p_emp = static_cast<double>(cnt) / static_cast<double>(paths);
    const double p = extinction_probability(1.0, v, 1.5);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(paths));
    const double z = (p_emp - p) / se;
    const bool ok = std::fabs(z) <= 3.0;
    all_ok = all_ok && ok;
    if (v == 2.0) spot = p_emp;
    ctx.detail << "  v=" << v << ": emp=" << fmt(p_emp) << " closed=" << fmt(p)
               << " z=" << fmt(z) << (ok ? "" : "  <-- FAIL") << "\n";
  }
  out.name = "csbp extinction law";
  out.target = "spot P[zeta<=2] = 1/e = " + fmt(std::exp(-1.0)) + "; all |z| <= 3";
  out.measured = spot;
  out.tolerance = 3.0;
  out.pass = all_ok;
}

// ---------------------------------------------------------------------------
// C03  exponential integral: E[e^{-q int Y}] = exp(-q^{2/3} y0)
// ---------------------------------------------------------------------------
void c03(Ctx& ctx, CriterionResult& out) {
  const std::size_t paths = 100000;
  std::vector<double> integral(paths);
  parallel_for(paths, ctx.threads, [&](std::size_t i) {
    Rng rng(ctx.stream(300, static_cast<std::int64_t>(i)));
    CsbpSimOptions opt;
    opt.dtau = 1e-4;
    opt.max_time = 50.0;
    integral[i] = simulate_csbp(CsbpSpec{1.5, 1.0}, {}, opt, rng).levy_time;
  });
  bool all_ok = true;
  double spot = 0.0;
  for (double q : {1.0, 8.0}) {
    auto rows = laplace_compare(integral, {&q, 1}, [&](double qq) {
      return std::exp(-csbp_phi(qq, 1.5) * 1.0);
    });
    const bool ok = std::fabs(rows[0].z) <= 3.0;
    all_ok = all_ok && ok;
    if (q == 8.0) spot = rows[0].empirical;
    ctx.detail << "  q=" << q << ": emp=" << fmt(rows[0].empirical)
               << " closed=" << fmt(rows[0].closed_form) << " z=" << fmt(rows[0].z)
               << (ok ? "" : "  <-- FAIL") << "\n";
  }
  out.name = "csbp exponential integral";
  out.target = "spot q=8: e^{-4} = " + fmt(std::exp(-4.0)) + "; all |z| <= 3";
  out.measured = spot;
  out.tolerance = 3.0;
  out.pass = all_ok;
}

// ---------------------------------------------------------------------------
// C04  jump-count Poisson law, size in [1,2] over unit time
// ---------------------------------------------------------------------------
void c04(Ctx& ctx, CriterionResult& out) {
  const std::size_t paths = 10000;
  StableSpec spec{1.5, JumpSide::downward, 1.0};
  const double mean_target = spec.jump_count_mean(1.0, 2.0, 1.0);
  std::vector<double> counts(paths);
  parallel_for(paths, ctx.threads, [&](std::size_t i) {
    Rng rng(ctx.stream(400, static_cast<std::int64_t>(i)));
    auto p = sample_stable_path(spec, 0.0, 1.0, 1e-3, 0.25, rng);
    int c = 0;
    for (const auto& j : p.jumps) {
      const double s = std::fabs(j.size);
      if (s >= 1.0 && s < 2.0) ++c;
    }
    counts[i] = c;
  });
  // chi-square against Poisson(mean_target) on bins {0,1,2,>=3}
  std::vector<double> obs(4, 0.0), expd(4, 0.0);
  for (double c : counts) obs[static_cast<std::size_t>(std::min(c, 3.0))] += 1.0;
  double p0 = std::exp(-mean_target);
  double rest = 1.0;
  for (int k = 0; k < 3; ++k) {
    expd[k] = p0 * static_cast<double>(paths);
    rest -= p0;
    p0 *= mean_target / (k + 1);
  }
  expd[3] = rest * static_cast<double>(paths);
  const auto res = chi2_gof(obs, expd);
  const double emp_mean = mean(counts);
  ctx.detail << "  Poisson mean target=" << fmt(mean_target) << " empirical=" << fmt(emp_mean)
             << " chi2=" << fmt(res.statistic) << " dof=" << res.dof
             << " p=" << fmt(res.p_value) << "\n";
  out.name = "stable jump-count Poisson law";
  out.target = "mean (2/3)(1-2^{-3/2}) = " + fmt(mean_target) + ", chi2 p > 0.01";
  out.measured = res.p_value;
  out.tolerance = 0.01;
  out.pass = res.p_value > 0.01;
}

// ---------------------------------------------------------------------------
// C05  supremum at an independent Exp(1) time is Exp(1) (unit scale)
// ---------------------------------------------------------------------------
void c05(Ctx& ctx, CriterionResult& out) {
  const std::size_t paths = 20000;
  StableSpec spec{1.5, JumpSide::downward, StableSpec::unit_scale_coefficient(1.5)};
  std::vector<double> sups(paths);
  parallel_for(paths, ctx.threads, [&](std::size_t i) {
    Rng rng(ctx.stream(500, static_cast<std::int64_t>(i)));
    const double tau = rng.exponential();
    const double dt = 2e-4;
    StableStepper stepper(spec, 1e-3);
    const auto n = static_cast<std::size_t>(std::ceil(tau / dt));
    double x = 0, sup = 0;
    for (std::size_t s = 0; s < n; ++s) {
      double js = 0;
      x += stepper.step(dt, rng, &js) + js;
      if (x > sup) sup = x;
    }
    sups[i] = sup;
  });
  const double rate = 1.0 / mean(sups);
  ctx.detail << "  fitted exponential rate = " << fmt(rate) << " (target 1 +- 5%)\n";
  out.name = "stable supremum at Exp(1) time";
  out.target = "S_{tau(1)} ~ Exp(Phi(1)) with Phi(1) = 1";
  out.measured = rate;
  out.tolerance = 0.05;
  out.pass = std::fabs(rate - 1.0) <= 0.05;
}

// ---------------------------------------------------------------------------
// C06  Lamperti round-trip: grid-exact on 100 random paths
// ---------------------------------------------------------------------------
void c06(Ctx& ctx, CriterionResult& out) {
  StableSpec spec{1.5, JumpSide::upward, 1.0};
  int value_mismatches = 0;
  int jump_mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(ctx.stream(600, trial));
    auto x = sample_stable_path(spec, 1.0 + rng.uniform(), 0.5, 1e-3, 1e-2, rng);
    auto y = csbp_from_levy(x);
    auto back = levy_from_csbp(y, x.dt);
    const std::size_t n = std::min(back.values.size(), x.values.size());
    for (std::size_t i = 0; i < n; ++i) {
      const bool hit = (back.values[i] == x.values[i]) ||
                       (i > 0 && back.values[i] == x.values[i - 1]) ||
                       (i + 1 < x.values.size() && back.values[i] == x.values[i + 1]);
      if (!hit) ++value_mismatches;
    }
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
      if (!found) ++jump_mismatches;
    }
  }
  ctx.detail << "  value mismatches=" << value_mismatches
             << " jump-time mismatches=" << jump_mismatches << " over 100 paths\n";
  out.name = "lamperti round-trip identity";
  out.target = "0 value mismatches (<=1 cell shift), jump times within 1 cell";
  out.measured = value_mismatches + jump_mismatches;
  out.tolerance = 0.0;
  out.pass = value_mismatches == 0 && jump_mismatches == 0;
}

// ---------------------------------------------------------------------------
// C07  GFF radial law: Var h_{e^{-k}}(0) = k within 5%, k = 2..6
// ---------------------------------------------------------------------------
void c07(Ctx& ctx, CriterionResult& out) {
  const std::size_t samples = 10000;
  const int n = 2048;
  const double L = 2.5;
  Grid grid{n, L / n, Topology::torus};
  std::vector<std::array<double, 5>> diffs(samples);
  parallel_for(samples, ctx.threads, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             ctx.stream(700, static_cast<std::int64_t>(i)));
    const double h1 = circle_average(f, Point{0, 0}, 1.0);
    for (int k = 2; k <= 6; ++k) {
      diffs[i][k - 2] = circle_average(f, Point{0, 0}, std::exp(-k)) - h1;
    }
  });
  bool all_ok = true;
  double worst_rel = 0.0;
  for (int k = 2; k <= 6; ++k) {
    std::vector<double> v(samples);
    for (std::size_t i = 0; i < samples; ++i) v[i] = diffs[i][k - 2];
    const double var = sample_variance(v);
    const double rel = std::fabs(var - k) / k;
    worst_rel = std::max(worst_rel, rel);
    const bool ok = rel <= 0.05;
    all_ok = all_ok && ok;
    ctx.detail << "  k=" << k << ": Var=" << fmt(var) << " rel err=" << fmt(rel)
               << (ok ? "" : "  <-- FAIL") << "\n";
  }
  out.name = "gff radial variance law";
  out.target = "Var h_{e^-k}(0) = k within 5%, k in {2..6}, 2048^2";
  out.measured = worst_rel;
  out.tolerance = 0.05;
  out.pass = all_ok;
}

// ---------------------------------------------------------------------------
// C08  multifractal exponents xi(1) = 2 +- 0.1, xi(2) = 4/3 +- 0.15
// ---------------------------------------------------------------------------
void c08(Ctx& ctx, CriterionResult& out) {
  const std::size_t fields = 200;
  const int n = 1024;
  Grid grid{n, 1.0 / n, Topology::torus};
  const std::vector<double> radii = {1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
  const int cside = 16;
  std::vector<std::vector<double>> s1(fields, std::vector<double>(radii.size(), 0.0));
  std::vector<std::vector<double>> s2 = s1;
  parallel_for(fields, ctx.threads, [&](std::size_t trial) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             ctx.stream(800, static_cast<std::int64_t>(trial)));
    MeasureGrid m = area_measure(f, kGamma);
    for (int cy = 0; cy < cside; ++cy) {
      for (int cx = 0; cx < cside; ++cx) {
        const Point z{(cx + 0.5) / cside - 0.5, (cy + 0.5) / cside - 0.5};
        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
          const double mass = ball_mass(m, z, radii[ri]);
          s1[trial][ri] += mass;
          s2[trial][ri] += mass * mass;
        }
      }
    }
  });
  std::vector<double> m1(radii.size(), 0.0), m2(radii.size(), 0.0);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    for (std::size_t t = 0; t < fields; ++t) {
      m1[ri] += s1[t][ri];
      m2[ri] += s2[t][ri];
    }
  }
  auto fit1 = loglog_fit(radii, m1);
  auto fit2 = loglog_fit(radii, m2);
  const double xi1 = multifractal_xi(kGamma, 1.0);
  const double xi2 = multifractal_xi(kGamma, 2.0);
  const bool ok1 = std::fabs(fit1.slope - xi1) <= 0.1;
  const bool ok2 = std::fabs(fit2.slope - xi2) <= 0.15;
  ctx.detail << "  q=1: slope=" << fmt(fit1.slope) << " target " << fmt(xi1) << " +- 0.1"
             << (ok1 ? "" : "  <-- FAIL") << "\n";
  ctx.detail << "  q=2: slope=" << fmt(fit2.slope) << " target " << fmt(xi2) << " +- 0.15"
             << (ok2 ? "" : "  <-- FAIL")
             << "  (note: q=2 lies outside the moment range 0<q<4/gamma^2 = 3/2;"
                " the second moment of the measure diverges, so the fitted slope"
                " reflects the lattice cutoff, not xi(2))\n";
  out.name = "multifractal moment exponents";
  out.target = "xi(1)=2 +- 0.1 and xi(2)=4/3 +- 0.15 at gamma^2 = 8/3";
  out.measured = fit2.slope;
  out.tolerance = 0.15;
  out.pass = ok1 && ok2;
}

// ---------------------------------------------------------------------------
// C09  typical-ball mass slope 2/3 on the gamma-cone field
// ---------------------------------------------------------------------------
void c09(Ctx& ctx, CriterionResult& out) {
  const std::size_t fields = 200;
  const int n = 2048;
  const double L = 0.5;
  Grid grid{n, L / n, Topology::torus};
  std::vector<double> slopes(fields);
  parallel_for(fields, ctx.threads, [&](std::size_t trial) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             ctx.stream(900, static_cast<std::int64_t>(trial)));
    f.log_singularity = kGamma;  // view from a quantum-typical point
    MeasureGrid m = area_measure(f, kGamma);
    std::vector<double> rs, ms;
    for (int k = -9; k <= -3; ++k) {
      const double r = std::pow(2.0, k);
      rs.push_back(r);
      ms.push_back(ball_mass(m, Point{0, 0}, r));
    }
    slopes[trial] = loglog_fit(rs, ms).slope;
  });
  const double med = median(slopes);
  ctx.detail << "  median per-field slope = " << fmt(med) << " over " << fields
             << " cone fields, radii 2^-9..2^-3\n";
  out.name = "typical-ball mass slope (cone field)";
  out.target = "median slope 2/3 +- 0.1";
  out.measured = med;
  out.tolerance = 0.1;
  out.pass = std::fabs(med - 2.0 / 3.0) <= 0.1;
}

// ---------------------------------------------------------------------------
// C10  Euclidean-diameter exponent of approximate metric balls
// ---------------------------------------------------------------------------
void c10(Ctx& ctx, CriterionResult& out) {
  const std::size_t fields = 200;
  const int n = 2048;
  const double L = 0.5;
  Grid grid{n, L / n, Topology::torus};
  const std::vector<double> eps = {std::pow(2.0, -3.0), std::pow(2.0, -2.5), std::pow(2.0, -2.0),
                                   std::pow(2.0, -1.5), std::pow(2.0, -1.0)};
  std::vector<std::vector<double>> radii(eps.size(), std::vector<double>(fields, 0.0));
  std::size_t unreachable = 0;
  parallel_for(fields, ctx.threads, [&](std::size_t trial) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             ctx.stream(1000, static_cast<std::int64_t>(trial)));
    f.log_singularity = kGamma;
    MeasureGrid m = area_measure(f, kGamma);
    for (std::size_t ei = 0; ei < eps.size(); ++ei) {
      const double target = std::pow(eps[ei], 4.0);
      double r;
      try {
        r = approximate_metric_ball_radius(m, Point{0, 0}, target);
      } catch (const std::invalid_argument&) {
        r = L / 2.0;  // censored at the largest admissible radius
        ++unreachable;
      }
      radii[ei][trial] = std::max(r, grid.spacing * 0.5);
    }
  });
  std::vector<double> med_r(eps.size());
  for (std::size_t ei = 0; ei < eps.size(); ++ei) med_r[ei] = median(radii[ei]);
  auto fit = loglog_fit(eps, med_r);
  ctx.detail << "  median radii per eps:";
  for (std::size_t ei = 0; ei < eps.size(); ++ei) {
    ctx.detail << " (" << fmt(eps[ei]) << " -> " << fmt(med_r[ei]) << ")";
  }
  ctx.detail << "\n  slope=" << fmt(fit.slope) << " target 6 +- 0.5; unreachable targets: "
             << unreachable << "\n";
  if (std::fabs(fit.slope - 6.0) > 0.5) {
    ctx.detail << "  note: eps in [2^-3, 2^-1] spans 12 octaves of radius (r ~ eps^6);"
                  " a 2048^2 lattice resolves ~8, so the small-eps radii saturate at the"
                  " lattice spacing and the fitted slope reflects that truncation\n";
  }
  out.name = "approximate-metric-ball diameter exponent";
  out.target = "log radius vs log eps slope 6 +- 0.5";
  out.measured = fit.slope;
  out.tolerance = 0.5;
  out.pass = std::fabs(fit.slope - 6.0) <= 0.5;
}

// ---------------------------------------------------------------------------
// C11  exact scaling identities
// ---------------------------------------------------------------------------
void c11(Ctx& ctx, CriterionResult& out) {
  bool ok = true;
  double worst = 0.0;
  // area and boundary scaling under h -> h + C
  {
    Grid grid{64, 1.0 / 64, Topology::box_free};
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero, ctx.stream(1100, 0));
    const double C = 0.37;
    FieldGrid g = f;
    for (auto& v : g.values) v += C;
    MeasureGrid ma = area_measure(f, kGamma);
    MeasureGrid mb = area_measure(g, kGamma);
    const double factor = std::exp(kGamma * C);
    for (std::size_t i = 0; i < ma.cell_mass.size(); ++i) {
      const double rel = std::fabs(mb.cell_mass[i] - factor * ma.cell_mass[i]) /
                         (factor * ma.cell_mass[i]);
      worst = std::max(worst, rel);
    }
    std::vector<int> curve;
    for (int ix = 8; ix < 56; ++ix) curve.push_back(ix);
    BoundaryMeasure ba = boundary_measure(f, curve, kGamma);
    BoundaryMeasure bb = boundary_measure(g, curve, kGamma);
    const double bfactor = std::exp(kGamma * C / 2.0);
    worst = std::max(worst, std::fabs(bb.total - bfactor * ba.total) / (bfactor * ba.total));
    ok = ok && worst <= 1e-12;
    ctx.detail << "  h -> h+C: worst relative error of e^{gC}/e^{gC/2} scaling = "
               << fmt(worst) << "\n";
  }
  // distance clock under boundary rescale l = 4: clock x l^{1/2}, natural
  // time x l^{3/2}, bitwise with power-of-two factors
  {
    StableSpec spec{1.5, JumpSide::upward, 1.0};
    Rng rng(ctx.stream(1100, 1));
    auto x = sample_stable_path(spec, 1.0, 0.5, 1e-3, 1e-2, rng);
    CadlagPath xs = x;
    const double l = 4.0;
    xs.dt = x.dt * 8.0;  // l^{3/2}
    for (auto& v : xs.values) v *= l;
    for (auto& j : xs.jumps) {
      j.time *= 8.0;
      j.size *= l;
    }
    auto clock = distance_time_change(x);
    auto clock_s = distance_time_change(xs);
    std::size_t mism = 0;
    for (std::size_t i = 0; i < clock.size(); ++i) {
      if (clock_s[i] != 2.0 * clock[i]) ++mism;  // l^{1/2} = 2 exactly
    }
    ok = ok && mism == 0;
    ctx.detail << "  boundary rescale l=4: clock entries differing from 2x original: " << mism
               << " of " << clock.size() << " (exact bitwise)\n";
  }
  out.name = "measure and clock scaling identities";
  out.target = "area e^{gC}, boundary e^{gC/2} to 1e-12; clock l^{1/2} exact at l=4";
  out.measured = worst;
  out.tolerance = 1e-12;
  out.pass = ok;
}

// ---------------------------------------------------------------------------
// C12  necklace conservation B - T = dX, exact, 10^3 ledgers
// ---------------------------------------------------------------------------
void c12(Ctx& ctx, CriterionResult& out) {
  const std::size_t ledgers = 1000;
  std::vector<int> bad(ledgers, 0);
  parallel_for(ledgers, ctx.threads, [&](std::size_t i) {
    Rng rng(ctx.stream(1200, static_cast<std::int64_t>(i)));
    auto ledger = build_necklace_ledger(0.01, 20, 1.0, 0.01 / 64, 2e-3, rng);
    for (const auto& rec : ledger.records) {
      if (rec.bottom - rec.top != rec.x_after - rec.x_before) bad[i] += 1;
      if (rec.top < 0 || rec.bottom < 0) bad[i] += 1;
    }
  });
  int total_bad = 0;
  for (int b : bad) total_bad += b;
  ctx.detail << "  necklaces violating exact conservation or nonnegativity: " << total_bad
             << "\n";
  out.name = "necklace conservation identity";
  out.target = "B - T == X_after - X_before exactly, every necklace of 1000 ledgers";
  out.measured = total_bad;
  out.tolerance = 0.0;
  out.pass = total_bad == 0;
}

// ---------------------------------------------------------------------------
// C13  hit-count scaling: slope of mean mark-hit count vs delta = -1/3
// ---------------------------------------------------------------------------
void c13(Ctx& ctx, CriterionResult& out) {
  const std::vector<double> deltas = {1e-2, std::pow(10.0, -2.5), 1e-3};
  const double x0 = 3.0;
  const std::size_t runs = 1500;
  std::vector<double> mean_hits(deltas.size(), 0.0);
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    const double delta = deltas[di];
    const int n = static_cast<int>(std::llround(1.0 / delta));
    std::vector<double> hits(runs, 0.0);
    parallel_for(runs, ctx.threads, [&](std::size_t i) {
      Rng rng(ctx.stream(1300 + static_cast<std::int64_t>(di), static_cast<std::int64_t>(i)));
      auto ledger = build_necklace_ledger(delta, n, x0, delta / 64,
                                          0.02 * std::pow(delta, 2.0 / 3.0), rng);
      auto walk = marked_point_walk(ledger, 1, rng);
      double h = 0;
      for (const auto& s : walk.steps) h += s.hits[0];
      hits[i] = h;
    });
    mean_hits[di] = mean(hits);
    ctx.detail << "  delta=" << fmt(delta) << ": mean hit count=" << fmt(mean_hits[di]) << "\n";
  }
  auto fit = loglog_fit(deltas, mean_hits);
  ctx.detail << "  slope=" << fmt(fit.slope) << " target -1/3 +- 0.05\n";
  out.name = "mark hit-count scaling";
  out.target = "log-log slope of mean hits vs delta = -1/3 +- 0.05";
  out.measured = fit.slope;
  out.tolerance = 0.05;
  out.pass = std::fabs(fit.slope + 1.0 / 3.0) <= 0.05;
}

// ---------------------------------------------------------------------------
// C14  step-count distance converges: MSE halves from delta 1e-2 to 1e-3
// ---------------------------------------------------------------------------
void c14(Ctx& ctx, CriterionResult& out) {
  const double x0 = 3.0;
  auto mse_at = [&](double delta, std::size_t runs, std::int64_t tag) {
    const int n = static_cast<int>(std::llround(1.0 / delta));
    const double dt = delta / 64;
    const double floor = 0.02 * std::pow(delta, 2.0 / 3.0);
    // calibration pass for c = E[T_j] / delta^{2/3}
    std::vector<double> cs(200);
    parallel_for(cs.size(), ctx.threads, [&](std::size_t i) {
      Rng rng(ctx.stream(tag, static_cast<std::int64_t>(i)));
      auto ledger = build_necklace_ledger(delta, n, x0, dt, floor, rng);
      cs[i] = calibrate_top_constant(ledger);
    });
    const double c = mean(cs);
    std::vector<double> dev2(runs, 0.0);
    parallel_for(runs, ctx.threads, [&](std::size_t i) {
      Rng rng(ctx.stream(tag + 1, static_cast<std::int64_t>(i)));
      auto ledger = build_necklace_ledger(delta, n, x0, dt, floor, rng);
      auto walk = marked_point_walk(ledger, 1, rng);
      auto step_path = step_count_distance(walk, ledger, c);
      auto boundary = ledger_boundary_path(ledger);
      auto clock = distance_time_change(boundary);
      const auto per = static_cast<std::size_t>(std::llround(delta / ledger.dt));
      // path-averaged squared deviation sampled at necklace ends
      double acc = 0.0;
      std::size_t cnt = 0;
      for (std::size_t j = 0; j < walk.steps.size(); ++j) {
        const std::size_t idx = std::min(clock.size() - 1, (j + 1) * per);
        const double d = step_path.values[j + 1] - clock[idx];
        acc += d * d;
        ++cnt;
      }
      dev2[i] = acc / static_cast<double>(cnt);
    });
    return std::pair<double, double>(mean(dev2), c);
  };
  const auto [mse_coarse, c_coarse] = mse_at(1e-2, 3000, 1400);
  const auto [mse_fine, c_fine] = mse_at(1e-3, 1000, 1410);
  const double ratio = mse_coarse / mse_fine;
  ctx.detail << "  delta=1e-2: MSE=" << fmt(mse_coarse) << " (c=" << fmt(c_coarse) << ")\n";
  ctx.detail << "  delta=1e-3: MSE=" << fmt(mse_fine) << " (c=" << fmt(c_fine) << ")\n";
  ctx.detail << "  ratio=" << fmt(ratio) << " (needs >= 2; c calibration drift "
             << fmt(std::fabs(c_coarse - c_fine) / c_coarse) << ")\n";
  out.name = "step-count distance convergence";
  out.target = "MSE(step-count path vs int ds/X) shrinks by >= 2x from delta 1e-2 to 1e-3";
  out.measured = ratio;
  out.tolerance = 2.0;
  out.pass = ratio >= 2.0;
}

// ---------------------------------------------------------------------------
// C15  independent 3/2-stable CSBP segments (k = 2 marks)
// ---------------------------------------------------------------------------
void c15(Ctx& ctx, CriterionResult& out) {
  const double delta = 1e-3;
  const double x0 = 1.0;
  const double t_star = 0.5;   // distance time of the Laplace test
  const double u_star = 0.05;  // per-segment Levy time for the correlation test
  const std::size_t runs = 10000;
  const int n = 900;  // necklaces: enough natural time to reach t_star
  struct RunOut {
    double seg_t[2] = {0, 0};   // segment lengths at distance time t_star
    double seg0[2] = {0, 0};    // initial segment lengths
    double inc_u[2] = {0, 0};   // normalized increments at segment Levy time u_star
    bool reached = false;
  };
  std::vector<RunOut> outs(runs);
  parallel_for(runs, ctx.threads, [&](std::size_t i) {
    Rng rng(ctx.stream(1500, static_cast<std::int64_t>(i)));
    auto ledger = build_necklace_ledger(delta, n, x0, delta / 64,
                                        0.02 * std::pow(delta, 2.0 / 3.0), rng);
    auto walk = marked_point_walk(ledger, 2, rng);
    auto boundary = ledger_boundary_path(ledger);
    auto clock = distance_time_change(boundary);
    const auto per = static_cast<std::size_t>(std::llround(delta / ledger.dt));
    RunOut& ro = outs[i];
    auto segs0 = walk.initial.segment_lengths();
    ro.seg0[0] = segs0[0];
    ro.seg0[1] = segs0[1];
    // segment Levy clocks: delta per necklace glued into the segment
    double levy_u[2] = {0, 0};
    bool got_u[2] = {false, false};
    std::vector<double> prev = segs0;
    for (std::size_t j = 0; j < walk.steps.size(); ++j) {
      const auto segs = walk.steps[j].state.segment_lengths();
      // which segment did this necklace glue into? the one whose length moved
      int glued = (std::fabs(segs[0] - prev[0]) >= std::fabs(segs[1] - prev[1])) ? 0 : 1;
      levy_u[glued] += delta;
      for (int sidx = 0; sidx < 2; ++sidx) {
        if (!got_u[sidx] && levy_u[sidx] >= u_star) {
          ro.inc_u[sidx] = (segs[sidx] - ro.seg0[sidx]) / std::pow(u_star, 2.0 / 3.0);
          got_u[sidx] = true;
        }
      }
      const std::size_t idx = std::min(clock.size() - 1, (j + 1) * per);
      if (clock[idx] >= t_star && !ro.reached) {
        ro.seg_t[0] = segs[0];
        ro.seg_t[1] = segs[1];
        ro.reached = true;
        if (got_u[0] && got_u[1]) break;
      }
      prev = segs;
    }
  });
  // Laplace test per segment at lambda in {1, 2}
  bool ok = true;
  std::size_t reached = 0;
  for (const auto& ro : outs) reached += ro.reached;
  ctx.detail << "  runs reaching distance time " << t_star << ": " << reached << "/" << runs
             << "\n";
  for (int sidx = 0; sidx < 2; ++sidx) {
    for (double lam : {1.0, 2.0}) {
      std::vector<double> d;
      d.reserve(runs);
      for (const auto& ro : outs) {
        if (!ro.reached) continue;
        d.push_back(std::exp(-lam * ro.seg_t[sidx]) -
                    std::exp(-ro.seg0[sidx] * csbp_u(lam, t_star, 1.5)));
      }
      const double m = mean(d);
      const double se = std::sqrt(sample_variance(d) / static_cast<double>(d.size()));
      const double z = m / se;
      const bool okk = std::fabs(z) <= 3.0;
      ok = ok && okk;
      ctx.detail << "  segment " << sidx << " lambda=" << lam << ": mean diff=" << fmt(m)
                 << " z=" << fmt(z) << (okk ? "" : "  <-- FAIL") << "\n";
    }
  }
  // cross-segment correlation of normalized Levy-time increments
  {
    std::vector<double> a, b;
    for (const auto& ro : outs) {
      a.push_back(ro.inc_u[0]);
      b.push_back(ro.inc_u[1]);
    }
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
    const double corr = sab / std::sqrt(saa * sbb);
    const double z = corr * std::sqrt(static_cast<double>(a.size()));
    const bool okk = std::fabs(z) <= 3.0;
    ok = ok && okk;
    ctx.detail << "  cross-segment increment correlation=" << fmt(corr) << " z=" << fmt(z)
               << (okk ? "" : "  <-- FAIL") << "\n";
    out.measured = corr;
  }
  out.name = "independent csbp segments";
  out.target = "per-segment Laplace law within 3 se and cross correlation within 3 se of 0";
  out.tolerance = 3.0;
  out.pass = ok;
}

// ---------------------------------------------------------------------------
// C16  boundary-length lower tail: log(-log P) vs log |eta| slope 2 +- 0.5
// ---------------------------------------------------------------------------
void c16(Ctx& ctx, CriterionResult& out) {
  const std::size_t samples = 10000;
  const int n = 256;
  Grid grid{n, 1.0 / n, Topology::box_free};
  std::vector<int> curve;
  for (int ix = n / 4; ix < 3 * n / 4; ++ix) curve.push_back(ix);
  std::vector<double> btil(samples);
  parallel_for(samples, ctx.threads, [&](std::size_t i) {
    FieldGrid f = sample_gff(grid, Normalization::row_mean_zero,
                             ctx.stream(1600, static_cast<std::int64_t>(i)));
    // additive constant: average over the measured curve is 0
    double avg = 0.0;
    for (int ix : curve) avg += f.at(ix, 0);
    avg /= static_cast<double>(curve.size());
    for (auto& v : f.values) v -= avg;
    const auto b = boundary_measure(f, curve, kGamma);
    btil[i] = (2.0 / kGamma) * std::log(b.total);
  });
  const double center = median(btil);
  std::vector<double> etas = {-1.0, -1.5, -2.0, -2.5, -3.0};
  std::vector<double> xs, ys;
  ctx.detail << "  median Btilde=" << fmt(center) << "; tail probabilities:";
  for (double eta : etas) {
    std::size_t cnt = 0;
    for (double b : btil) cnt += (b - center <= eta);
    const double p = std::max(0.5, static_cast<double>(cnt)) / static_cast<double>(samples);
    ctx.detail << " P(<=" << fmt(eta) << ")=" << fmt(p);
    xs.push_back(-eta);
    ys.push_back(-std::log(p));
  }
  ctx.detail << "\n";
  auto fit = loglog_fit(xs, ys);
  ctx.detail << "  slope of log(-log P) vs log|eta| = " << fmt(fit.slope)
             << " target 2 +- 0.5\n";
  out.name = "free-boundary quantum length lower tail";
  out.target = "Gaussian-decay slope 2 +- 0.5 over eta in [-3,-1]";
  out.measured = fit.slope;
  out.tolerance = 0.5;
  out.pass = std::fabs(fit.slope - 2.0) <= 0.5;
}

// ---------------------------------------------------------------------------
// C17  scaling collapse of sup boundary length (reversed csbp)
// ---------------------------------------------------------------------------
void c17(Ctx& ctx, CriterionResult& out) {
  const std::size_t runs = 4000;
  auto batch = [&](double r, std::int64_t tag) {
    std::vector<double> stat(runs);
    parallel_for(runs, ctx.threads, [&](std::size_t i) {
      Rng rng(ctx.stream(tag, static_cast<std::int64_t>(i)));
      CsbpSimOptions opt;
      opt.dtau = 2e-4 * r;        // discretization scales with the horizon
      opt.absorb_floor = 1e-9 * r * r;
      opt.max_time = 100.0 * r;
      CadlagPath y = simulate_csbp_path(CsbpSpec{1.5, r * r}, opt, rng);
      // B_s = Y_{(zeta - s)+}: sup over s <= r is the sup of Y over the last
      // r units before extinction (the whole path if zeta < r)
      const double zeta = y.terminal ? *y.terminal : opt.max_time;
      const double lo = std::max(0.0, zeta - r);
      const auto i0 = static_cast<std::size_t>(std::floor(lo / opt.dtau));
      double sup = 0.0;
      for (std::size_t k = i0; k < y.values.size(); ++k) sup = std::max(sup, y.values[k]);
      stat[i] = sup / (r * r);
    });
    return stat;
  };
  auto a = batch(1.0, 1700);
  auto b = batch(0.5, 1710);
  auto ks = ks_test_two_sample(a, b);
  ctx.detail << "  KS statistic=" << fmt(ks.statistic) << " p=" << fmt(ks.p_value)
             << " (r=1 vs r=0.5, " << runs << " runs each)\n";
  out.name = "boundary-length scaling collapse";
  out.target = "sup_{s<=r} B_s / r^2 law r-independent (KS level 0.01)";
  out.measured = ks.p_value;
  out.tolerance = 0.01;
  out.pass = ks.p_value > 0.01;
}

// ---------------------------------------------------------------------------
// C18  Poisson deviation bound
// ---------------------------------------------------------------------------
void c18(Ctx& ctx, CriterionResult& out) {
  const std::size_t draws = 1000000;
  const double lambda = 10.0;
  std::size_t cnt = 0;
  Rng rng(ctx.stream(1800, 0));
  for (std::size_t i = 0; i < draws; ++i) cnt += (rng.poisson(lambda) <= 5);
  const double p_emp = static_cast<double>(cnt) / static_cast<double>(draws);
  const double bound = poisson_deviation_bound(lambda, 0.5);
  ctx.detail << "  empirical P[Z <= 5] = " << fmt(p_emp) << ", Chernoff bound = " << fmt(bound)
             << "\n";
  out.name = "poisson deviation bound";
  out.target = "P[Z <= lambda/2] <= exp(lambda(a - a log a - 1)) = " + fmt(bound);
  out.measured = p_emp;
  out.tolerance = bound;
  out.pass = p_emp <= bound;
}

using CriterionFn = void (*)(Ctx&, CriterionResult&);

struct Entry {
  const char* id;
  CriterionFn fn;
};

const Entry kCriteria[] = {
    {"C01", c01}, {"C02", c02}, {"C03", c03}, {"C04", c04}, {"C05", c05}, {"C06", c06},
    {"C07", c07}, {"C08", c08}, {"C09", c09}, {"C10", c10}, {"C11", c11}, {"C12", c12},
    {"C13", c13}, {"C14", c14}, {"C15", c15}, {"C16", c16}, {"C17", c17}, {"C18", c18},
};

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log) {
  std::vector<CriterionResult> results;
  for (const auto& entry : kCriteria) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), entry.id) == options.only.end()) {
      continue;
    }
    Ctx ctx;
    ctx.seed = options.seed;
    ctx.threads = options.threads;
    CriterionResult res;
    res.id = entry.id;
    res.seed = options.seed;
    const auto t0 = std::chrono::steady_clock::now();
    entry.fn(ctx, res);
    const auto t1 = std::chrono::steady_clock::now();
    res.runtime_seconds = std::chrono::duration<double>(t1 - t0).count();
    res.detail = ctx.detail.str();
    log << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << " " << res.name << "  (measured "
        << format_double(res.measured) << ", " << res.target << ", "
        << format_double(res.runtime_seconds) << "s)\n";
    log << res.detail;
    log.flush();
    results.push_back(std::move(res));
  }
  return results;
}

std::string acceptance_report_json(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  os << "[\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    os << "  {\"id\": \"" << r.id << "\", \"name\": \"" << json_escape(r.name)
       << "\", \"target\": \"" << json_escape(r.target)
       << "\", \"measured\": " << format_double(r.measured)
       << ", \"tolerance\": " << format_double(r.tolerance)
       << ", \"pass\": " << (r.pass ? "true" : "false")
       << ", \"runtime_seconds\": " << format_double(r.runtime_seconds)
       << ", \"seed\": " << r.seed << ", \"detail\": \"" << json_escape(r.detail) << "\"}";
    os << (i + 1 < results.size() ? ",\n" : "\n");
  }
  os << "]\n";
  return os.str();
}

}  // namespace lqg
