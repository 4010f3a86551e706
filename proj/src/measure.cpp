#include "lqg/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lqg/parallel.hpp"

namespace lqg {

MeasureGrid area_measure(const FieldGrid& field, double gamma) {
  if (!(gamma > 0.0) || !(gamma < 2.0)) throw std::invalid_argument("gamma must be in (0,2)");
  const int n = field.size();
  const double a = field.spacing();
  MeasureGrid m;
  m.grid = field.grid;
  m.gamma = gamma;
  m.cell_mass.resize(field.values.size());
  const double base = std::pow(a, 2.0 + gamma * gamma / 2.0);
  double total = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      double h = field.at(ix, iy);
      if (field.log_singularity != 0.0) {
        // the analytic log(1/|z|) part, clamped at half a cell at the apex
        const double d = std::max(field.origin_distance(ix, iy), 0.5 * a);
        h += field.log_singularity * (-std::log(d));
      }
      const double mass = base * std::exp(gamma * h);
      m.cell_mass[static_cast<std::size_t>(iy) * n + ix] = mass;
      total += mass;
    }
  }
  m.total = total;
  return m;
}

BoundaryMeasure boundary_measure(const FieldGrid& field, const std::vector<int>& curve_ix,
                                 double gamma) {
  if (!(gamma > 0.0) || !(gamma < 2.0)) throw std::invalid_argument("gamma must be in (0,2)");
  if (field.grid.topology != Topology::box_free) {
    throw std::invalid_argument("boundary_measure: curve must lie on a free-boundary edge");
  }
  const double a = field.spacing();
  BoundaryMeasure b;
  b.gamma = gamma;
  const double base = std::pow(a, 1.0 + gamma * gamma / 4.0);
  double total = 0.0;
  for (int ix : curve_ix) {
    if (ix < 0 || ix >= field.size()) throw std::invalid_argument("curve index out of range");
    const double s = base * std::exp(0.5 * gamma * field.at(ix, 0));
    b.segment_mass.push_back(s);
    total += s;
  }
  b.total = total;
  return b;
}

double ball_mass(const MeasureGrid& measure, Point z, double r) {
  const int n = measure.grid.size;
  const double a = measure.grid.spacing;
  const bool torus = measure.grid.topology == Topology::torus;
  const double L = measure.grid.extent();
  if (!torus) {
    const double half = L / 2.0;
    if (z.x - r < -half || z.x + r > half || z.y - r < -half || z.y + r > half) {
      throw std::invalid_argument("ball exits lattice");
    }
  } else if (!(r < L / 2)) {
    throw std::invalid_argument("ball exits lattice");
  }
  // restrict to the index window covering the ball
  const int icx = static_cast<int>(std::floor(z.x / a)) + n / 2;
  const int icy = static_cast<int>(std::floor(z.y / a)) + n / 2;
  const int w = static_cast<int>(std::ceil(r / a)) + 1;
  const double r2 = r * r;
  double acc = 0.0;
  for (int dy = -w; dy <= w; ++dy) {
    const int iy = torus ? ((icy + dy) % n + n) % n : icy + dy;
    if (iy < 0 || iy >= n) continue;
    for (int dx = -w; dx <= w; ++dx) {
      const int ix = torus ? ((icx + dx) % n + n) % n : icx + dx;
      if (ix < 0 || ix >= n) continue;
      double px = (ix - n / 2) * a - z.x;
      double py = (iy - n / 2) * a - z.y;
      if (torus) {
        px = std::remainder(px, L);
        py = std::remainder(py, L);
      }
      if (px * px + py * py < r2) acc += measure.at(ix, iy);
    }
  }
  return acc;
}

double approximate_metric_ball_radius(const MeasureGrid& measure, Point z, double mass_target) {
  if (mass_target <= 0.0) return 0.0;
  const int n = measure.grid.size;
  const double a = measure.grid.spacing;
  const bool torus = measure.grid.topology == Topology::torus;
  const double L = measure.grid.extent();
  const double r_max = torus ? L / 2.0 * 0.999
                             : std::min({L / 2.0 + z.x, L / 2.0 - z.x, L / 2.0 + z.y,
                                         L / 2.0 - z.y});
  // gather (distance, mass) pairs inside the largest admissible ball and
  // scan the sorted radii
  std::vector<std::pair<double, double>> cells;
  const int w = static_cast<int>(std::ceil(r_max / a)) + 1;
  const int icx = static_cast<int>(std::floor(z.x / a)) + n / 2;
  const int icy = static_cast<int>(std::floor(z.y / a)) + n / 2;
  for (int dy = -w; dy <= w; ++dy) {
    const int iy = torus ? ((icy + dy) % n + n) % n : icy + dy;
    if (iy < 0 || iy >= n) continue;
    for (int dx = -w; dx <= w; ++dx) {
      const int ix = torus ? ((icx + dx) % n + n) % n : icx + dx;
      if (ix < 0 || ix >= n) continue;
      double px = (ix - n / 2) * a - z.x;
      double py = (iy - n / 2) * a - z.y;
      if (torus) {
        px = std::remainder(px, L);
        py = std::remainder(py, L);
      }
      const double d = std::hypot(px, py);
      if (d < r_max) cells.emplace_back(d, measure.at(ix, iy));
    }
  }
  std::sort(cells.begin(), cells.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    acc += cells[i].second;
    if (acc >= mass_target) {
      // smallest radius whose half-open ball collects the target: just past
      // this cell's distance
      const double d = cells[i].first;
      return std::nextafter(d, d + 1.0);
    }
  }
  throw std::invalid_argument("approximate_metric_ball_radius: target unreachable");
}

ExponentFit moment_exponent(double gamma, double q, std::span<const double> radii,
                            std::size_t trials, int grid_size, std::uint64_t seed, int threads) {
  if (!(q > 0.0) || !(q < 4.0 / (gamma * gamma))) {
    throw std::invalid_argument("moment_exponent: q outside the moment range (0, 4/gamma^2)");
  }
  if (radii.size() < 3) throw std::invalid_argument("need at least 3 radii");
  Grid g{grid_size, 1.0 / grid_size, Topology::torus};
  const int centers_per_side = 16;
  std::vector<std::vector<double>> sums(trials, std::vector<double>(radii.size(), 0.0));
  parallel_for(trials, threads, [&](std::size_t trial) {
    auto stream = derive_stream(seed, {9101, static_cast<std::int64_t>(trial)});
    FieldGrid f = sample_gff(g, Normalization::row_mean_zero, stream);
    MeasureGrid m = area_measure(f, gamma);
    for (int cy = 0; cy < centers_per_side; ++cy) {
      for (int cx = 0; cx < centers_per_side; ++cx) {
        const Point z{(cx + 0.5) / centers_per_side - 0.5, (cy + 0.5) / centers_per_side - 0.5};
        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
          sums[trial][ri] += std::pow(ball_mass(m, z, radii[ri]), q);
        }
      }
    }
  });
  std::vector<double> xs(radii.begin(), radii.end()), ys(radii.size(), 0.0);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    double acc = 0.0;
    for (std::size_t t = 0; t < trials; ++t) acc += sums[t][ri];
    ys[ri] = acc / (static_cast<double>(trials) * centers_per_side * centers_per_side);
  }
  return loglog_fit(xs, ys);
}

}  // namespace lqg
