#include "lqg/surface.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqg {

namespace {

// Brownian bridge from 0 to 0 over [0, T] on a uniform grid
std::vector<double> brownian_bridge(double T, std::size_t n, Rng& rng) {
  std::vector<double> w(n + 1, 0.0);
  const double dt = T / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) w[i] = w[i - 1] + std::sqrt(dt) * rng.normal();
  const double wT = w[n];
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n);
    w[i] -= s * wT;
  }
  return w;
}

}  // namespace

std::vector<double> squared_bessel_bridge(double d, double T, double dt, Rng& rng) {
  if (!(d > 0) || !(T > 0) || !(dt > 0)) throw std::invalid_argument("bad bridge parameters");
  const auto n = static_cast<std::size_t>(std::llround(std::ceil(T / dt)));
  const double rounded = std::round(d);
  if (std::fabs(d - rounded) < 1e-12 && rounded >= 1) {
    // sum of squared Brownian bridges
    std::vector<double> x(n + 1, 0.0);
    for (int c = 0; c < static_cast<int>(rounded); ++c) {
      auto b = brownian_bridge(T, n, rng);
      for (std::size_t i = 0; i <= n; ++i) x[i] += b[i] * b[i];
    }
    return x;
  }
  // Euler-Maruyama on the bridge SDE dX = (d - 2X/(T-s)) ds + 2 sqrt(X) dW,
  // reflected at the floor
  const double floor = 1e-12;
  std::vector<double> x(n + 1, 0.0);
  double cur = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = T * static_cast<double>(i) / static_cast<double>(n);
    const double h = T / static_cast<double>(n);
    const double remain = std::max(T - s, h);
    cur += (d - 2.0 * cur / remain) * h + 2.0 * std::sqrt(std::max(cur, 0.0) * h) * rng.normal();
    if (cur < floor) cur = floor;
    x[i + 1] = cur;
  }
  x[n] = 0.0;
  return x;
}

BesselExcursion sample_bessel_excursion(double delta, double t_min, double t_max, double dt,
                                        Rng& rng) {
  if (!(delta > 0) || !(delta < 2)) {
    throw std::invalid_argument("bessel excursion needs delta in (0,2)");
  }
  if (!(t_min > 0) || !(t_min < t_max)) throw std::invalid_argument("empty lifetime window");
  // lifetime from the normalized density ~ t^{delta/2 - 2} on the window
  const double e = delta / 2.0 - 1.0;  // integral exponent (nonzero for delta < 2)
  const double u = rng.uniform();
  const double lo = std::pow(t_min, e), hi = std::pow(t_max, e);
  const double lifetime = std::pow(lo + u * (hi - lo), 1.0 / e);

  BesselExcursion out;
  out.delta = delta;
  out.lifetime = lifetime;
  out.dt = dt;
  const auto x = squared_bessel_bridge(4.0 - delta, lifetime, dt, rng);
  out.path.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.path[i] = std::sqrt(std::max(0.0, x[i]));
  return out;
}

double role_bessel_dimension(SurfaceRole role, double gamma) {
  const double g2 = gamma * gamma;
  switch (role) {
    case SurfaceRole::disk:
      return 3.0 - 4.0 / g2;
    case SurfaceRole::sphere:
      return 4.0 - 8.0 / g2;
    default:
      throw std::invalid_argument("role has no Bessel dimension");
  }
}

RadialEncoding radial_encoding_from_excursion(SurfaceRole role, double gamma,
                                              const BesselExcursion& excursion, double du,
                                              double extent) {
  if (role != SurfaceRole::disk && role != SurfaceRole::sphere) {
    throw std::invalid_argument("excursion encodings exist for disk and sphere roles");
  }
  const double expect_delta = role_bessel_dimension(role, gamma);
  if (std::fabs(excursion.delta - expect_delta) > 1e-9) {
    throw std::invalid_argument("excursion dimension does not match the role");
  }
  const double qv = (role == SurfaceRole::disk) ? 2.0 : 1.0;
  // the encoding (2/gamma) log Z has quadratic variation (4/gamma^2) Z^{-2} ds;
  // the time change du = (4 / (qv gamma^2)) Z^{-2} ds makes it qv per unit u
  const double g2 = gamma * gamma;
  const std::size_t n = excursion.path.size();
  std::vector<double> ucum(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double z = std::max(excursion.path[i], 1e-12);
    ucum[i + 1] = ucum[i] + (4.0 / (qv * g2)) * excursion.dt / (z * z);
  }
  // translate so u = 0 sits at the lifetime midpoint
  const std::size_t mid = n / 2;
  const double u_mid = ucum[mid];

  RadialEncoding enc;
  enc.role = role;
  enc.gamma = gamma;
  enc.du = du;
  enc.u0 = -extent / 2.0;
  const auto m = static_cast<std::size_t>(std::llround(std::floor(extent / du))) + 1;
  enc.process.reserve(m);
  std::size_t idx = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double target = enc.u0 + du * static_cast<double>(k) + u_mid;
    if (target < ucum.front() || target > ucum.back()) {
      throw std::invalid_argument("excursion too short to cover the requested extent");
    }
    while (idx + 1 < n && ucum[idx + 1] <= target) ++idx;
    enc.process.push_back((2.0 / gamma) * std::log(std::max(excursion.path[idx], 1e-12)));
  }
  return enc;
}

RadialEncoding radial_encoding_drifted(SurfaceRole role, double gamma, double alpha, double du,
                                       double extent, Rng& rng) {
  if (role != SurfaceRole::cone && role != SurfaceRole::wedge) {
    throw std::invalid_argument("drifted encodings exist for cone and wedge roles");
  }
  const double q = lqg_q_constant(gamma);
  if (!(alpha < q)) throw std::invalid_argument("need alpha < Q");
  const double drift = q - alpha;
  const double var_rate = (role == SurfaceRole::wedge) ? 2.0 : 1.0;
  RadialEncoding enc;
  enc.role = role;
  enc.gamma = gamma;
  enc.du = du;
  enc.u0 = 0.0;
  const auto m = static_cast<std::size_t>(std::llround(std::ceil(extent / du)));
  enc.process.assign(m + 1, 0.0);
  for (std::size_t i = 1; i <= m; ++i) {
    enc.process[i] = enc.process[i - 1] + std::sqrt(var_rate * du) * rng.normal() +
                     drift * du;
  }
  return enc;
}

FieldGrid assemble_cylinder_field(const RadialEncoding& encoding, const FieldGrid& lateral,
                                  double gamma) {
  (void)gamma;
  if (lateral.grid.topology != Topology::cylinder) {
    throw std::invalid_argument("lateral field must live on the cylinder");
  }
  const int n = lateral.size();
  if (encoding.process.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("encoding length does not match the grid width");
  }
  FieldGrid out = lateral;
  // remove any residual circle means, then broadcast the encoding
  for (int x = 0; x < n; ++x) {
    double mean = 0.0;
    for (int y = 0; y < n; ++y) mean += out.at(x, y);
    mean /= n;
    for (int y = 0; y < n; ++y) out.at(x, y) += encoding.process[static_cast<std::size_t>(x)] - mean;
  }
  return out;
}

double dirichlet_inner_product(const FieldGrid& f, const FieldGrid& g) {
  if (f.size() != g.size()) throw std::invalid_argument("size mismatch");
  const int n = f.size();
  const bool wrap_y = f.grid.topology == Topology::torus || f.grid.topology == Topology::cylinder;
  const bool wrap_x = f.grid.topology == Topology::torus;
  double acc = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int xr = x + 1 < n ? x + 1 : (wrap_x ? 0 : -1);
      if (xr >= 0) {
        acc += (f.at(xr, y) - f.at(x, y)) * (g.at(xr, y) - g.at(x, y));
      }
      const int yu = y + 1 < n ? y + 1 : (wrap_y ? 0 : -1);
      if (yu >= 0) {
        acc += (f.at(x, yu) - f.at(x, y)) * (g.at(x, yu) - g.at(x, y));
      }
    }
  }
  return acc / 6.283185307179586476925286766559;
}

}  // namespace lqg
