#include "lqg/csbp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lqg/stable.hpp"
#include "lqg/stats.hpp"

namespace lqg {

void CsbpSpec::check() const {
  if (!(alpha > 1.0) || !(alpha < 2.0)) throw std::invalid_argument("alpha must be in (1,2)");
  if (!(y0 >= 0.0)) throw std::invalid_argument("y0 must be >= 0");
}

double csbp_u(double lambda, double t, double alpha) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  if (!(t >= 0)) throw std::invalid_argument("t must be >= 0");
  return std::pow(std::pow(lambda, 1.0 - alpha) + (alpha - 1.0) * t, 1.0 / (1.0 - alpha));
}

double csbp_u_infinity(double t, double alpha) {
  if (!(t > 0)) throw std::invalid_argument("t must be positive");
  return std::pow((alpha - 1.0) * t, 1.0 / (1.0 - alpha));
}

double extinction_probability(double y0, double v, double alpha) {
  if (!(v > 0)) throw std::invalid_argument("v must be positive");
  if (y0 == 0.0) return 1.0;
  return std::exp(-y0 * csbp_u_infinity(v, alpha));
}

double csbp_phi(double q, double alpha) {
  if (!(q >= 0)) throw std::invalid_argument("q must be >= 0");
  return std::pow(q, 1.0 / alpha);
}

namespace {

// index of the absorbing sample (values <= 0 or declared terminal); one past
// the end when the path never absorbs
std::size_t absorption_index(const CadlagPath& p) {
  if (p.terminal) {
    const double idx = std::ceil((*p.terminal - p.t0) / p.dt - 1e-9);
    return std::min<std::size_t>(p.values.size(), static_cast<std::size_t>(std::max(0.0, idx)));
  }
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (p.values[i] <= 0.0) return i;
  }
  return p.values.size();
}

}  // namespace

std::vector<double> lamperti_clock(const CadlagPath& levy) {
  const std::size_t n_alive = absorption_index(levy);
  std::vector<double> tau(levy.values.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < levy.values.size(); ++i) {
    if (i < n_alive) {
      if (!(levy.values[i] > 0.0)) {
        throw std::invalid_argument("lamperti_clock: nonpositive value before terminal");
      }
      acc += levy.dt / levy.values[i];
    }
    tau[i + 1] = acc;
  }
  return tau;
}

CadlagPath csbp_from_levy(const CadlagPath& levy, double dtau) {
  if (levy.values.empty()) throw std::invalid_argument("csbp_from_levy: empty path");
  const std::size_t n_alive = absorption_index(levy);
  if (n_alive == 0) throw std::invalid_argument("csbp_from_levy: path starts absorbed");
  const std::vector<double> tau = lamperti_clock(levy);
  const double tau_end = tau[n_alive == levy.values.size() ? levy.values.size() - 1 : n_alive];
  if (dtau <= 0.0) {
    double xmax = 0.0;
    for (std::size_t i = 0; i < n_alive; ++i) xmax = std::max(xmax, levy.values[i]);
    dtau = levy.dt / (4.0 * xmax);
  }

  CadlagPath y;
  y.t0 = 0.0;
  y.dt = dtau;
  y.alpha = levy.alpha;
  const auto m = static_cast<std::size_t>(std::floor(tau_end / dtau));
  y.values.reserve(m + 1);
  std::size_t i = 0;  // active Levy index: largest i with tau[i] <= k dtau
  for (std::size_t k = 0; k <= m; ++k) {
    const double t = dtau * static_cast<double>(k);
    while (i + 1 < n_alive && tau[i + 1] <= t) ++i;
    y.values.push_back(levy.values[i]);
  }
  const bool absorbed = n_alive < levy.values.size();
  if (absorbed) {
    y.terminal = dtau * static_cast<double>(m + 1);
    y.values.push_back(0.0);
  }
  // jump ledger: remap times through the clock, rounded up to the y-grid
  for (const auto& j : levy.jumps) {
    const auto ji = static_cast<std::size_t>(std::llround((j.time - levy.t0) / levy.dt));
    if (ji == 0 || ji > n_alive) continue;
    const double jt = dtau * std::ceil(tau[std::min(ji, n_alive)] / dtau - 1e-12);
    if (!y.jumps.empty() && !(y.jumps.back().time < jt)) {
      y.jumps.back().size += j.size;
    } else {
      y.jumps.push_back(Jump{jt, j.size});
    }
  }
  return y;
}

CadlagPath levy_from_csbp(const CadlagPath& csbp, double dt_out) {
  if (csbp.values.empty()) throw std::invalid_argument("levy_from_csbp: empty path");
  const std::size_t n_alive = absorption_index(csbp);
  if (n_alive == 0) throw std::invalid_argument("levy_from_csbp: path starts absorbed");
  // inverse clock t(s) = int Y du, left-endpoint sum
  std::vector<double> tsum(csbp.values.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < csbp.values.size(); ++i) {
    if (i < n_alive) acc += csbp.dt * csbp.values[i];
    tsum[i + 1] = acc;
  }
  const double t_end = tsum[n_alive == csbp.values.size() ? csbp.values.size() - 1 : n_alive];
  if (dt_out <= 0.0) {
    double ymax = 0.0;
    for (std::size_t i = 0; i < n_alive; ++i) ymax = std::max(ymax, csbp.values[i]);
    dt_out = 4.0 * csbp.dt * ymax;
  }

  CadlagPath x;
  x.t0 = 0.0;
  x.dt = dt_out;
  x.alpha = csbp.alpha;
  const auto m = static_cast<std::size_t>(std::floor(t_end / dt_out));
  x.values.reserve(m + 1);
  std::size_t k = 0;
  for (std::size_t idx = 0; idx <= m; ++idx) {
    const double s = dt_out * static_cast<double>(idx);
    while (k + 1 < n_alive && tsum[k + 1] <= s) ++k;
    x.values.push_back(csbp.values[k]);
  }
  const bool absorbed = n_alive < csbp.values.size();
  if (absorbed) {
    x.terminal = dt_out * static_cast<double>(m + 1);
    x.values.push_back(0.0);
  }
  for (const auto& j : csbp.jumps) {
    const auto ji = static_cast<std::size_t>(std::llround((j.time - csbp.t0) / csbp.dt));
    if (ji == 0 || ji > n_alive) continue;
    const double jt = dt_out * std::ceil(tsum[std::min(ji, n_alive)] / dt_out - 1e-12);
    if (!x.jumps.empty() && !(x.jumps.back().time < jt)) {
      x.jumps.back().size += j.size;
    } else {
      x.jumps.push_back(Jump{jt, j.size});
    }
  }
  return x;
}

CadlagPath csbp_scaling(const CadlagPath& path, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  const double vscale = std::pow(beta, 1.0 / (1.0 - path.alpha));
  CadlagPath out = path;
  out.dt = path.dt / beta;
  out.t0 = path.t0 / beta;
  for (auto& v : out.values) v *= vscale;
  for (auto& j : out.jumps) {
    j.time /= beta;
    j.size *= vscale;
  }
  if (out.terminal) *out.terminal /= beta;
  return out;
}

namespace {

// one uniform-CSBP-clock Lamperti step; returns the new value of Y
double csbp_step(double y, double alpha, double c, const CsbpSimOptions& opt, Rng& rng) {
  const double dt_loc = opt.dtau * y;
  // relative jump floor, raised if the expected ledger count per step
  // would explode near absorption
  double floor = opt.jump_floor_rel * y;
  double rate = c * std::pow(floor, -alpha) / alpha;
  if (rate * dt_loc > opt.jump_count_cap) {
    floor = std::pow(c * dt_loc / (alpha * opt.jump_count_cap), 1.0 / alpha);
    rate = opt.jump_count_cap / dt_loc;
  }
  const double sigma2 = c * std::pow(floor, 2.0 - alpha) / (2.0 - alpha);
  const double drift = c * std::pow(floor, 1.0 - alpha) / (alpha - 1.0);
  double dy = -drift * dt_loc + std::sqrt(sigma2 * dt_loc) * rng.normal();
  const std::uint64_t k = rng.poisson(rate * dt_loc);
  for (std::uint64_t i = 0; i < k; ++i) {
    dy += floor * std::pow(rng.uniform(), -1.0 / alpha);
  }
  return y + dy;
}

}  // namespace

CsbpSimResult simulate_csbp(const CsbpSpec& spec, std::span<const double> record_times,
                            const CsbpSimOptions& opt, Rng& rng) {
  spec.check();
  const double a = spec.alpha;
  const double c = StableSpec::unit_scale_coefficient(a);  // psi(lambda) = lambda^alpha
  CsbpSimResult res;
  res.y_at.assign(record_times.size(), 0.0);

  double y = spec.y0;
  double tau = 0.0;
  std::size_t next_rec = 0;
  auto record_up_to = [&](double t_now, double value) {
    while (next_rec < record_times.size() && record_times[next_rec] <= t_now + 1e-15) {
      res.y_at[next_rec++] = value;
    }
  };
  record_up_to(0.0, y);
  if (y <= opt.absorb_floor) {
    res.extinction_time = 0.0;
    while (next_rec < record_times.size()) res.y_at[next_rec++] = 0.0;
    return res;
  }

  while (tau < opt.max_time) {
    const double dt_loc = opt.dtau * y;
    y = csbp_step(y, a, c, opt, rng);
    tau += opt.dtau;
    res.levy_time += dt_loc;
    if (y <= opt.absorb_floor) {
      res.extinction_time = tau;
      break;
    }
    record_up_to(tau, y);
    if (next_rec >= record_times.size() && record_times.size() > 0) return res;
  }
  while (next_rec < record_times.size()) res.y_at[next_rec++] = 0.0;
  return res;
}

CadlagPath simulate_csbp_path(const CsbpSpec& spec, const CsbpSimOptions& opt, Rng& rng) {
  spec.check();
  const double a = spec.alpha;
  const double c = StableSpec::unit_scale_coefficient(a);
  CadlagPath p;
  p.t0 = 0.0;
  p.dt = opt.dtau;
  p.alpha = a;
  double y = spec.y0;
  p.values.push_back(y);
  double tau = 0.0;
  while (tau < opt.max_time && y > opt.absorb_floor) {
    y = csbp_step(y, a, c, opt, rng);
    tau += opt.dtau;
    if (y <= opt.absorb_floor) {
      y = 0.0;
      p.terminal = tau;
    }
    p.values.push_back(y);
  }
  return p;
}

double csbp_one_step_mean_change(double y0, double alpha, std::size_t trials, Rng& rng,
                                 const CsbpSimOptions& opt) {
  if (trials < 1000) throw std::invalid_argument("need trials >= 1000");
  CsbpSpec spec{alpha, y0};
  const double times[1] = {1.0};
  double acc = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto r = simulate_csbp(spec, times, opt, rng);
    acc += std::fabs(r.y_at[0] - y0);
  }
  return acc / static_cast<double>(trials);
}

ClosedFormComparison exponential_integral_check(double y0, double q, double alpha,
                                                std::size_t trials, Rng& rng,
                                                const CsbpSimOptions& opt) {
  if (!(q > 0)) throw std::invalid_argument("q must be positive");
  CsbpSpec spec{alpha, y0};
  std::vector<double> integrals;
  integrals.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const auto r = simulate_csbp(spec, {}, opt, rng);
    if (r.extinction_time < 0) {
      throw std::runtime_error("exponential_integral_check: path not run to extinction");
    }
    integrals.push_back(r.levy_time);
  }
  ClosedFormComparison out;
  out.closed_form = std::exp(-csbp_phi(q, alpha) * y0);
  const double lams[1] = {q};
  const auto rows =
      laplace_compare(integrals, lams, [&](double) { return out.closed_form; });
  out.empirical = rows[0].empirical;
  out.stderr_mean = rows[0].stderr_mean;
  out.z = rows[0].z;
  return out;
}

}  // namespace lqg
