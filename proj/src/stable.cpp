#include "lqg/stable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqg {

void StableSpec::check() const {
  if (!(alpha > 1.0) || !(alpha < 2.0)) throw std::invalid_argument("alpha must be in (1,2)");
  if (!(coefficient > 0.0)) throw std::invalid_argument("levy density coefficient must be > 0");
}

double StableSpec::levy_scale() const {
  // |Gamma(-alpha)| = Gamma(2-alpha) / (alpha (alpha-1)) for alpha in (1,2)
  return coefficient * std::tgamma(2.0 - alpha) / (alpha * (alpha - 1.0));
}

double StableSpec::unit_scale_coefficient(double alpha) {
  return alpha * (alpha - 1.0) / std::tgamma(2.0 - alpha);
}

double StableSpec::jump_count_mean(double a, double b, double tau) const {
  if (!(0 < a && a < b)) throw std::invalid_argument("need 0 < a < b");
  return coefficient * tau * (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
}

StableStepper::StableStepper(const StableSpec& spec, double jump_floor)
    : spec_(spec), floor_(jump_floor) {
  spec.check();
  if (!(jump_floor > 0.0)) throw std::invalid_argument("jump_floor must be positive");
  const double a = spec.alpha, c = spec.coefficient;
  sigma2_rate_ = c * std::pow(jump_floor, 2.0 - a) / (2.0 - a);
  jump_rate_ = c * std::pow(jump_floor, -a) / a;
  drift_rate_ = c * std::pow(jump_floor, 1.0 - a) / (a - 1.0);
  sign_ = (spec.side == JumpSide::upward) ? 1.0 : -1.0;
}

double StableStepper::step(double dt, Rng& rng, double* jump_sum) const {
  double dx = -sign_ * drift_rate_ * dt + std::sqrt(sigma2_rate_ * dt) * rng.normal();
  const std::uint64_t k = rng.poisson(jump_rate_ * dt);
  double js = 0.0;
  for (std::uint64_t i = 0; i < k; ++i) {
    js += sign_ * floor_ * std::pow(rng.uniform(), -1.0 / spec_.alpha);
  }
  if (jump_sum) *jump_sum += js;
  return dx;
}

namespace {

CadlagPath sample_impl(const StableSpec& spec, double x0, double T, double dt, double jump_floor,
                       Rng& rng, bool absorb) {
  if (!(T > 0) || !(dt > 0)) throw std::invalid_argument("T and dt must be positive");
  StableStepper stepper(spec, jump_floor);
  const auto n = static_cast<std::size_t>(std::llround(std::ceil(T / dt)));
  CadlagPath p;
  p.t0 = 0.0;
  p.dt = dt;
  p.alpha = spec.alpha;
  p.values.reserve(n + 1);
  p.values.push_back(x0);
  double x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    double jump_sum = 0.0;
    x += stepper.step(dt, rng, &jump_sum);
    const double t_next = dt * static_cast<double>(i + 1);
    if (jump_sum != 0.0) {
      x += jump_sum;
      p.jumps.push_back(Jump{t_next, jump_sum});
    }
    if (absorb && x <= 0.0) {
      p.values.push_back(0.0);
      p.terminal = t_next;
      break;
    }
    p.values.push_back(x);
  }
  return p;
}

}  // namespace

CadlagPath sample_stable_path(const StableSpec& spec, double x0, double T, double dt,
                              double jump_floor, Rng& rng) {
  return sample_impl(spec, x0, T, dt, jump_floor, rng, false);
}

CadlagPath sample_stable_path_absorbed(const StableSpec& spec, double x0, double T, double dt,
                                       double jump_floor, Rng& rng) {
  return sample_impl(spec, x0, T, dt, jump_floor, rng, true);
}

double supremum_tail_bound(const StableSpec& spec, double t, double u) {
  spec.check();
  if (spec.side != JumpSide::downward) {
    throw std::invalid_argument("supremum tail bound requires a process without positive jumps");
  }
  if (!(t > 0)) throw std::invalid_argument("t must be positive");
  if (u <= 0) return 1.0;
  const double phi = std::pow(1.0 / (t * spec.levy_scale()), 1.0 / spec.alpha);
  return std::min(1.0, std::exp(1.0 - phi * u));
}

double empirical_supremum_tail(const StableSpec& spec, double t, double u, std::size_t trials,
                               double dt, double jump_floor, Rng& rng) {
  StableStepper stepper(spec, jump_floor);
  const auto n = static_cast<std::size_t>(std::llround(std::ceil(t / dt)));
  std::size_t hits = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    double x = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double js = 0.0;
      x += stepper.step(dt, rng, &js) + js;
      if (x > sup) sup = x;
      if (sup >= u) break;
    }
    hits += (sup >= u);
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

CadlagPath condition_nonnegative(const StableSpec& spec, double x0, double T, double dt,
                                 double jump_floor, Rng& rng, double eps_start,
                                 std::size_t max_tries) {
  spec.check();
  if (spec.side != JumpSide::downward) {
    throw std::invalid_argument("condition_nonnegative expects only-downward-jumps");
  }
  if (x0 < 0) throw std::invalid_argument("x0 must be >= 0");
  const double start = (x0 == 0.0) ? eps_start : x0;
  for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
    CadlagPath p = sample_impl(spec, start, T, dt, jump_floor, rng, false);
    bool ok = true;
    for (double v : p.values) {
      if (v < 0.0) {
        ok = false;
        break;
      }
    }
    if (ok) return p;
  }
  throw RejectionBudgetExceeded("condition_nonnegative: rejection budget exceeded");
}

ExcursionSample sample_excursion(const StableSpec& spec, ExcursionConditioning conditioning,
                                 double target, double tol, double dt, double jump_floor,
                                 Rng& rng, double eps_start, std::size_t max_tries) {
  spec.check();
  if (!(target > 0) || !(tol > 0)) throw std::invalid_argument("target and tol must be positive");
  const double horizon = (conditioning == ExcursionConditioning::length_near)
                             ? target * (1.0 + tol)
                             : target * 50.0;  // generous cap for max>=L runs
  StableStepper stepper(spec, jump_floor);
  const auto n_max = static_cast<std::size_t>(std::llround(std::ceil(horizon / dt)));

  for (std::size_t attempt = 0; attempt < max_tries; ++attempt) {
    CadlagPath p;
    p.t0 = 0.0;
    p.dt = dt;
    p.alpha = spec.alpha;
    p.values.push_back(eps_start);
    double x = eps_start, sup = eps_start;
    std::optional<double> lifetime;
    for (std::size_t i = 0; i < n_max; ++i) {
      double js = 0.0;
      x += stepper.step(dt, rng, &js);
      const double t_next = dt * static_cast<double>(i + 1);
      if (js != 0.0) {
        x += js;
        p.jumps.push_back(Jump{t_next, js});
      }
      if (x <= 0.0) {
        p.values.push_back(0.0);
        p.terminal = t_next;
        lifetime = t_next;
        break;
      }
      p.values.push_back(x);
      if (x > sup) sup = x;
      // early reject: cannot satisfy length conditioning any more
      if (conditioning == ExcursionConditioning::length_near && t_next > target * (1.0 + tol)) {
        break;
      }
    }
    if (!lifetime) continue;
    const bool accept = (conditioning == ExcursionConditioning::length_near)
                            ? std::fabs(*lifetime - target) <= tol * target
                            : sup >= target;
    if (accept) {
      ExcursionSample e;
      e.path = std::move(p);
      e.lifetime = *lifetime;
      return e;
    }
  }
  throw RejectionBudgetExceeded("sample_excursion: rejection budget exceeded");
}

double reverse_exploration_boundary(const ExcursionSample& excursion, double t) {
  if (t < 0) throw std::invalid_argument("t must be >= 0");
  if (t >= excursion.lifetime) return 0.0;
  return excursion.path.value_at(excursion.lifetime - t);
}

}  // namespace lqg
