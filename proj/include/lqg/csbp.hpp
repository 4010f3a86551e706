#pragma once

#include <span>
#include <vector>

#include "lqg/path.hpp"
#include "lqg/rng.hpp"

namespace lqg {

// Continuous-state branching process with mechanism psi(u) = u^alpha,
// alpha in (1,2); the "alpha-stable CSBP".
struct CsbpSpec {
  double alpha = 1.5;
  double y0 = 1.0;

  void check() const;
};

// u_t(lambda) = (lambda^{1-alpha} + (alpha-1) t)^{1/(1-alpha)}; the Laplace
// functional satisfies E[exp(-lambda Y_t)] = exp(-Y_0 u_t(lambda)).
double csbp_u(double lambda, double t, double alpha);

// lambda -> infinity limit of u_t; ((alpha-1) t)^{1/(1-alpha)}
double csbp_u_infinity(double t, double alpha);

// P[extinct by time v] = exp(-y0 u_v(inf)); for alpha = 3/2 this is
// exp(-4 y0 / v^2).
double extinction_probability(double y0, double v, double alpha);

// Phi(q) = sup{theta >= 0 : theta^alpha = q} = q^{1/alpha}
double csbp_phi(double q, double alpha);

// --- Lamperti transforms on recorded paths ----------------------------------
//
// Forward: Y_t = X_{s*(t)} with s(t) = int_0^t du / X_u, computed as a
// left-endpoint Riemann sum on the path grid.  Values are copied, never
// recomputed, so round trips recover the input values exactly with at most
// one grid cell of time misalignment.  dtau = 0 picks dt / (4 max X).
CadlagPath csbp_from_levy(const CadlagPath& levy, double dtau = 0.0);

// Inverse: X_s = Y_{t*(s)} with t(s) = int_0^s Y_u du (left-endpoint sum).
// dt_out = 0 picks 4 dtau max Y.
CadlagPath levy_from_csbp(const CadlagPath& csbp, double dt_out = 0.0);

// the forward clock itself: tau[i] = sum_{j<i} dt / X_j, frozen at absorption
std::vector<double> lamperti_clock(const CadlagPath& levy);

// Scaling: Y~_t = beta^{1/(1-alpha)} Y_{beta t}; exact on the grid.
CadlagPath csbp_scaling(const CadlagPath& path, double beta);

// --- direct simulation --------------------------------------------------------
//
// Lamperti stepper in uniform CSBP time: each step advances the CSBP clock
// by exactly dtau by driving the underlying spectrally positive Levy process
// (psi(lambda) = lambda^alpha) for dt = dtau * Y.  The jump floor is relative
// (floor = jump_floor_rel * Y) with the per-step expected ledger-jump count
// capped by raising the floor; sub-floor jumps enter through a
// variance-matched Gaussian.  Y <= absorb_floor is absorbed at 0.
struct CsbpSimOptions {
  double dtau = 1e-4;
  double jump_floor_rel = 1e-3;
  double absorb_floor = 1e-9;
  double max_time = 1e9;          // cap on the CSBP clock
  double jump_count_cap = 16.0;   // expected ledger jumps per step
};

struct CsbpSimResult {
  std::vector<double> y_at;        // Y at the requested CSBP times (0 after extinction)
  double extinction_time = -1.0;   // CSBP clock at absorption; <0 if not extinct by max_time
  double levy_time = 0.0;          // driving Levy time consumed = int_0^zeta Y_s ds
};

// record_times must be sorted ascending
CsbpSimResult simulate_csbp(const CsbpSpec& spec, std::span<const double> record_times,
                            const CsbpSimOptions& opt, Rng& rng);

// full path on the uniform CSBP clock (grid opt.dtau), run to extinction or
// opt.max_time; terminal set at absorption
CadlagPath simulate_csbp_path(const CsbpSpec& spec, const CsbpSimOptions& opt, Rng& rng);

// Monte Carlo E|Y_1 - y0|
double csbp_one_step_mean_change(double y0, double alpha, std::size_t trials, Rng& rng,
                                 const CsbpSimOptions& opt = {});

struct ClosedFormComparison {
  double closed_form = 0.0;
  double empirical = 0.0;
  double stderr_mean = 0.0;
  double z = 0.0;
};

// E[exp(-q int_0^zeta Y ds)] against exp(-q^{1/alpha} y0); the integral of Y
// over its lifetime equals the Levy time consumed by the Lamperti clock.
ClosedFormComparison exponential_integral_check(double y0, double q, double alpha,
                                                std::size_t trials, Rng& rng,
                                                const CsbpSimOptions& opt = {});

}  // namespace lqg
