#pragma once

#include <optional>

#include "lqg/path.hpp"
#include "lqg/rng.hpp"

namespace lqg {

enum class JumpSide { upward, downward };

// Spectrally one-sided alpha-stable Levy process.  The jump intensity is
// coefficient * x^{-1-alpha} dx on the jump side; coefficient 1 with
// alpha = 3/2 gives intensity x^{-5/2} dx, for which the count of jumps
// with size in [a,b] over time tau is Poisson with mean
// (2/3) tau (a^{-3/2} - b^{-3/2}).
struct StableSpec {
  double alpha = 1.5;
  JumpSide side = JumpSide::upward;
  double coefficient = 1.0;

  void check() const;

  // scale a0 of the Laplace exponent psi(lambda) = a0 lambda^alpha of the
  // compensated process (Gamma(-alpha) = Gamma(2-alpha)/(alpha(alpha-1)))
  double levy_scale() const;

  // coefficient that makes psi(lambda) = lambda^alpha exactly
  static double unit_scale_coefficient(double alpha);

  // expected ledger-jump count with |size| in [a, b] over a window tau
  double jump_count_mean(double a, double b, double tau) const;
};

// One compensated increment generator: jumps above jump_floor are drawn from
// the Poisson point process and summed per grid step (ledger resolution is
// the grid); sub-floor activity enters as a Gaussian with the truncated
// variance plus the compensating drift, so every path is a martingale.
class StableStepper {
 public:
  StableStepper(const StableSpec& spec, double jump_floor);

  // advance by dt; returns the continuous part and appends the step's jumps
  // (signed) to *jump_sum if non-null
  double step(double dt, Rng& rng, double* jump_sum) const;

  double jump_floor() const { return floor_; }

 private:
  StableSpec spec_;
  double floor_;
  double sigma2_rate_;  // variance of sub-floor Gaussian per unit time
  double drift_rate_;   // compensation for the uncompensated ledger jumps
  double jump_rate_;    // Poisson rate of ledger jumps per unit time
  double sign_;
};

// Path sampler on a uniform grid.  Jumps above jump_floor land in the ledger
// at grid times (several jumps in one step merge into one ledger entry).
CadlagPath sample_stable_path(const StableSpec& spec, double x0, double T, double dt,
                              double jump_floor, Rng& rng);

// Same, but absorbed at the first grid time where the path is <= 0.
CadlagPath sample_stable_path_absorbed(const StableSpec& spec, double x0, double T, double dt,
                                       double jump_floor, Rng& rng);

// Closed-form bound e * exp(-Phi(1/t) u) for P[sup_{s<=t} X_s >= u] when the
// spec has no positive jumps; Phi(q) = (q/a0)^{1/alpha}.
double supremum_tail_bound(const StableSpec& spec, double t, double u);

// Monte Carlo estimate of P[sup_{s<=t} X_s >= u], X_0 = 0.
double empirical_supremum_tail(const StableSpec& spec, double t, double u, std::size_t trials,
                               double dt, double jump_floor, Rng& rng);

struct RejectionBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Approximate sample of the process conditioned to stay >= 0 on [0, T] by
// rejection.  x0 = 0 starts from eps_start (documented bias).
CadlagPath condition_nonnegative(const StableSpec& spec, double x0, double T, double dt,
                                 double jump_floor, Rng& rng, double eps_start = 1e-3,
                                 std::size_t max_tries = 200000);

enum class ExcursionConditioning { length_near, max_at_least };

// Excursion via rejection: run from eps_start, kill at 0, accept when the
// conditioning event holds (|lifetime - T| <= tol*T, or sup >= L).
ExcursionSample sample_excursion(const StableSpec& spec, ExcursionConditioning conditioning,
                                 double target, double tol, double dt, double jump_floor,
                                 Rng& rng, double eps_start = 1e-2,
                                 std::size_t max_tries = 2000000);

// Lemma-6.1 view: the unexplored-boundary length at forward time t is the
// excursion value at (lifetime - t)+, clamped to 0 once absorbed.
double reverse_exploration_boundary(const ExcursionSample& excursion, double t);

}  // namespace lqg
