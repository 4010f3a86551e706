#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lqg/rng.hpp"

namespace lqg {

// Log-log regression result; the carrier for every estimated exponent.
struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t n = 0;
  double r2 = 0.0;
};

// OLS on (log x, log y); x, y must be positive, n >= 3.
ExponentFit loglog_fit(std::span<const double> x, std::span<const double> y);

// plain OLS of y against x (helper for already-logged data)
ExponentFit linear_fit(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);  // unbiased
double median(std::vector<double> v);               // by copy, nth_element

// --- closed-form tails -----------------------------------------------------

// P[N(0,1) >= lambda], computed via erfc
double gaussian_upper_tail(double lambda);

// Chernoff bound exp(lambda (a - a log a - 1)) for P[Poisson(lambda) <= a lambda]
// (a < 1) and P[Poisson(lambda) >= a lambda] (a > 1)
double poisson_deviation_bound(double lambda, double a);

// regularized incomplete gamma Q(s, x) and chi-square upper tail
double gamma_q(double s, double x);
double chi2_sf(double x, int dof);

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2)
double kolmogorov_tail(double lambda);

// --- hypothesis tests -------------------------------------------------------

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

// one-sample KS against a continuous CDF
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);
// two-sample KS
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

struct Chi2Result {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
};

// chi-square goodness of fit; expected counts (not probabilities)
Chi2Result chi2_gof(std::span<const double> observed, std::span<const double> expected,
                    int constraints_fitted = 0);

// --- Laplace-transform comparison -------------------------------------------

struct LaplaceRow {
  double lambda = 0.0;
  double empirical = 0.0;
  double closed_form = 0.0;
  double stderr_mean = 0.0;
  double z = 0.0;
};

// per lambda: empirical mean of exp(-lambda sample) against a closed form
std::vector<LaplaceRow> laplace_compare(std::span<const double> samples,
                                        std::span<const double> lambdas,
                                        const std::function<double(double)>& closed_form);

// --- Hoelder-norm tail estimator ---------------------------------------------

struct HolderTail {
  ExponentFit fit;             // slope of log P[M >= t] vs log t (negated exponent inside)
  std::vector<double> norms;   // empirical M per sample
  bool power_law = false;      // false when the tail is degenerate/empty
};

// Empirical Hoelder constant over the dyadic-pair construction:
//   M = max over depth k <= max_depth, adjacent pairs u,v in D_k of
//       |X_u - X_v| / |u - v|^gamma_exp,
// for 1-d processes sampled on a 2^max_depth grid.  `sampler(i, out)` fills
// sample i.  The tail exponent is fitted on P[M >= t] over the t_grid.
HolderTail holder_norm_tail(const std::function<void(std::size_t, std::vector<double>&)>& sampler,
                            std::size_t trials, double gamma_exp, int max_depth,
                            std::span<const double> t_grid);

}  // namespace lqg
