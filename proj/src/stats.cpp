#include "lqg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqg {

ExponentFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("linear_fit: need n >= 3");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0)) throw std::invalid_argument("linear_fit: degenerate x values");
  ExponentFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  f.stderr_slope = n > 2 ? std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
  return f;
}

ExponentFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_fit: size mismatch");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("loglog_fit: nonpositive input");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly);
}

double mean(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (static_cast<double>(v.size()) - 1.0);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t k = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  double hi = v[k];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return 0.5 * (v[k - 1] + hi);
}

double gaussian_upper_tail(double lambda) {
  return 0.5 * std::erfc(lambda / std::sqrt(2.0));
}

double poisson_deviation_bound(double lambda, double a) {
  if (!(a > 0)) return 1.0;
  return std::exp(lambda * (a - a * std::log(a) - 1.0));
}

namespace {

// regularized incomplete gamma, series and continued-fraction branches
double gamma_p_series(double s, double x) {
  double sum = 1.0 / s;
  double term = sum;
  for (int k = 1; k < 1000; ++k) {
    term *= x / (s + k);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_q_cf(double s, double x) {
  // Lentz continued fraction for Q(s,x)
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

double gamma_q(double s, double x) {
  if (x < 0 || s <= 0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double chi2_sf(double x, int dof) {
  if (dof <= 0) throw std::invalid_argument("chi2_sf: dof must be positive");
  return gamma_q(0.5 * dof, 0.5 * x);
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * s));
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  KsResult r;
  r.statistic = d;
  r.n = samples.size();
  const double en = std::sqrt(n);
  r.p_value = kolmogorov_tail((en + 0.12 + 0.11 / en) * d);
  return r;
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_test_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.n = a.size() + b.size();
  const double en = std::sqrt(na * nb / (na + nb));
  r.p_value = kolmogorov_tail((en + 0.12 + 0.11 / en) * d);
  return r;
}

Chi2Result chi2_gof(std::span<const double> observed, std::span<const double> expected,
                    int constraints_fitted) {
  if (observed.size() != expected.size() || observed.empty()) {
    throw std::invalid_argument("chi2_gof: size mismatch");
  }
  double stat = 0.0;
  int bins = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) continue;
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
    ++bins;
  }
  Chi2Result r;
  r.statistic = stat;
  r.dof = std::max(1, bins - 1 - constraints_fitted);
  r.p_value = chi2_sf(stat, r.dof);
  return r;
}

std::vector<LaplaceRow> laplace_compare(std::span<const double> samples,
                                        std::span<const double> lambdas,
                                        const std::function<double(double)>& closed_form) {
  if (samples.empty()) throw std::invalid_argument("laplace_compare: empty sample set");
  std::vector<LaplaceRow> rows;
  rows.reserve(lambdas.size());
  const auto n = static_cast<double>(samples.size());
  for (double lam : lambdas) {
    double s = 0, s2 = 0;
    for (double x : samples) {
      const double e = std::exp(-lam * x);
      s += e;
      s2 += e * e;
    }
    LaplaceRow row;
    row.lambda = lam;
    row.empirical = s / n;
    row.closed_form = closed_form(lam);
    const double var = std::max(0.0, (s2 / n - row.empirical * row.empirical)) * n / (n - 1.0);
    row.stderr_mean = std::sqrt(var / n);
    row.z = row.stderr_mean > 0 ? (row.empirical - row.closed_form) / row.stderr_mean : 0.0;
    rows.push_back(row);
  }
  return rows;
}

HolderTail holder_norm_tail(const std::function<void(std::size_t, std::vector<double>&)>& sampler,
                            std::size_t trials, double gamma_exp, int max_depth,
                            std::span<const double> t_grid) {
  if (max_depth < 1 || max_depth > 20) throw std::invalid_argument("holder_norm_tail: bad depth");
  const std::size_t npts = (static_cast<std::size_t>(1) << max_depth) + 1;
  HolderTail out;
  out.norms.resize(trials);
  std::vector<double> x;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    x.assign(npts, 0.0);
    sampler(trial, x);
    if (x.size() != npts) throw std::invalid_argument("holder_norm_tail: sampler size mismatch");
    double m = 0.0;
    for (int k = 1; k <= max_depth; ++k) {
      const std::size_t step = npts - 1 >> k;          // spacing of D_k in samples
      const double h = static_cast<double>(step) / static_cast<double>(npts - 1);
      const double scale = std::pow(h, -gamma_exp);
      for (std::size_t i = 0; i + step < npts; i += step) {
        m = std::max(m, std::fabs(x[i + step] - x[i]) * scale);
      }
    }
    out.norms[trial] = m;
  }
  // empirical tail on the t grid; zero-count cells are floored at 1/(2 trials)
  std::vector<double> ts, ps;
  bool any_zero = false;
  for (double t : t_grid) {
    std::size_t count = 0;
    for (double m : out.norms) count += (m >= t);
    double p = static_cast<double>(count) / static_cast<double>(trials);
    if (count == 0) {
      p = 0.5 / static_cast<double>(trials);
      any_zero = true;
    }
    ts.push_back(t);
    ps.push_back(p);
  }
  out.power_law = false;
  if (ts.size() >= 3) {
    out.fit = loglog_fit(ts, ps);
    // call the tail a power law when counts are alive across the grid and
    // the fit explains the decay
    out.power_law = !any_zero && out.fit.r2 > 0.9;
  }
  return out;
}

}  // namespace lqg
