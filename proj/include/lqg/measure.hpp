#pragma once

#include <vector>

#include "lqg/gff.hpp"
#include "lqg/stats.hpp"

namespace lqg {

// gamma-LQG area measure on the lattice: cell mass
//   a^{2 + gamma^2/2} exp(gamma (h(z) + singular part))
// with the regularization radius fixed at one lattice spacing (the cell
// value stands in for h_spacing).  Deterministic given the field; under
// h -> h + C every mass picks up the exact factor e^{gamma C}.
struct MeasureGrid {
  Grid grid;
  double gamma = 0.0;
  std::vector<double> cell_mass;
  double total = 0.0;

  double at(int ix, int iy) const {
    return cell_mass[static_cast<std::size_t>(iy) * grid.size + ix];
  }
};

MeasureGrid area_measure(const FieldGrid& field, double gamma);

// Boundary measure along the free edge (iy = 0 cells of a box-free field):
// segment mass a^{1 + gamma^2/4} exp((gamma/2) h); h -> h + C multiplies the
// total by exactly e^{gamma C / 2}.
struct BoundaryMeasure {
  double gamma = 0.0;
  std::vector<double> segment_mass;
  double total = 0.0;
};

BoundaryMeasure boundary_measure(const FieldGrid& field, const std::vector<int>& curve_ix,
                                 double gamma);

// Sum of cell masses with center strictly within r of z (half-open at the
// radius); torus distances use the minimal image.  Errors when the ball
// exits a non-periodic lattice.
double ball_mass(const MeasureGrid& measure, Point z, double r);

// Smallest lattice radius r with ball_mass(z, r) >= mass_target, by scanning
// the sorted cell-center distances; error when the target is unreachable.
double approximate_metric_ball_radius(const MeasureGrid& measure, Point z, double mass_target);

// Moment-exponent fit: log E[ball_mass^q] against log s over the given radii,
// pooled over `trials` zero-mean torus fields at `grid_size` and a sublattice
// of ball centers.  Pre: 0 < q < 4/gamma^2 (the moment range of Lemma-type
// multifractal bounds).
ExponentFit moment_exponent(double gamma, double q, std::span<const double> radii,
                            std::size_t trials, int grid_size, std::uint64_t seed, int threads);

// xi(q) = (2 + gamma^2/2) q - (gamma^2/2) q^2
inline double multifractal_xi(double gamma, double q) {
  const double g2 = gamma * gamma;
  return (2.0 + g2 / 2.0) * q - (g2 / 2.0) * q * q;
}

}  // namespace lqg
