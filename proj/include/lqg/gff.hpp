#pragma once

#include <vector>

#include "lqg/grid.hpp"
#include "lqg/rng.hpp"

namespace lqg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Scalar field on a lattice.  Node (ix, iy) sits at physical position
// ((ix - size/2) a, (iy - size/2) a); values are row-major values[iy*size+ix].
// A log singularity at the origin is carried analytically as the coefficient
// of log(1/|z|), never folded into the stored values.
struct FieldGrid {
  Grid grid;
  std::vector<double> values;
  Normalization normalization = Normalization::row_mean_zero;
  double log_singularity = 0.0;

  int size() const { return grid.size; }
  double spacing() const { return grid.spacing; }
  double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.size + ix]; }
  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * grid.size + ix]; }
  double coord(int i) const { return (i - grid.size / 2) * grid.spacing; }

  // torus-aware distance from the origin node
  double origin_distance(int ix, int iy) const;
};

// Discrete GFF under the Dirichlet form (2 pi)^{-1} sum of squared gradient
// differences, so that circle-average increments have variance log(r2/r1).
//   torus          spectral synthesis over Fourier modes, zero mode dropped
//   box-dirichlet  DST synthesis on the interior, boundary nodes exactly 0
//   cylinder       periodic in y, Dirichlet caps in x, circle means removed
//   box-free       even reflection of a doubled Dirichlet field (the field
//                  sqrt(2) h of the odd/even decomposition); the free edge is
//                  row iy = 0, centered to mean zero on that edge
// Normalization unit_circle_average subtracts the circle average at radius 1
// (requires extent > 2).
FieldGrid sample_gff(const Grid& grid, Normalization normalization, RngStream stream);

// subtract the circle average at radius r0 about the origin (the general
// form of the h_1(0) = 0 normalization)
void normalize_circle_average(FieldGrid& field, double r0);

// Mean of the bilinear interpolation of the field at ceil(2 pi r / a)
// equally spaced points of the circle of radius r about z, plus the exact
// harmonic average of the analytic log singularity.  Requires r >= 2a and
// the circle inside the lattice.
double circle_average(const FieldGrid& field, Point z, double r);

struct RadialProcess {
  Point center;
  std::vector<double> levels;    // radii, strictly decreasing
  std::vector<double> averages;  // one circle average per radius
};

// circle averages at radii e^{-k Delta}, k = k0..k1
RadialProcess radial_process(const FieldGrid& field, Point center, int k0, int k1, double delta_k);

// max_z |h_r(z)| over lattice nodes z with |z| <= region_radius
double sup_circle_average(const FieldGrid& field, double r, double region_radius);

// Discrete-harmonic extension: cells inside the region mask are replaced by
// the solution of the 4-neighbor mean equation with the outside values as
// boundary data (SOR to residual < 1e-10).  The region must not touch the
// lattice boundary.
FieldGrid harmonic_extension(const FieldGrid& field, const std::vector<uint8_t>& region_mask);

// Radial field of an alpha-quantum cone seen from the origin: at radius
// e^{-u}, the value is B_u + alpha u for u >= 0 (B standard Brownian motion)
// and Btilde_{-u} + alpha u for u <= 0 with Btilde_v + (Q - alpha) v >= 0 for
// all v in [0, depth], realized by rejection on the grid.
RadialProcess cone_radial_process(double alpha, double gamma, double depth, double du,
                                  RngStream stream);

inline double lqg_q_constant(double gamma) { return 2.0 / gamma + gamma / 2.0; }

// --- binary field file (magic LQGF) -----------------------------------------
void write_field_binary(const FieldGrid& field, const std::string& filename);
FieldGrid read_field_binary(const std::string& filename);

}  // namespace lqg
