#pragma once

#include <vector>

#include "lqg/gff.hpp"
#include "lqg/rng.hpp"

namespace lqg {

// Bessel excursion from the windowed excursion measure: lifetime drawn from
// the normalized density ~ t^{delta/2 - 2} on [t_min, t_max], bridge of
// dimension 4 - delta from 0 to 0 over the lifetime.
struct BesselExcursion {
  double delta = 0.0;
  double lifetime = 0.0;
  double dt = 0.0;
  std::vector<double> path;  // nonnegative, endpoints 0
};

BesselExcursion sample_bessel_excursion(double delta, double t_min, double t_max, double dt,
                                        Rng& rng);

// squared-Bessel bridge of dimension d from 0 to 0 over [0, T]:
// Gaussian-bridge components when d is an integer, Euler-Maruyama on
// dX = (d - 2X/(T-s)) ds + 2 sqrt(X) dW with reflection at 1e-12 otherwise
std::vector<double> squared_bessel_bridge(double d, double T, double dt, Rng& rng);

enum class SurfaceRole { disk, sphere, cone, wedge };

// disk: delta = 3 - 4/gamma^2, sphere: delta = 4 - 8/gamma^2
double role_bessel_dimension(SurfaceRole role, double gamma);

// H1 projection of the field as a function of the horizontal coordinate.
struct RadialEncoding {
  SurfaceRole role;
  double gamma = 0.0;
  double du = 0.0;      // horizontal grid step
  double u0 = 0.0;      // coordinate of process.front()
  std::vector<double> process;
};

// Disk/sphere encodings: (2/gamma) log Z with the excursion reparameterized
// so the encoding has quadratic variation qv du (disk qv = 2, sphere qv = 1),
// translated so u = 0 sits at the lifetime midpoint.  Cone/wedge encodings
// are the drifted-Brownian descriptions with drift Q - alpha (wedge runs at
// twice the variance).
RadialEncoding radial_encoding_from_excursion(SurfaceRole role, double gamma,
                                              const BesselExcursion& excursion, double du,
                                              double extent);
RadialEncoding radial_encoding_drifted(SurfaceRole role, double gamma, double alpha, double du,
                                       double extent, Rng& rng);

// Broadcast the encoding along the circles of a cylinder field with circle
// means removed; the circle means of the result equal the encoding exactly.
FieldGrid assemble_cylinder_field(const RadialEncoding& encoding, const FieldGrid& lateral,
                                  double gamma);

// discrete Dirichlet inner product (2 pi)^{-1} sum over lattice edges
double dirichlet_inner_product(const FieldGrid& f, const FieldGrid& g);

}  // namespace lqg
