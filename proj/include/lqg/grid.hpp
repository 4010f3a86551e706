#pragma once

#include <stdexcept>
#include <string>

namespace lqg {

enum class Topology { box_dirichlet, torus, cylinder, box_free };
enum class Normalization { zero_boundary, unit_circle_average, row_mean_zero };

inline bool topology_is_spectral(Topology t) {
  return t == Topology::box_dirichlet || t == Topology::torus || t == Topology::cylinder;
}

// Square (or cylindrical) lattice: `size` cells per side, spacing `a`.
// Node (ix, iy) sits at physical position ((ix - size/2) a, (iy - size/2) a),
// so the origin is an exact lattice node.
struct Grid {
  int size = 0;
  double spacing = 1.0;
  Topology topology = Topology::torus;

  double extent() const { return spacing * size; }

  void check() const {
    if (size < 8) throw std::invalid_argument("grid size must be >= 8");
    if (!(spacing > 0)) throw std::invalid_argument("grid spacing must be positive");
    if (topology_is_spectral(topology) && (size & (size - 1)) != 0) {
      throw std::invalid_argument("grid size must be a power of two for spectral topology, got " +
                                  std::to_string(size));
    }
  }
};

}  // namespace lqg
