#pragma once

#include <vector>

#include "lqg/path.hpp"
#include "lqg/rng.hpp"
#include "lqg/stable.hpp"

namespace lqg {

// One necklace of the delta-approximation at the boundary-length level.
// left/right are the two independent spectrally positive 3/2-stable
// boundary-length components over [0, delta], each with Levy density
// coefficient 1/2 and starting at x_before/2, so their sum has the
// unit-coefficient law of X.  The top length is the total drawdown
//   T = x_before - (inf left + inf right)
// and the bottom is defined through the conservation identity
//   B - T = x_after - x_before  (exact, by construction).
struct NecklaceRecord {
  int j = 0;
  CadlagPath left;
  CadlagPath right;
  double top = 0.0;
  double bottom = 0.0;
  double x_before = 0.0;
  double x_after = 0.0;
};

struct NecklaceLedger {
  double delta = 0.0;
  double dt = 0.0;
  std::vector<NecklaceRecord> records;
  bool terminated = false;  // boundary length hit 0; records truncated
};

NecklaceLedger build_necklace_ledger(double delta, int n, double x0, double dt,
                                     double jump_floor, Rng& rng);

// estimate of the Lemma-7.1 constant: mean top length / delta^{2/3}
double calibrate_top_constant(const NecklaceLedger& ledger);

// Quantum natural time -> quantum distance time: tau[i] = sum_{j<i} dt / X_j
// over the fine grid of the boundary path (same formula as the Lamperti
// clock).  Errors on nonpositive boundary before the terminal time.
std::vector<double> distance_time_change(const CadlagPath& boundary);

// Marked boundary: circumference plus sorted mark positions; segment lengths
// are the cyclic gaps between consecutive marks.
struct MarkedBoundary {
  double circumference = 0.0;
  std::vector<double> marks;

  std::vector<double> segment_lengths() const;
};

struct WalkStep {
  MarkedBoundary state;           // after gluing necklace j
  std::vector<uint8_t> hits;      // per mark: swallowed by this necklace
};

struct MarkedWalk {
  MarkedBoundary initial;
  std::vector<WalkStep> steps;
};

// First-approximation dynamics: per necklace, a uniform glue position; the
// top arc of length min(T_j, X_before) is consumed and the bottom arc of
// length B_j inserted at the glue point.  Marks inside the consumed arc all
// move to the necklace's bottom mark (one uniform position on the inserted
// arc); the rest shift with the local length change.
MarkedWalk marked_point_walk(const NecklaceLedger& ledger, int k, Rng& rng);

// c^{-1} delta^{1/3} x (running hit count of mark 0), as a path in quantum
// natural time (grid delta).
CadlagPath step_count_distance(const MarkedWalk& walk, const NecklaceLedger& ledger, double c);

// the stitched fine-grid boundary-length path X of the whole exploration
CadlagPath ledger_boundary_path(const NecklaceLedger& ledger);

// Per-segment length paths indexed by quantum distance time: segment state
// after necklace j is assigned distance time tau(j delta); resampled on a
// uniform grid of step dt_dist.
std::vector<CadlagPath> segment_length_processes(const MarkedWalk& walk,
                                                 const NecklaceLedger& ledger, double dt_dist);

// Reverse exploration ledger: delta blocks of the time-reversed excursion,
// built from the terminal end; the final block keeps the residual length
// lifetime mod delta.  Single-path records (right component empty).
NecklaceLedger reverse_delta_exploration(const ExcursionSample& excursion, double delta);

}  // namespace lqg
