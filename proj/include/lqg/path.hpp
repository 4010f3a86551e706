#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lqg {

struct Jump {
  double time = 0.0;
  double size = 0.0;
};

// Right-continuous path on a uniform time grid with an explicit ledger of
// jumps above a floor.  Sub-floor activity is folded into the grid samples.
struct CadlagPath {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;  // sample i is the value at t0 + i*dt
  std::vector<Jump> jumps;     // times on the grid, strictly increasing
  double alpha = 2.0;          // stability index metadata
  std::optional<double> terminal;  // absorption time (first hit of 0)

  std::size_t len() const { return values.size(); }

  double end_time() const {
    return values.empty() ? t0 : t0 + dt * static_cast<double>(values.size() - 1);
  }

  // grid sample active at time t (clamped to the recorded range, 0 at and
  // after the terminal time)
  double value_at(double t) const {
    if (values.empty()) return 0.0;
    if (terminal && t >= *terminal) return 0.0;
    if (t <= t0) return values.front();
    auto idx = static_cast<std::size_t>(std::floor((t - t0) / dt));
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
  }

  // checks the structural invariants; fills `why` on failure
  bool validate(std::string* why = nullptr) const;
};

// A CadlagPath flagged as an excursion: starts and ends at 0 (within one
// grid step), strictly positive on the open interior.
struct ExcursionSample {
  CadlagPath path;
  double lifetime = 0.0;

  bool validate(std::string* why = nullptr) const;
};

// Time-reversal: value ledger reversed, jump times mirrored about the
// midpoint, jump signs flipped (an upward jump becomes downward).
CadlagPath time_reverse(const CadlagPath& p);

}  // namespace lqg
