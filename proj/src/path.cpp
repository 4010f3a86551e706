#include "lqg/path.hpp"

#include <algorithm>

namespace lqg {

bool CadlagPath::validate(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (!(dt > 0.0)) return fail("dt must be positive");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) return fail("non-finite value at index " + std::to_string(i));
  }
  const double t_end = t0 + dt * static_cast<double>(values.size());
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const auto& j = jumps[i];
    if (!std::isfinite(j.time) || !std::isfinite(j.size))
      return fail("non-finite jump at index " + std::to_string(i));
    if (j.time < t0 - 1e-12 || j.time > t_end + 1e-12)
      return fail("jump time out of range at index " + std::to_string(i));
    if (i > 0 && !(jumps[i - 1].time < j.time))
      return fail("jump times not strictly increasing at index " + std::to_string(i));
  }
  if (terminal) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double t = t0 + dt * static_cast<double>(i);
      if (t >= *terminal && values[i] != 0.0)
        return fail("nonzero value after terminal at index " + std::to_string(i));
    }
  }
  return true;
}

bool ExcursionSample::validate(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (!path.validate(why)) return false;
  if (!(lifetime > 0.0)) return fail("lifetime must be positive");
  if (path.values.empty()) return fail("empty excursion");
  const double dt = path.dt;
  if (std::fabs(path.values.front()) > 0.0 && path.values.front() > dt * 1e6)
    return fail("excursion does not start near 0");
  // interior strictly positive, endpoints at 0 within one grid step of the
  // recorded lifetime
  const std::size_t n = path.values.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double t = path.t0 + dt * static_cast<double>(i);
    if (t > dt && t < lifetime - dt && !(path.values[i] > 0.0))
      return fail("excursion not positive on the interior at index " + std::to_string(i));
  }
  if (std::fabs(path.end_time() - lifetime) > dt + 1e-12)
    return fail("grid extent does not match lifetime");
  return true;
}

CadlagPath time_reverse(const CadlagPath& p) {
  CadlagPath r = p;
  std::reverse(r.values.begin(), r.values.end());
  const double t_end = p.t0 + p.dt * static_cast<double>(p.values.size());
  r.jumps.clear();
  r.jumps.reserve(p.jumps.size());
  for (auto it = p.jumps.rbegin(); it != p.jumps.rend(); ++it) {
    r.jumps.push_back(Jump{p.t0 + (t_end - it->time), -it->size});
  }
  r.terminal.reset();
  return r;
}

}  // namespace lqg
