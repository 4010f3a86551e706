#include "lqg/qle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lqg/csbp.hpp"

namespace lqg {

namespace {

// Force the stored fields to satisfy B - T == x_after - x_before under
// floating-point subtraction (criterion-exact conservation); shifts values
// by at most a few ulps.
void reconcile_conservation(double x_before, double sum_inf, double x_after_raw, double* top,
                            double* bottom, double* x_after) {
  const double t = x_before - sum_inf;
  double dx = x_after_raw - x_before;
  double b = t + dx;
  double xa = x_before + dx;
  for (int it = 0; it < 32; ++it) {
    const double d1 = xa - x_before;
    b = t + d1;
    const double d2 = b - t;
    if (d1 == d2) break;
    xa = x_before + d2;
  }
  if (b < 0.0) b = 0.0;  // guard against ulp-negative bottoms at absorption
  *top = t;
  *bottom = b;
  *x_after = x_before + (b - t);
}

}  // namespace

NecklaceLedger build_necklace_ledger(double delta, int n, double x0, double dt,
                                     double jump_floor, Rng& rng) {
  if (!(delta > 0) || !(x0 > 0) || !(dt > 0) || n < 1) {
    throw std::invalid_argument("build_necklace_ledger: invalid parameters");
  }
  StableSpec half{1.5, JumpSide::upward, 0.5};
  StableStepper stepper(half, jump_floor);
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(delta / dt)));

  NecklaceLedger ledger;
  ledger.delta = delta;
  ledger.dt = dt;
  double x = x0;
  for (int j = 0; j < n; ++j) {
    NecklaceRecord rec;
    rec.j = j;
    rec.x_before = x;
    CadlagPath& l = rec.left;
    CadlagPath& r = rec.right;
    l.t0 = r.t0 = 0.0;
    l.dt = r.dt = dt;
    l.alpha = r.alpha = 1.5;
    double lv = x / 2.0, rv = x / 2.0;
    l.values.push_back(lv);
    r.values.push_back(rv);
    double inf_l = lv, inf_r = rv;
    bool absorbed = false;
    for (std::size_t i = 0; i < steps; ++i) {
      const double t_next = dt * static_cast<double>(i + 1);
      double jl = 0.0, jr = 0.0;
      lv += stepper.step(dt, rng, &jl);
      rv += stepper.step(dt, rng, &jr);
      if (jl != 0.0) {
        lv += jl;
        l.jumps.push_back(Jump{t_next, jl});
      }
      if (jr != 0.0) {
        rv += jr;
        r.jumps.push_back(Jump{t_next, jr});
      }
      l.values.push_back(lv);
      r.values.push_back(rv);
      inf_l = std::min(inf_l, lv);
      inf_r = std::min(inf_r, rv);
      if (lv + rv <= 0.0) {
        absorbed = true;
        l.terminal = t_next;
        r.terminal = t_next;
        break;
      }
    }
    const double x_after_raw = absorbed ? 0.0 : lv + rv;
    reconcile_conservation(rec.x_before, inf_l + inf_r, x_after_raw, &rec.top, &rec.bottom,
                           &rec.x_after);
    ledger.records.push_back(std::move(rec));
    if (absorbed) {
      ledger.terminated = true;
      break;
    }
    x = ledger.records.back().x_after;
  }
  return ledger;
}

double calibrate_top_constant(const NecklaceLedger& ledger) {
  if (ledger.records.empty()) throw std::invalid_argument("empty ledger");
  double acc = 0.0;
  std::size_t cnt = 0;
  for (const auto& rec : ledger.records) {
    acc += rec.top;
    ++cnt;
  }
  return acc / static_cast<double>(cnt) / std::pow(ledger.delta, 2.0 / 3.0);
}

std::vector<double> distance_time_change(const CadlagPath& boundary) {
  return lamperti_clock(boundary);
}

std::vector<double> MarkedBoundary::segment_lengths() const {
  std::vector<double> segs;
  const std::size_t k = marks.size();
  if (k == 0) return segs;
  segs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = (i + 1) % k;
    double gap = marks[j] - marks[i];
    if (j == 0) gap += circumference;
    segs.push_back(std::max(0.0, gap));
  }
  return segs;
}

MarkedWalk marked_point_walk(const NecklaceLedger& ledger, int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("need k >= 1 marks");
  if (ledger.records.empty()) throw std::invalid_argument("empty ledger");
  const double x0 = ledger.records.front().x_before;
  if (!(x0 > 0)) throw std::invalid_argument("k marks on zero circumference");

  MarkedWalk walk;
  walk.initial.circumference = x0;
  walk.initial.marks.resize(static_cast<std::size_t>(k));
  for (auto& p : walk.initial.marks) p = rng.uniform() * x0;
  std::sort(walk.initial.marks.begin(), walk.initial.marks.end());

  MarkedBoundary state = walk.initial;
  for (const auto& rec : ledger.records) {
    const double c = state.circumference;
    // fixed two draws per necklace keeps the stream layout stable
    const double glue = rng.uniform() * c;
    const double bottom_frac = rng.uniform();
    WalkStep step;
    step.hits.assign(state.marks.size(), 0);
    if (c <= 0.0) {
      step.state = state;
      walk.steps.push_back(std::move(step));
      continue;
    }
    const double min_t = std::min(rec.top, c);
    const double cprime = c - min_t + rec.bottom;
    const double bottom_pos = bottom_frac * rec.bottom;
    MarkedBoundary next;
    next.circumference = cprime;
    next.marks.resize(state.marks.size());
    for (std::size_t i = 0; i < state.marks.size(); ++i) {
      double d = state.marks[i] - glue;
      if (d < 0) d += c;
      if (d < min_t) {
        // swallowed: reappears at the necklace's bottom mark (half-open arc
        // convention fixes endpoint ties deterministically)
        step.hits[i] = 1;
        next.marks[i] = bottom_pos;
      } else {
        next.marks[i] = rec.bottom + (d - min_t);
      }
    }
    state = next;
    step.state = state;
    walk.steps.push_back(std::move(step));
  }
  return walk;
}

CadlagPath step_count_distance(const MarkedWalk& walk, const NecklaceLedger& ledger, double c) {
  if (!(c > 0)) throw std::invalid_argument("calibration constant must be positive");
  CadlagPath p;
  p.t0 = 0.0;
  p.dt = ledger.delta;
  p.alpha = 1.5;
  const double scale = std::pow(ledger.delta, 1.0 / 3.0) / c;
  double count = 0.0;
  p.values.push_back(0.0);
  for (const auto& step : walk.steps) {
    if (!step.hits.empty() && step.hits[0]) count += 1.0;
    p.values.push_back(scale * count);
  }
  return p;
}

CadlagPath ledger_boundary_path(const NecklaceLedger& ledger) {
  CadlagPath p;
  p.t0 = 0.0;
  p.dt = ledger.dt;
  p.alpha = 1.5;
  for (std::size_t j = 0; j < ledger.records.size(); ++j) {
    const auto& rec = ledger.records[j];
    const std::size_t start = (j == 0) ? 0 : 1;  // shared grid point between necklaces
    for (std::size_t i = start; i < rec.left.values.size(); ++i) {
      p.values.push_back(rec.left.values[i] + rec.right.values[i]);
    }
  }
  if (ledger.terminated && !p.values.empty()) {
    p.values.back() = 0.0;
    p.terminal = p.dt * static_cast<double>(p.values.size() - 1);
  }
  return p;
}

std::vector<CadlagPath> segment_length_processes(const MarkedWalk& walk,
                                                 const NecklaceLedger& ledger, double dt_dist) {
  if (walk.initial.marks.size() < 2) throw std::invalid_argument("need k >= 2 marks");
  if (!(dt_dist > 0)) throw std::invalid_argument("dt_dist must be positive");
  const CadlagPath boundary = ledger_boundary_path(ledger);
  const std::vector<double> tau = distance_time_change(boundary);
  const auto steps_per_necklace =
      static_cast<std::size_t>(std::llround(std::ceil(ledger.delta / ledger.dt)));
  // distance time at the end of necklace j
  std::vector<double> tau_end(walk.steps.size());
  for (std::size_t j = 0; j < walk.steps.size(); ++j) {
    const std::size_t idx = std::min(tau.size() - 1, (j + 1) * steps_per_necklace);
    tau_end[j] = tau[idx];
  }
  const double horizon = tau_end.empty() ? 0.0 : tau_end.back();
  const auto m = static_cast<std::size_t>(std::floor(horizon / dt_dist));
  const std::size_t k = walk.initial.marks.size();

  std::vector<CadlagPath> out(k);
  for (auto& p : out) {
    p.t0 = 0.0;
    p.dt = dt_dist;
    p.alpha = 1.5;
    p.values.reserve(m + 1);
  }
  std::size_t j = 0;  // last necklace with tau_end <= t
  std::vector<double> segs = walk.initial.segment_lengths();
  for (std::size_t idx = 0; idx <= m; ++idx) {
    const double t = dt_dist * static_cast<double>(idx);
    while (j < walk.steps.size() && tau_end[j] <= t) {
      segs = walk.steps[j].state.segment_lengths();
      ++j;
    }
    for (std::size_t i = 0; i < k; ++i) out[i].values.push_back(segs[i]);
  }
  return out;
}

NecklaceLedger reverse_delta_exploration(const ExcursionSample& excursion, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  if (!(excursion.lifetime >= delta)) {
    throw std::invalid_argument("excursion shorter than delta");
  }
  const CadlagPath rev = time_reverse(excursion.path);
  const double dt = rev.dt;
  const auto total = rev.values.size();
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(delta / dt)));
  const auto blocks = static_cast<std::size_t>(std::ceil(excursion.lifetime / delta - 1e-12));

  NecklaceLedger ledger;
  ledger.delta = delta;
  ledger.dt = dt;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    NecklaceRecord rec;
    rec.j = static_cast<int>(b);
    const std::size_t end = std::min(total - 1, pos + steps);
    rec.x_before = rev.values[pos];
    CadlagPath& l = rec.left;
    l.t0 = 0.0;
    l.dt = dt;
    l.alpha = rev.alpha;
    double inf = rev.values[pos];
    for (std::size_t i = pos; i <= end; ++i) {
      l.values.push_back(rev.values[i]);
      inf = std::min(inf, rev.values[i]);
    }
    // degenerate right component: the reverse ledger is single-path
    rec.right.t0 = 0.0;
    rec.right.dt = dt;
    rec.right.alpha = rev.alpha;
    rec.right.values.assign(l.values.size(), 0.0);
    reconcile_conservation(rec.x_before, inf, rev.values[end], &rec.top, &rec.bottom,
                           &rec.x_after);
    ledger.records.push_back(std::move(rec));
    pos = end;
    if (pos >= total - 1) break;
  }
  return ledger;
}

}  // namespace lqg
