#include "lqg/gff.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>

namespace lqg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// FFTW plan creation is not thread-safe; execution of distinct plans is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct PlanGuard {
  fftw_plan plan = nullptr;
  ~PlanGuard() {
    if (plan) {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

// torus synthesis: h = sum_k g_k sqrt(2 pi / lam_k) e_k with e_k the
// orthonormal Fourier modes; W_k = g_k sqrt(2 pi / lam_k) / n fed to c2r
void sample_torus(FieldGrid& f, Rng& rng) {
  const int n = f.size();
  const int nc = n / 2 + 1;
  std::vector<fftw_complex> spec(static_cast<std::size_t>(n) * nc);
  std::memset(spec.data(), 0, sizeof(fftw_complex) * spec.size());
  auto lam = [&](int i, int j) {
    return 4.0 - 2.0 * std::cos(kTwoPi * i / n) - 2.0 * std::cos(kTwoPi * j / n);
  };
  const double inv_n = 1.0 / n;
  for (int j = 0; j < nc; ++j) {
    const bool self_col = (j == 0 || j == n / 2);
    for (int i = 0; i < n; ++i) {
      if (i == 0 && j == 0) continue;
      const double s = std::sqrt(kTwoPi / lam(i, j)) * inv_n;
      auto& w = spec[static_cast<std::size_t>(i) * nc + j];
      if (self_col) {
        if (i == 0 || i == n / 2) {
          w[0] = s * rng.normal();  // self-conjugate mode, real
          w[1] = 0.0;
        } else if (i < n - i) {
          const double re = s * rng.normal() / std::sqrt(2.0);
          const double im = s * rng.normal() / std::sqrt(2.0);
          w[0] = re;
          w[1] = im;
          auto& wc = spec[static_cast<std::size_t>(n - i) * nc + j];
          wc[0] = re;
          wc[1] = -im;
        }
      } else {
        w[0] = s * rng.normal() / std::sqrt(2.0);
        w[1] = s * rng.normal() / std::sqrt(2.0);
      }
    }
  }
  PlanGuard pg;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    pg.plan = fftw_plan_dft_c2r_2d(n, n, spec.data(), f.values.data(), FFTW_ESTIMATE);
  }
  fftw_execute(pg.plan);
}

// box-dirichlet synthesis on the interior (n-2)^2 via DST-I; boundary 0.
// FFTW RODFT00 applies out = 4 sum A sin sin in 2-d, and the orthonormal
// sine modes carry 2/(m+1), so A = g sqrt(2 pi / lam) / (2 (m+1)).
void sample_dirichlet(FieldGrid& f, Rng& rng) {
  const int n = f.size();
  const int m = n - 2;
  std::vector<double> a(static_cast<std::size_t>(m) * m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double lam = 4.0 - 2.0 * std::cos(M_PI * (p + 1) / (m + 1)) -
                         2.0 * std::cos(M_PI * (q + 1) / (m + 1));
      a[static_cast<std::size_t>(p) * m + q] =
          rng.normal() * std::sqrt(kTwoPi / lam) / (2.0 * (m + 1));
    }
  }
  std::vector<double> out(static_cast<std::size_t>(m) * m);
  PlanGuard pg;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    pg.plan = fftw_plan_r2r_2d(m, m, a.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00,
                               FFTW_ESTIMATE);
  }
  fftw_execute(pg.plan);
  std::fill(f.values.begin(), f.values.end(), 0.0);
  for (int iy = 0; iy < m; ++iy) {
    for (int ix = 0; ix < m; ++ix) {
      f.at(ix + 1, iy + 1) = out[static_cast<std::size_t>(iy) * m + ix];
    }
  }
}

// cylinder: periodic in y (the circles), Dirichlet caps in x.  Only the
// circle-mean-zero part is wanted, so the y-constant modes are dropped and
// the circle means are removed exactly afterwards.
void sample_cylinder(FieldGrid& f, Rng& rng) {
  const int n = f.size();
  const int m = n - 2;  // interior columns
  const int nc = n / 2 + 1;
  // coefficients per x-sine mode p and y-Fourier mode k, stored as complex
  std::vector<fftw_complex> spec(static_cast<std::size_t>(m) * nc);
  std::memset(spec.data(), 0, sizeof(fftw_complex) * spec.size());
  for (int p = 0; p < m; ++p) {
    const double lam_x = 2.0 - 2.0 * std::cos(M_PI * (p + 1) / (m + 1));
    for (int k = 1; k < nc; ++k) {  // k = 0 dropped (circle-constant part)
      const double lam = lam_x + 2.0 - 2.0 * std::cos(kTwoPi * k / n);
      const double s = std::sqrt(kTwoPi / lam);
      auto& w = spec[static_cast<std::size_t>(p) * nc + k];
      if (k == n / 2) {
        w[0] = s * rng.normal();
        w[1] = 0.0;
      } else {
        w[0] = s * rng.normal() / std::sqrt(2.0);
        w[1] = s * rng.normal() / std::sqrt(2.0);
      }
    }
  }
  // y-direction c2r per column block, then x-direction DST-I row by row
  std::vector<double> stage(static_cast<std::size_t>(m) * n);
  {
    PlanGuard pg;
    {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      const int rank = 1;
      const int dims[1] = {n};
      pg.plan = fftw_plan_many_dft_c2r(rank, dims, m, spec.data(), nullptr, 1, nc, stage.data(),
                                       nullptr, 1, n, FFTW_ESTIMATE);
    }
    fftw_execute(pg.plan);
  }
  // stage(p, y) now holds sum over k; normalize Fourier ONB factor 1/sqrt(n)
  // and DST factor: x-mode ONB sqrt(2/(m+1)) with RODFT00's extra factor 2
  for (auto& v : stage) v *= 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> cols_in(static_cast<std::size_t>(n) * m), cols_out(cols_in.size());
  for (int y = 0; y < n; ++y) {
    for (int p = 0; p < m; ++p) {
      cols_in[static_cast<std::size_t>(y) * m + p] =
          stage[static_cast<std::size_t>(p) * n + y] / (2.0) * std::sqrt(2.0 / (m + 1));
    }
  }
  {
    PlanGuard pg;
    {
      std::lock_guard<std::mutex> lock(fftw_mutex());
      const int rank = 1;
      const int dims[1] = {m};
      const fftw_r2r_kind kind[1] = {FFTW_RODFT00};
      pg.plan = fftw_plan_many_r2r(rank, dims, n, cols_in.data(), nullptr, 1, m, cols_out.data(),
                                   nullptr, 1, m, kind, FFTW_ESTIMATE);
    }
    fftw_execute(pg.plan);
  }
  std::fill(f.values.begin(), f.values.end(), 0.0);
  for (int y = 0; y < n; ++y) {
    for (int p = 0; p < m; ++p) {
      f.at(p + 1, y) = cols_out[static_cast<std::size_t>(y) * m + p];
    }
  }
  // exact circle-mean removal (k = 0 modes were never sampled, this clears
  // the numerical residue)
  for (int x = 0; x < n; ++x) {
    double mean = 0.0;
    for (int y = 0; y < n; ++y) mean += f.at(x, y);
    mean /= n;
    for (int y = 0; y < n; ++y) f.at(x, y) -= mean;
  }
}

// box-free: even reflection of a doubled Dirichlet field about the free edge
// iy = 0; the restriction is (h'(x,y) + h'(x,-y))/sqrt(2), so the free edge
// carries sqrt(2) h'(x, 0).
void sample_free(FieldGrid& f, Rng& rng) {
  const int n = f.size();
  const int h = 2 * n - 1;          // doubled height, rows y' = -(n-1)..(n-1)
  const int mx = n - 2;             // interior columns
  const int my = h - 2;             // interior rows of the doubled box
  std::vector<double> a(static_cast<std::size_t>(my) * mx);
  for (int p = 0; p < my; ++p) {
    for (int q = 0; q < mx; ++q) {
      const double lam = 4.0 - 2.0 * std::cos(M_PI * (p + 1) / (my + 1)) -
                         2.0 * std::cos(M_PI * (q + 1) / (mx + 1));
      a[static_cast<std::size_t>(p) * mx + q] = rng.normal() * std::sqrt(kTwoPi / lam) /
                                                (2.0 * std::sqrt((my + 1) * (mx + 1) * 1.0));
    }
  }
  std::vector<double> out(static_cast<std::size_t>(my) * mx);
  PlanGuard pg;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    pg.plan = fftw_plan_r2r_2d(my, mx, a.data(), out.data(), FFTW_RODFT00, FFTW_RODFT00,
                               FFTW_ESTIMATE);
  }
  fftw_execute(pg.plan);
  // doubled-box interior row p is y' = p + 1 - (n - 1); even part about y'=0
  auto hprime = [&](int ix, int yprime) -> double {
    const int p = yprime + (n - 1) - 1;
    if (p < 0 || p >= my || ix < 1 || ix > mx) return 0.0;
    return out[static_cast<std::size_t>(p) * mx + (ix - 1)];
  };
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::fill(f.values.begin(), f.values.end(), 0.0);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      f.at(ix, iy) = (hprime(ix, iy) + hprime(ix, -iy)) * inv_sqrt2;
    }
  }
  // fix the additive constant: mean over the free edge is 0
  double edge_mean = 0.0;
  for (int ix = 0; ix < n; ++ix) edge_mean += f.at(ix, 0);
  edge_mean /= n;
  for (auto& v : f.values) v -= edge_mean;
}

}  // namespace

double FieldGrid::origin_distance(int ix, int iy) const {
  double dx = coord(ix), dy = coord(iy);
  if (grid.topology == Topology::torus) {
    const double L = grid.extent();
    dx = std::remainder(dx, L);
    dy = std::remainder(dy, L);
  }
  return std::hypot(dx, dy);
}

FieldGrid sample_gff(const Grid& grid, Normalization normalization, RngStream stream) {
  grid.check();
  FieldGrid f;
  f.grid = grid;
  f.values.assign(static_cast<std::size_t>(grid.size) * grid.size, 0.0);
  f.normalization = normalization;
  Rng rng(stream);
  switch (grid.topology) {
    case Topology::torus:
      sample_torus(f, rng);
      break;
    case Topology::box_dirichlet:
      sample_dirichlet(f, rng);
      break;
    case Topology::cylinder:
      sample_cylinder(f, rng);
      break;
    case Topology::box_free:
      sample_free(f, rng);
      break;
  }
  switch (normalization) {
    case Normalization::zero_boundary:
      if (grid.topology != Topology::box_dirichlet) {
        throw std::invalid_argument("zero_boundary normalization needs box-dirichlet topology");
      }
      break;
    case Normalization::unit_circle_average:
      normalize_circle_average(f, 1.0);
      break;
    case Normalization::row_mean_zero:
      if (grid.topology == Topology::torus) {
        // zero mode already dropped; nothing to do
      }
      break;
  }
  return f;
}

void normalize_circle_average(FieldGrid& field, double r0) {
  const double avg = circle_average(field, Point{0.0, 0.0}, r0);
  for (auto& v : field.values) v -= avg;
}

namespace {

double interp(const FieldGrid& f, double x, double y) {
  // physical -> node coordinates
  const int n = f.size();
  const double gx = x / f.spacing() + n / 2;
  const double gy = y / f.spacing() + n / 2;
  if (f.grid.topology == Topology::torus) {
    const double fx = gx - std::floor(gx), fy = gy - std::floor(gy);
    const int i = static_cast<int>(std::floor(gx)) % n;
    const int j = static_cast<int>(std::floor(gy)) % n;
    const int i0 = (i % n + n) % n, j0 = (j % n + n) % n;
    const int i1 = (i0 + 1) % n, j1 = (j0 + 1) % n;
    return f.at(i0, j0) * (1 - fx) * (1 - fy) + f.at(i1, j0) * fx * (1 - fy) +
           f.at(i0, j1) * (1 - fx) * fy + f.at(i1, j1) * fx * fy;
  }
  const int i0 = static_cast<int>(std::floor(gx));
  const int j0 = static_cast<int>(std::floor(gy));
  if (i0 < 0 || j0 < 0 || i0 + 1 >= n || j0 + 1 >= n) {
    throw std::invalid_argument("circle leaves the lattice");
  }
  const double fx = gx - i0, fy = gy - j0;
  return f.at(i0, j0) * (1 - fx) * (1 - fy) + f.at(i0 + 1, j0) * fx * (1 - fy) +
         f.at(i0, j0 + 1) * (1 - fx) * fy + f.at(i0 + 1, j0 + 1) * fx * fy;
}

}  // namespace

double circle_average(const FieldGrid& field, Point z, double r) {
  const double a = field.spacing();
  if (!(r >= 2.0 * a)) throw std::invalid_argument("circle_average needs r >= 2 spacing");
  if (field.grid.topology == Topology::torus && !(r < field.grid.extent() / 2)) {
    throw std::invalid_argument("circle leaves the lattice");
  }
  const int m = static_cast<int>(std::ceil(kTwoPi * r / a));
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = kTwoPi * k / m;
    acc += interp(field, z.x + r * std::cos(th), z.y + r * std::sin(th));
  }
  double avg = acc / m;
  if (field.log_singularity != 0.0) {
    // exact harmonic average of log(1/|w|) over the circle
    const double d = std::hypot(z.x, z.y);
    avg += field.log_singularity * (-std::log(std::max(d, r)));
  }
  return avg;
}

RadialProcess radial_process(const FieldGrid& field, Point center, int k0, int k1,
                             double delta_k) {
  RadialProcess rp;
  rp.center = center;
  for (int k = k0; k <= k1; ++k) {
    const double r = std::exp(-delta_k * k);
    rp.levels.push_back(r);
    rp.averages.push_back(circle_average(field, center, r));
  }
  return rp;
}

double sup_circle_average(const FieldGrid& field, double r, double region_radius) {
  const int n = field.size();
  double sup = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double y = field.coord(iy);
    if (std::fabs(y) > region_radius) continue;
    for (int ix = 0; ix < n; ++ix) {
      const double x = field.coord(ix);
      if (x * x + y * y > region_radius * region_radius) continue;
      sup = std::max(sup, std::fabs(circle_average(field, Point{x, y}, r)));
    }
  }
  return sup;
}

FieldGrid harmonic_extension(const FieldGrid& field, const std::vector<uint8_t>& region_mask) {
  const int n = field.size();
  if (region_mask.size() != field.values.size()) {
    throw std::invalid_argument("harmonic_extension: mask size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (region_mask[static_cast<std::size_t>(0) * n + i] || region_mask[static_cast<std::size_t>(n - 1) * n + i] ||
        region_mask[static_cast<std::size_t>(i) * n + 0] || region_mask[static_cast<std::size_t>(i) * n + (n - 1)]) {
      throw std::invalid_argument("harmonic_extension: region touches the lattice boundary");
    }
  }
  FieldGrid out = field;
  // SOR sweeps until the max residual of the 4-neighbor mean equation drops
  // below 1e-10
  const double omega = 1.9;
  for (int iter = 0; iter < 100000; ++iter) {
    double max_res = 0.0;
    for (int iy = 1; iy + 1 < n; ++iy) {
      for (int ix = 1; ix + 1 < n; ++ix) {
        if (!region_mask[static_cast<std::size_t>(iy) * n + ix]) continue;
        const double mean4 =
            0.25 * (out.at(ix - 1, iy) + out.at(ix + 1, iy) + out.at(ix, iy - 1) +
                    out.at(ix, iy + 1));
        const double res = mean4 - out.at(ix, iy);
        out.at(ix, iy) += omega * res;
        max_res = std::max(max_res, std::fabs(res));
      }
    }
    if (max_res < 1e-10) return out;
  }
  throw std::runtime_error("harmonic_extension: SOR did not converge");
}

RadialProcess cone_radial_process(double alpha, double gamma, double depth, double du,
                                  RngStream stream) {
  const double q = lqg_q_constant(gamma);
  if (!(alpha < q)) throw std::invalid_argument("cone_radial_process requires alpha < Q");
  if (!(depth > 0) || !(du > 0)) throw std::invalid_argument("bad depth/du");
  Rng rng(stream);
  const auto m = static_cast<std::size_t>(std::llround(std::ceil(depth / du)));
  // inward branch u in [0, depth]: B_u + alpha u
  std::vector<double> inward(m + 1, 0.0);
  for (std::size_t i = 1; i <= m; ++i) {
    inward[i] = inward[i - 1] + std::sqrt(du) * rng.normal();
  }
  // outward branch: Btilde on [0, depth] with Btilde_v + (Q-alpha) v >= 0 on
  // the grid, by rejection with geometric restart
  std::vector<double> outward(m + 1, 0.0);
  const double drift = q - alpha;
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    for (std::size_t i = 1; i <= m; ++i) {
      outward[i] = outward[i - 1] + std::sqrt(du) * rng.normal();
      if (outward[i] + drift * (du * static_cast<double>(i)) < 0.0) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    if (attempt > 2000000) {
      throw std::runtime_error("cone_radial_process: conditioned branch rejection exceeded");
    }
  }
  RadialProcess rp;
  rp.center = Point{0.0, 0.0};
  // u decreasing from +depth (small radii) ... levels must be decreasing,
  // so emit u from -depth (radius e^{depth}) up to +depth (radius e^{-depth})
  for (std::size_t i = 0; i <= 2 * m; ++i) {
    const double u = -depth + du * static_cast<double>(i);
    rp.levels.push_back(std::exp(-u));
    double val;
    if (u >= 0) {
      val = inward[static_cast<std::size_t>(std::llround(u / du))] + alpha * u;
    } else {
      val = outward[static_cast<std::size_t>(std::llround(-u / du))] + alpha * u;
    }
    rp.averages.push_back(val);
  }
  return rp;
}

// --- binary field io ----------------------------------------------------------

void write_field_binary(const FieldGrid& field, const std::string& filename) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + filename);
  const char magic[4] = {'L', 'Q', 'G', 'F'};
  out.write(magic, 4);
  const std::uint16_t version = 1;
  const std::uint32_t size = static_cast<std::uint32_t>(field.grid.size);
  const std::uint8_t topo = static_cast<std::uint8_t>(field.grid.topology);
  const std::uint8_t norm = static_cast<std::uint8_t>(field.normalization);
  out.write(reinterpret_cast<const char*>(&version), 2);
  out.write(reinterpret_cast<const char*>(&size), 4);
  out.write(reinterpret_cast<const char*>(&field.grid.spacing), 8);
  out.write(reinterpret_cast<const char*>(&topo), 1);
  out.write(reinterpret_cast<const char*>(&norm), 1);
  out.write(reinterpret_cast<const char*>(&field.log_singularity), 8);
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * 8));
}

FieldGrid read_field_binary(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + filename);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "LQGF", 4) != 0) throw std::runtime_error("bad field magic");
  std::uint16_t version = 0;
  std::uint32_t size = 0;
  std::uint8_t topo = 0, norm = 0;
  FieldGrid f;
  in.read(reinterpret_cast<char*>(&version), 2);
  in.read(reinterpret_cast<char*>(&size), 4);
  in.read(reinterpret_cast<char*>(&f.grid.spacing), 8);
  in.read(reinterpret_cast<char*>(&topo), 1);
  in.read(reinterpret_cast<char*>(&norm), 1);
  in.read(reinterpret_cast<char*>(&f.log_singularity), 8);
  if (!in || version != 1) throw std::runtime_error("bad field header");
  f.grid.size = static_cast<int>(size);
  f.grid.topology = static_cast<Topology>(topo);
  f.normalization = static_cast<Normalization>(norm);
  f.values.resize(static_cast<std::size_t>(size) * size);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * 8));
  if (!in) throw std::runtime_error("truncated field file");
  return f;
}

}  // namespace lqg
