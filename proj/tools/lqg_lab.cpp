// lqg_lab: deterministic experiment runner for the simulation library.
// Identical (flags, seed) reproduce identical outputs.
#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "lqg/acceptance.hpp"
#include "lqg/csbp.hpp"
#include "lqg/gff.hpp"
#include "lqg/measure.hpp"
#include "lqg/parallel.hpp"
#include "lqg/path_csv.hpp"
#include "lqg/qle.hpp"
#include "lqg/stable.hpp"
#include "lqg/stats.hpp"
#include "lqg/surface.hpp"
#include "lqg/svg.hpp"

using nlohmann::json;

namespace {

// gamma passed as a rational gamma^2 (e.g. "8/3") to avoid irrational drift
double parse_gamma_sq(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

lqg::Topology parse_topology(const std::string& s) {
  if (s == "torus") return lqg::Topology::torus;
  if (s == "box-dirichlet") return lqg::Topology::box_dirichlet;
  if (s == "cylinder") return lqg::Topology::cylinder;
  if (s == "box-free") return lqg::Topology::box_free;
  throw CLI::ValidationError("unknown topology " + s);
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return dir.empty() ? name : dir + "/" + name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lqg-lab: GFF, LQG measures, stable/CSBP processes and QLE boundary dynamics"};
  app.require_subcommand(1);

  std::uint64_t seed = 7;
  int threads = 0;
  std::string out_dir;
  std::string config_path;
  app.add_option("--seed", seed, "master seed (u64)");
  app.add_option("--threads", threads, "worker count (default: cores, env LQG_LAB_THREADS)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--config", config_path,
                 "JSON config file; flags given explicitly take precedence");

  // --- gff ------------------------------------------------------------------
  auto* gff = app.add_subcommand("gff", "sample a field, write binary + radial CSV");
  int gff_size = 256;
  double gff_extent = 1.0;
  std::string gff_topology = "torus";
  gff->add_option("--grid", gff_size, "lattice size (cells per side)");
  gff->add_option("--extent", gff_extent, "physical side length");
  gff->add_option("--topology", gff_topology, "torus|box-dirichlet|cylinder|box-free");

  // --- measure --------------------------------------------------------------
  auto* meas = app.add_subcommand("measure", "area measure + ball-mass scan CSV");
  int meas_size = 256;
  std::string meas_gamma_sq = "8/3";
  int meas_balls = 8;
  meas->add_option("--grid", meas_size, "lattice size");
  meas->add_option("--gamma-sq", meas_gamma_sq, "gamma^2 as a rational, e.g. 8/3");
  meas->add_option("--balls", meas_balls, "ball centers per side in the scan");

  // --- levy -----------------------------------------------------------------
  auto* levy = app.add_subcommand("levy", "sample stable paths, write CSV + jump histogram");
  double levy_alpha = 1.5, levy_t = 1.0, levy_dt = 1e-3, levy_floor = 1e-2, levy_x0 = 0.0;
  int levy_paths = 1;
  std::string levy_side = "up";
  levy->add_option("--alpha", levy_alpha, "stability index in (1,2)");
  levy->add_option("--t", levy_t, "horizon");
  levy->add_option("--dt", levy_dt, "grid step");
  levy->add_option("--jump-floor", levy_floor, "ledger jump floor");
  levy->add_option("--x0", levy_x0, "start value");
  levy->add_option("--paths", levy_paths, "number of paths");
  levy->add_option("--side", levy_side, "up|down");

  // --- csbp -----------------------------------------------------------------
  auto* csbp_cmd = app.add_subcommand("csbp", "CSBP Monte Carlo with Laplace checks");
  double cs_alpha = 1.5, cs_y0 = 1.0, cs_t = 1.0;
  std::size_t cs_paths = 100000;
  std::string cs_lambdas = "0.5,1,2";
  csbp_cmd->add_option("--alpha", cs_alpha, "branching exponent");
  csbp_cmd->add_option("--y0", cs_y0, "start mass");
  csbp_cmd->add_option("--t", cs_t, "time of the marginal");
  csbp_cmd->add_option("--paths", cs_paths, "Monte Carlo paths");
  csbp_cmd->add_option("--check-laplace", cs_lambdas, "comma-separated lambda grid");

  // --- surface --------------------------------------------------------------
  auto* surf = app.add_subcommand("surface", "Bessel excursion + disk/sphere encoding CSV");
  std::string surf_role = "disk";
  std::string surf_gamma_sq = "8/3";
  double surf_tmin = 6.0, surf_tmax = 14.0;
  surf->add_option("--role", surf_role, "disk|sphere");
  surf->add_option("--gamma-sq", surf_gamma_sq, "gamma^2 rational");
  surf->add_option("--t-min", surf_tmin, "lifetime window lower end");
  surf->add_option("--t-max", surf_tmax, "lifetime window upper end");

  // --- qle ------------------------------------------------------------------
  auto* qle_cmd = app.add_subcommand("qle", "necklace ledger + marked walk CSV");
  double qle_delta = 1e-2, qle_x0 = 1.0;
  int qle_n = 100, qle_marks = 2;
  qle_cmd->add_option("--delta", qle_delta, "quantum natural time per necklace");
  qle_cmd->add_option("--n", qle_n, "necklace count");
  qle_cmd->add_option("--x0", qle_x0, "initial boundary length");
  qle_cmd->add_option("--marks", qle_marks, "marked points");

  // --- exponent -------------------------------------------------------------
  auto* expo = app.add_subcommand("exponent", "scaling-exponent experiments");
  std::string expo_mode = "typical-ball";
  std::string expo_gamma_sq = "8/3";
  int expo_grid = 1024;
  std::size_t expo_trials = 100;
  double expo_q = 1.0;
  expo->add_option("mode", expo_mode, "typical-ball|moment|diameter");
  expo->add_option("--gamma-sq", expo_gamma_sq, "gamma^2 rational");
  expo->add_option("--grid", expo_grid, "lattice size");
  expo->add_option("--trials", expo_trials, "fields");
  expo->add_option("--q", expo_q, "moment order (moment mode)");

  // --- acceptance -------------------------------------------------------------
  auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria suite");
  std::string acc_suite = "all";
  std::string acc_report = "report.json";
  acc->add_option("--suite", acc_suite, "all or comma-separated ids (C01,...)");
  acc->add_option("--report", acc_report, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  // config file: fills values not set on the command line
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config " << config_path << "\n";
      return 2;
    }
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded()) {
      std::cerr << "bad JSON in " << config_path << "\n";
      return 2;
    }
    if (cfg.contains("seed") && app.count("--seed") == 0) seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("threads") && app.count("--threads") == 0) threads = cfg["threads"];
    if (cfg.contains("output_dir") && app.count("--out") == 0) out_dir = cfg["output_dir"];
  }
  ensure_dir(out_dir);

  try {
    if (*gff) {
      lqg::Grid grid{gff_size, gff_extent / gff_size, parse_topology(gff_topology)};
      auto norm = grid.topology == lqg::Topology::box_dirichlet
                      ? lqg::Normalization::zero_boundary
                      : lqg::Normalization::row_mean_zero;
      auto f = lqg::sample_gff(grid, norm, lqg::derive_stream(seed, {1, 0}));
      lqg::write_field_binary(f, join_path(out_dir, "field.lqgf"));
      std::cout << "wrote " << join_path(out_dir, "field.lqgf") << "\n";
      if (grid.topology == lqg::Topology::torus && gff_extent > 2.0 + 8 * grid.spacing) {
        auto rp = lqg::radial_process(f, lqg::Point{0, 0}, 0, 6, 1.0);
        std::ofstream csv(join_path(out_dir, "radial.csv"));
        csv << "radius,average\n";
        for (std::size_t i = 0; i < rp.levels.size(); ++i) {
          csv << lqg::format_double(rp.levels[i]) << ","
              << lqg::format_double(rp.averages[i]) << "\n";
        }
        std::cout << "wrote " << join_path(out_dir, "radial.csv") << "\n";
      }
      return 0;
    }

    if (*meas) {
      const double g2 = parse_gamma_sq(meas_gamma_sq);
      const double gamma = std::sqrt(g2);
      lqg::Grid grid{meas_size, 1.0 / meas_size, lqg::Topology::torus};
      auto f = lqg::sample_gff(grid, lqg::Normalization::row_mean_zero,
                               lqg::derive_stream(seed, {2, 0}));
      auto m = lqg::area_measure(f, gamma);
      std::ofstream csv(join_path(out_dir, "ball_scan.csv"));
      csv << "z_x,z_y,r,mass\n";
      for (int cy = 0; cy < meas_balls; ++cy) {
        for (int cx = 0; cx < meas_balls; ++cx) {
          lqg::Point z{(cx + 0.5) / meas_balls - 0.5, (cy + 0.5) / meas_balls - 0.5};
          for (double r : {0.01, 0.02, 0.04, 0.08}) {
            csv << lqg::format_double(z.x) << ',' << lqg::format_double(z.y) << ','
                << lqg::format_double(r) << ','
                << lqg::format_double(lqg::ball_mass(m, z, r)) << "\n";
          }
        }
      }
      json rep;
      rep["total_mass"] = m.total;
      rep["gamma_sq"] = g2;
      rep["seed"] = seed;
      std::ofstream(join_path(out_dir, "measure.json")) << rep.dump(2) << "\n";
      std::cout << "total mass " << m.total << "; wrote ball_scan.csv, measure.json\n";
      return 0;
    }

    if (*levy) {
      lqg::StableSpec spec{levy_alpha,
                           levy_side == "down" ? lqg::JumpSide::downward : lqg::JumpSide::upward,
                           1.0};
      std::vector<double> hist_bins = {0.01, 0.05, 0.1, 0.5, 1, 2, 5, 10};
      std::vector<std::size_t> hist(hist_bins.size() + 1, 0);
      for (int p = 0; p < levy_paths; ++p) {
        lqg::Rng rng(lqg::derive_stream(seed, {3, p}));
        auto path = lqg::sample_stable_path(spec, levy_x0, levy_t, levy_dt, levy_floor, rng);
        if (p == 0) lqg::write_path_csv_file(path, join_path(out_dir, "levy_path.csv"));
        for (const auto& j : path.jumps) {
          const double s = std::fabs(j.size);
          std::size_t b = 0;
          while (b < hist_bins.size() && s >= hist_bins[b]) ++b;
          ++hist[b];
        }
      }
      std::ofstream csv(join_path(out_dir, "jump_histogram.csv"));
      csv << "bin_lo,bin_hi,count\n";
      for (std::size_t b = 0; b + 1 < hist.size(); ++b) {
        csv << lqg::format_double(b == 0 ? levy_floor : hist_bins[b - 1]) << ','
            << lqg::format_double(hist_bins[b]) << ',' << hist[b + 0] << "\n";
      }
      std::cout << "wrote levy_path.csv, jump_histogram.csv\n";
      return 0;
    }

    if (*csbp_cmd) {
      std::vector<double> lambdas;
      std::stringstream ss(cs_lambdas);
      std::string tok;
      while (std::getline(ss, tok, ',')) lambdas.push_back(std::stod(tok));
      std::vector<double> marginals(cs_paths);
      const double times[1] = {cs_t};
      lqg::parallel_for(cs_paths, threads, [&](std::size_t i) {
        lqg::Rng rng(lqg::derive_stream(seed, {4, static_cast<std::int64_t>(i)}));
        lqg::CsbpSimOptions opt;
        marginals[i] =
            lqg::simulate_csbp(lqg::CsbpSpec{cs_alpha, cs_y0}, times, opt, rng).y_at[0];
      });
      auto rows = lqg::laplace_compare(marginals, lambdas, [&](double lam) {
        return std::exp(-cs_y0 * lqg::csbp_u(lam, cs_t, cs_alpha));
      });
      json rep = json::array();
      for (const auto& r : rows) {
        rep.push_back({{"lambda", r.lambda},
                       {"closed_form", r.closed_form},
                       {"empirical", r.empirical},
                       {"stderr", r.stderr_mean},
                       {"z", r.z}});
        std::cout << "lambda=" << r.lambda << " empirical=" << r.empirical
                  << " closed=" << r.closed_form << " z=" << r.z << "\n";
      }
      std::ofstream(join_path(out_dir, "csbp_laplace.json")) << rep.dump(2) << "\n";
      return 0;
    }

    if (*surf) {
      const double gamma = std::sqrt(parse_gamma_sq(surf_gamma_sq));
      const auto role = surf_role == "sphere" ? lqg::SurfaceRole::sphere : lqg::SurfaceRole::disk;
      lqg::Rng rng(lqg::derive_stream(seed, {5, 0}));
      auto exc = lqg::sample_bessel_excursion(lqg::role_bessel_dimension(role, gamma), surf_tmin,
                                              surf_tmax, 5e-4, rng);
      lqg::CadlagPath as_path;
      as_path.dt = exc.dt;
      as_path.values = exc.path;
      as_path.alpha = 2.0;
      as_path.terminal = exc.lifetime;
      {
        std::ofstream csv(join_path(out_dir, "bessel_excursion.csv"));
        csv << "# role " << surf_role << " gamma " << lqg::format_double(gamma) << "\n";
        lqg::write_path_csv(as_path, csv);
      }
      auto enc = lqg::radial_encoding_from_excursion(role, gamma, exc, 0.01, 2.0);
      std::ofstream csv(join_path(out_dir, "encoding.csv"));
      csv << "u,value\n";
      for (std::size_t i = 0; i < enc.process.size(); ++i) {
        csv << lqg::format_double(enc.u0 + enc.du * static_cast<double>(i)) << ','
            << lqg::format_double(enc.process[i]) << "\n";
      }
      std::cout << "lifetime " << exc.lifetime << "; wrote bessel_excursion.csv, encoding.csv\n";
      return 0;
    }

    if (*qle_cmd) {
      lqg::Rng rng(lqg::derive_stream(seed, {6, 0}));
      auto ledger = lqg::build_necklace_ledger(qle_delta, qle_n, qle_x0, qle_delta / 64,
                                               0.02 * std::pow(qle_delta, 2.0 / 3.0), rng);
      auto walk = lqg::marked_point_walk(ledger, qle_marks, rng);
      std::ofstream csv(join_path(out_dir, "ledger.csv"));
      csv << "j,X_before,X_after,T,B,glue_pos,hit_mask\n";
      for (std::size_t j = 0; j < ledger.records.size(); ++j) {
        const auto& rec = ledger.records[j];
        std::string mask;
        for (auto h : walk.steps[j].hits) mask += h ? '1' : '0';
        csv << rec.j << ',' << lqg::format_double(rec.x_before) << ','
            << lqg::format_double(rec.x_after) << ',' << lqg::format_double(rec.top) << ','
            << lqg::format_double(rec.bottom) << ",-," << mask << "\n";
      }
      auto boundary = lqg::ledger_boundary_path(ledger);
      lqg::write_path_csv_file(boundary, join_path(out_dir, "boundary.csv"));
      std::cout << "necklaces " << ledger.records.size()
                << (ledger.terminated ? " (terminated)" : "") << "; wrote ledger.csv, boundary.csv\n";
      return 0;
    }

    if (*expo) {
      const double g2 = parse_gamma_sq(expo_gamma_sq);
      const double gamma = std::sqrt(g2);
      if (expo_mode == "moment") {
        std::vector<double> radii = {1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
        auto fit = lqg::moment_exponent(gamma, expo_q, radii, expo_trials, expo_grid, seed,
                                        threads);
        std::cout << "xi(" << expo_q << ") target " << lqg::multifractal_xi(gamma, expo_q)
                  << " fitted slope " << fit.slope << " +- " << fit.stderr_slope << "\n";
        std::vector<lqg::SvgSeries> series(1);
        for (double r : radii) {
          series[0].x.push_back(r);
          series[0].y.push_back(std::exp(fit.intercept + fit.slope * std::log(r)));
        }
        series[0].label = "fitted moment scaling";
        lqg::SvgStyle style;
        style.log_x = style.log_y = true;
        style.title = "moment exponent";
        style.fit = {{fit.slope, fit.intercept}};
        lqg::emit_svg_file(series, style, join_path(out_dir, "moment.svg"));
        return 0;
      }
      // typical-ball / diameter: cone fields on a torus
      lqg::Grid grid{expo_grid, 0.5 / expo_grid, lqg::Topology::torus};
      std::vector<double> slopes(expo_trials);
      lqg::parallel_for(expo_trials, threads, [&](std::size_t i) {
        auto f = lqg::sample_gff(grid, lqg::Normalization::row_mean_zero,
                                 lqg::derive_stream(seed, {7, static_cast<std::int64_t>(i)}));
        f.log_singularity = gamma;
        auto m = lqg::area_measure(f, gamma);
        std::vector<double> xs, ys;
        if (expo_mode == "diameter") {
          for (double e : {0.125, 0.1767766952966369, 0.25, 0.3535533905932738, 0.5}) {
            xs.push_back(e);
            double r;
            try {
              r = lqg::approximate_metric_ball_radius(m, lqg::Point{0, 0}, std::pow(e, 4.0));
            } catch (const std::invalid_argument&) {
              r = 0.25;
            }
            ys.push_back(std::max(r, grid.spacing * 0.5));
          }
        } else {
          for (int k = -9; k <= -3; ++k) {
            xs.push_back(std::pow(2.0, k));
            ys.push_back(lqg::ball_mass(m, lqg::Point{0, 0}, xs.back()));
          }
        }
        slopes[i] = lqg::loglog_fit(xs, ys).slope;
      });
      const double med = lqg::median(slopes);
      const double target = expo_mode == "diameter" ? 6.0 : 2.0 / 3.0;
      std::cout << expo_mode << ": median slope " << med << " (target " << target << ")\n";
      return 0;
    }

    if (*acc) {
      lqg::AcceptanceOptions options;
      options.seed = seed;
      options.threads = threads;
      if (acc_suite != "all") {
        std::stringstream ss(acc_suite);
        std::string tok;
        while (std::getline(ss, tok, ',')) options.only.push_back(tok);
      }
      const auto results = lqg::run_acceptance(options, std::cout);
      std::ofstream(join_path(out_dir, acc_report)) << lqg::acceptance_report_json(results);
      std::size_t failed = 0;
      for (const auto& r : results) failed += !r.pass;
      std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
      return failed == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
