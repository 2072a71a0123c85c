// Batch front-end: reads a flat key = value config, runs one computational
// stage, and writes CSV / report artifacts for external plotting.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pnp/algebra.hpp"
#include "pnp/config.hpp"
#include "pnp/elliptic.hpp"
#include "pnp/errors.hpp"
#include "pnp/evolution.hpp"
#include "pnp/params.hpp"
#include "pnp/trichotomy.hpp"

namespace fs = std::filesystem;
using namespace pnp;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void run_solve_algebraic(const Config& cfg, const fs::path& out_dir,
                         const std::string& prefix) {
  const ModelParams p = params_from_config(cfg);
  const double lo = cfg.number_or("phi_lo", -2.0);
  const double hi = cfg.number_or("phi_hi", 2.0);
  const auto n = std::size_t(cfg.number_or("phi_samples", 81));
  if (!(lo < hi) || n < 2) throw ConfigError("need phi_lo < phi_hi and phi_samples >= 2");

  auto out = open_out(out_dir / (prefix + "_algebraic.csv"));
  out << "phi,u,v,G\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = lo + (hi - lo) * double(i) / double(n - 1);
    const AlgebraicPoint pt = solve_uv(phi, p);
    const double g = p.gamma1 * pt.u + p.gamma2 * pt.v;
    out << format_full(phi) << ',' << format_full(pt.u) << ','
        << format_full(pt.v) << ',' << format_full(g) << '\n';
  }
}

void run_classify(const Config& cfg, const fs::path& out_dir,
                  const std::string& prefix) {
  const ModelParams p = params_from_config(cfg);
  const TrichotomyReport rep = classify(p);

  auto out = open_out(out_dir / (prefix + "_classify.txt"));
  out << "regime=" << regime_name(rep.regime) << '\n'
      << "u_star=" << format_full(rep.u_star) << '\n'
      << "k3=" << format_full(rep.cubic.k3) << '\n'
      << "k2=" << format_full(rep.cubic.k2) << '\n'
      << "k1=" << format_full(rep.cubic.k1) << '\n'
      << "k0=" << format_full(rep.cubic.k0) << '\n'
      << "A=" << format_full(rep.cubic.A) << '\n'
      << "B=" << format_full(rep.cubic.B) << '\n'
      << "C=" << format_full(rep.cubic.C) << '\n'
      << "delta_dis=" << format_full(rep.cubic.delta_dis) << '\n'
      << "u1=" << format_full(rep.cubic.roots[0]) << '\n'
      << "u2=" << format_full(rep.cubic.roots[1]) << '\n'
      << "u3=" << format_full(rep.cubic.roots[2]) << '\n'
      << "sigma_u1=" << format_full(rep.sigma_at_u1) << '\n';
  if (rep.regime == Regime::Triple) {
    out << "fold_u_inner=" << format_full(rep.fold_u[0]) << '\n'
        << "fold_u_outer=" << format_full(rep.fold_u[1]) << '\n'
        << "phi_under=" << format_full(rep.fold_phi[0]) << '\n'
        << "phi_bar=" << format_full(rep.fold_phi[1]) << '\n';
  } else if (rep.regime == Regime::Inflection) {
    out << "phi_check=" << format_full(rep.phi_check) << '\n';
  }
}

void run_branches(const Config& cfg, const fs::path& out_dir,
                  const std::string& prefix) {
  const ModelParams p = params_from_config(cfg);
  const double lo = cfg.number_or("u_lo", 0.05);
  const double hi = cfg.number_or("u_hi", 5.0);
  const auto n = std::size_t(cfg.number_or("u_samples", 801));
  const BranchCurve curve = branch_sweep(p, lo, hi, n);

  auto out = open_out(out_dir / (prefix + "_branches.csv"));
  out << "u,v,phi\n";
  for (std::size_t i = 0; i < n; ++i)
    out << format_full(curve.u_samples[i]) << ',' << format_full(curve.v_samples[i])
        << ',' << format_full(curve.phi_samples[i]) << '\n';
}

void run_stationary(const Config& cfg, const fs::path& out_dir,
                    const std::string& prefix) {
  const ModelParams p = params_from_config(cfg);
  const auto n = std::size_t(cfg.number_or("grid_points", 129));
  const double length = cfg.number_or("domain_length", 1.0);
  const Grid1D grid(n, 0.0, length);
  const Field init(n, cfg.number_or("init_phi", 0.0));
  const StationarySolution sol = solve_stationary(p, grid, init);

  auto csv = open_out(out_dir / (prefix + "_stationary.csv"));
  csv << "x,phi,u,v,branch\n";
  for (std::size_t i = 0; i < n; ++i)
    csv << format_full(grid.x(i)) << ',' << format_full(sol.phi[i]) << ','
        << format_full(sol.u[i]) << ',' << format_full(sol.v[i]) << ','
        << branch_name(sol.branch_map[i]) << '\n';

  auto rep = open_out(out_dir / (prefix + "_stationary_report.txt"));
  rep << "energy=" << format_full(sol.energy) << '\n'
      << "residual_pde=" << format_full(sol.residual_pde) << '\n'
      << "f1_span=" << format_full(sol.f1_span) << '\n'
      << "f2_span=" << format_full(sol.f2_span) << '\n'
      << "iterations=" << sol.iterations << '\n';
}

void run_evolve(const Config& cfg, const fs::path& out_dir,
                const std::string& prefix) {
  const ModelParams p = params_from_config(cfg);
  const auto n = std::size_t(cfg.number_or("grid_points", 201));
  const double length = cfg.number_or("domain_length", 1.0);
  const Grid1D grid(n, 0.0, length);

  const double u_mean = cfg.number_or("u0_mean", 1.0);
  const double v_mean = cfg.number_or("v0_mean", p.gamma1 * u_mean / (-p.gamma2));
  const double amp = cfg.number_or("perturb_amp", 0.1);
  Field u0(n), v0(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = std::cos(M_PI * (grid.x(i) - grid.x0) / length);
    u0[i] = u_mean * (1.0 + amp * c);
    v0[i] = v_mean * (1.0 + amp * c);
  }

  EvolutionState probe{0.0, u0, v0, Field(n, 0.0), grid};
  const double dt = cfg.number_or("dt", 0.9 * stable_dt(probe, p));
  const double t_end = cfg.number("t_end");
  const auto every = std::size_t(cfg.number_or("sample_every", 100));

  std::vector<EvolutionState> snaps;
  const bool want_snaps = cfg.number_or("snapshots", 0) != 0;
  const EntropyTrace tr = run(p, u0, v0, grid, dt, t_end, every,
                              want_snaps ? &snaps : nullptr);

  auto out = open_out(out_dir / (prefix + "_entropy.csv"));
  out << "t,H,l1_u,l1_v\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    out << format_full(tr.times[i]) << ',' << format_full(tr.H[i]) << ','
        << format_full(tr.l1_u[i]) << ',' << format_full(tr.l1_v[i]) << '\n';

  if (want_snaps && !snaps.empty()) {
    const EvolutionState& last = snaps.back();
    auto snap = open_out(out_dir / (prefix + "_final_fields.csv"));
    snap << "x,u,v,phi\n";
    for (std::size_t i = 0; i < n; ++i)
      snap << format_full(grid.x(i)) << ',' << format_full(last.u[i]) << ','
           << format_full(last.v[i]) << ',' << format_full(last.phi[i]) << '\n';
  }

  auto rep = open_out(out_dir / (prefix + "_evolve_report.txt"));
  rep << "fitted_rate=" << format_full(tr.fitted_rate) << '\n'
      << "fit_residual_rel=" << format_full(tr.fit_residual_rel) << '\n'
      << "mass_drift_rel=" << format_full(tr.mass_drift_rel) << '\n';
}

void dispatch(const std::string& mode, const Config& cfg,
              const fs::path& out_dir, const std::string& prefix) {
  if (mode == "solve-algebraic") run_solve_algebraic(cfg, out_dir, prefix);
  else if (mode == "classify") run_classify(cfg, out_dir, prefix);
  else if (mode == "branches") run_branches(cfg, out_dir, prefix);
  else if (mode == "stationary") run_stationary(cfg, out_dir, prefix);
  else if (mode == "evolve") run_evolve(cfg, out_dir, prefix);
  else throw ConfigError("unknown mode: " + mode);
}

struct SweepSpec {
  std::string key;
  double lo = 0, hi = 0;
  std::size_t n = 0;
};

SweepSpec parse_sweep(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("--sweep expects key=lo:hi:n");
  SweepSpec spec;
  spec.key = s.substr(0, eq);
  const std::string rest = s.substr(eq + 1);
  const auto c1 = rest.find(':'), c2 = rest.rfind(':');
  if (c1 == std::string::npos || c1 == c2)
    throw ConfigError("--sweep expects key=lo:hi:n");
  try {
    spec.lo = std::stod(rest.substr(0, c1));
    spec.hi = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    spec.n = std::stoul(rest.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ConfigError("--sweep expects numeric lo:hi:n");
  }
  if (spec.n < 1) throw ConfigError("--sweep needs n >= 1");
  return spec;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"PNP-steric stationary and time-dependent solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", prefix = "pnp", sweep_arg;
  unsigned jobs = 1;
  for (const char* mode : {"solve-algebraic", "classify", "branches",
                           "stationary", "evolve"}) {
    auto* sub = app.add_subcommand(mode);
    sub->add_option("--config", config_path, "flat key = value config file")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--prefix", prefix, "output filename prefix");
    sub->add_option("--sweep", sweep_arg, "key=lo:hi:n parameter sweep");
    sub->add_option("--jobs", jobs, "parallel sweep workers");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    const Config base = Config::parse_file(config_path);
    const fs::path out(out_dir);
    fs::create_directories(out);

    if (sweep_arg.empty()) {
      dispatch(mode, base, out, prefix);
    } else {
      const SweepSpec sweep = parse_sweep(sweep_arg);
      std::vector<std::string> errors;
      std::mutex mu;
      std::size_t next = 0;
      auto worker = [&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lk(mu);
            if (next >= sweep.n) return;
            i = next++;
          }
          Config cfg = base;
          const double val = (sweep.n == 1)
              ? sweep.lo
              : sweep.lo + (sweep.hi - sweep.lo) * double(i) / double(sweep.n - 1);
          cfg.set(sweep.key, val);
          char tag[16];
          std::snprintf(tag, sizeof tag, "_s%03zu", i);
          try {
            dispatch(mode, cfg, out, prefix + tag);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lk(mu);
            errors.push_back(std::string(tag) + ": " + e.what());
          }
        }
      };
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
      if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "pnp-steric: " << e << '\n';
        return 3;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "pnp-steric: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pnp-steric: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
