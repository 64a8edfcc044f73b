// Command-line driver. Exit codes: 0 success, 1 validation or input failure,
// 2 guard abort, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "big/config.hpp"
#include "big/convergence.hpp"
#include "big/io.hpp"
#include "big/marcher.hpp"
#include "big/piston.hpp"

namespace fs = std::filesystem;
using namespace big;

namespace {

constexpr int kOk = 0, kValidation = 1, kGuard = 2, kNumerical = 3;

struct Options {
  std::string config;
  std::string output_dir = "output";
  long snapshot_every = -1;  // -1 keeps the config value
  bool quiet = false;
};

void print_violations(const ValidationError& e) {
  std::cerr << "validation failed:\n";
  for (const auto& v : e.violations()) std::cerr << "  - " << v << '\n';
}

fs::path prepare_output(const Options& o) {
  const fs::path dir(o.output_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_validate(const Options& o) {
  const RunConfig c = parse_config(o.config);
  const ControllerCheck cc = validate(c.controller);
  if (!o.quiet) {
    std::cout << "config ok: " << o.config << '\n';
    if (cc.slope_binding) std::cout << "note: the ramp slope bound is the binding controller constraint\n";
  }
  return kOk;
}

int cmd_simulate(const Options& o) {
  RunConfig c = parse_config(o.config);
  if (o.snapshot_every >= 0) c.output.snapshot_every = o.snapshot_every;
  const fs::path dir = prepare_output(o);
  fs::copy_file(o.config, dir / "run.cfg", fs::copy_options::overwrite_existing);

  const Grid g = c.make_grid();
  const InitialData init = make_initial(c.scenario.kind, c.physical, c.geometry, g, c.scenario.options);
  TrajectoryWriter csv(dir / c.output.trajectory);
  const long every = c.output.snapshot_every;
  const long report = std::max(1L, std::lround(1.0 / c.march.dt));

  const RunOutcome out = run(c.physical, c.geometry, c.controller, g, c.march, init,
                             [&](const Simulation& sim, const StepRecord& r) {
                               csv.write(to_row(r));
                               if (every > 0 && r.step % every == 0) write_state_snapshot(dir, sim);
                               if (!o.quiet && r.step % report == 0)
                                 std::printf("t=%8.3f |h-h1|=%.3e |ell|=%.3e E=%.6e picard=%d distortion=%.3e\n",
                                             r.t, norm(r.h - c.geometry.h1), norm(r.ell), r.energy.E_total(),
                                             r.picard_iters, r.distortion);
                             });
  csv.flush();
  if (out.abort) {
    const AbortReport& a = *out.abort;
    std::cerr << (a.category == AbortReport::Category::guard ? "guard abort" : "numerical failure") << " at t="
              << a.t << " [" << a.kind << "]: " << a.message;
    if (a.category == AbortReport::Category::guard) std::cerr << " (value " << a.value << ", limit " << a.limit << ")";
    std::cerr << '\n';
    return a.category == AbortReport::Category::guard ? kGuard : kNumerical;
  }
  if (!o.quiet) std::printf("completed %zu records in %s\n", out.trajectory.size(), dir.string().c_str());
  return kOk;
}

int cmd_piston(const Options& o) {
  const RunConfig c = parse_config(o.config);
  const fs::path dir = prepare_output(o);
  TrajectoryWriter csv(dir / "piston_trajectory.csv");
  double worst_rise = 0.0, prev_E = 0.0, mass0 = 0.0, mass_drift = 0.0;
  bool first = true;
  double prev_t = 0.0;
  const PistonOutcome out = run_piston(c.physical, c.controller, c.piston, [&](const PistonRecord& r) {
    csv.write(to_row(r));
    const double mass = r.mass_left + r.mass_right;
    if (first) {
      mass0 = mass;
      first = false;
    } else if (prev_t >= c.controller.T_I) {
      worst_rise = std::max(worst_rise, r.energy.total() - prev_E);
    }
    mass_drift = std::max(mass_drift, std::fabs(mass - mass0) / mass0);
    prev_E = r.energy.total();
    prev_t = r.t;
  });
  csv.flush();
  const PistonRecord& last = out.trajectory.back();
  if (!o.quiet) {
    std::printf("piston: |h(T)-h1| / |h(0)-h1| = %.3e\n",
                std::fabs(last.h - c.piston.h1) / std::fabs(c.piston.h0 - c.piston.h1));
    std::printf("piston: max energy rise per step after T_I = %.3e\n", worst_rise);
    std::printf("piston: relative column mass drift = %.3e\n", mass_drift);
  }
  return kOk;
}

void print_study(const OrderStudy& s) {
  std::printf("%-18s errors", s.name.c_str());
  for (double e : s.errors) std::printf(" %.3e", e);
  std::printf("  orders");
  for (double v : s.orders) std::printf(" %.3f", v);
  std::printf("\n");
}

int cmd_convergence(const Options& o) {
  const RunConfig c = parse_config(o.config);
  const ConvergenceConfig& k = c.convergence;
  const ConvergenceReport r = run_convergence(c.physical, c.geometry.container_radius, k.base_n_r, k.base_n_theta,
                                              k.levels, k.dt_base, k.T_final);
  if (!o.quiet) {
    print_study(r.lame);
    print_study(r.density);
    for (const auto& n : r.norms) print_study(n);
    print_study(r.temporal_ie);
    print_study(r.temporal_cn);
    std::printf("body trapezoid defect %.3e\n", r.body_defect);
  }
  const bool ok = r.spatial_min_order() >= 1.9 && r.temporal_ie.min_order() >= 0.9 && r.body_defect <= 1e-12;
  if (!ok) {
    std::cerr << "order below threshold (spatial >= 1.9, temporal >= 0.9, body defect <= 1e-12)\n";
    return kNumerical;
  }
  return kOk;
}

/// Rebuilds each snapshot state and recomputes E, D and the right side of the
/// energy identity, then the balance residual over snapshot intervals.
int cmd_energy_report(const std::string& csv_path, const Options& o) {
  const fs::path dir = fs::path(csv_path).parent_path().empty() ? fs::path(".") : fs::path(csv_path).parent_path();
  const RunConfig c = parse_config((dir / "run.cfg").string());
  const auto rows = read_trajectory(csv_path);
  const Grid g = c.make_grid();
  const PolarDiff diff(g);
  const EnergyContext ctx{c.physical, c.controller, body_mass_inertia(c.physical)};

  std::vector<BalanceSample> samples;
  double worst_mismatch = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const long step = std::lround(rows[n].t / c.march.dt);
    if (!fs::exists(snapshot_path(dir, step, "rho_tilde"))) continue;
    auto field = [&](const char* name) { return read_snapshot(snapshot_path(dir, step, name)); };
    const Snapshot rho = field("rho_tilde"), ux = field("u_tilde_x"), uy = field("u_tilde_y"), dx = field("disp_x"),
                   dy = field("disp_y"), body = field("body");
    if (rho.nr != g.nr() || rho.nt != g.nt()) throw std::runtime_error("snapshot grid does not match run.cfg");
    FluidState s;
    s.rho_tilde = rho.data;
    s.u_tilde.x = ux.data;
    s.u_tilde.y = uy.data;
    s.t = rho.t;
    VectorField disp(g.size());
    disp.x = dx.data;
    disp.y = dy.data;
    const FlowMap map = make_flowmap(diff, disp);
    BodyState b;
    b.h_tilde = {body.data[0], body.data[1]};
    b.ell_tilde = {body.data[2], body.data[3]};
    b.omega_tilde = body.data[4];
    b.angle = body.data[5];
    const EnergyReport e = energy(diff, s, b, map, rho.t, ctx);
    const BalanceTerms bt = balance_terms(diff, s, b, map, rho.t, ctx);
    worst_mismatch = std::max(worst_mismatch, std::fabs(e.E_total() - rows[n].E_total));
    samples.push_back({rho.t, e.E_total(), e.D_total(), bt.total()});
  }
  const auto raw = balance_residual_raw(samples);
  const auto rel = balance_residual(samples);
  if (!o.quiet) {
    std::printf("%12s %14s %14s %14s %14s\n", "t", "E", "D", "rhs", "residual");
    for (std::size_t n = 0; n < raw.size(); ++n)
      std::printf("%12.5f %14.6e %14.6e %14.6e %14.6e\n", samples[n].t, samples[n].E, samples[n].D, samples[n].rhs,
                  raw[n]);
    std::printf("snapshots: %zu, max normalized residual %.4e, max |E - E_csv| %.3e\n", samples.size(),
                *std::max_element(rel.begin(), rel.end()), worst_mismatch);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigid disk in a compressible viscous fluid under PD feedback"};
  app.require_subcommand(1);
  Options o;
  std::string csv_path;

  app.add_option("--output-dir", o.output_dir, "Directory for trajectory, snapshots and the config copy");
  app.add_option("--snapshot-every", o.snapshot_every, "Write field snapshots every n steps (0 disables)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", o.quiet, "Suppress progress output");

  auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a config");
  validate_cmd->add_option("config", o.config)->required()->check(CLI::ExistingFile);
  auto* simulate_cmd = app.add_subcommand("simulate", "Run the 2D simulation");
  simulate_cmd->add_option("config", o.config)->required()->check(CLI::ExistingFile);
  auto* piston_cmd = app.add_subcommand("piston", "Run the 1D piston oracle");
  piston_cmd->add_option("config", o.config)->required()->check(CLI::ExistingFile);
  auto* conv_cmd = app.add_subcommand("convergence", "Run the manufactured-solution order study");
  conv_cmd->add_option("config", o.config)->required()->check(CLI::ExistingFile);
  auto* energy_cmd = app.add_subcommand("energy-report", "Recompute balance residuals from snapshots");
  energy_cmd->add_option("trajectory", csv_path)->required()->check(CLI::ExistingFile);
  for (auto* sub : {validate_cmd, simulate_cmd, piston_cmd, conv_cmd, energy_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*validate_cmd) return cmd_validate(o);
    if (*simulate_cmd) return cmd_simulate(o);
    if (*piston_cmd) return cmd_piston(o);
    if (*conv_cmd) return cmd_convergence(o);
    if (*energy_cmd) return cmd_energy_report(csv_path, o);
  } catch (const ValidationError& e) {
    print_violations(e);
    return kValidation;
  } catch (const GuardViolation& e) {
    std::cerr << e.what() << " (value " << e.value() << ", limit " << e.limit() << ")\n";
    return kGuard;
  } catch (const NumericalFailure& e) {
    std::cerr << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
