#pragma once

// Time marching: per-step Picard iteration of the cascade, guards, initial
// data generators and compatibility residuals.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "big/algebra.hpp"
#include "big/controller.hpp"
#include "big/diagnostics.hpp"
#include "big/errors.hpp"
#include "big/forcing.hpp"
#include "big/kinematics.hpp"
#include "big/linear_cascade.hpp"
#include "big/model_core.hpp"
#include "big/polar_diff.hpp"

namespace big {

struct MarchConfig {
  double dt = 1e-3;
  double T_final = 30.0;
  double picard_tol = 1e-10;
  int picard_max = 50;
  double eta = 0.1;
  double map_distortion_max = 0.5;
  double compat_tol = 1e-6;
  TimeScheme scheme = TimeScheme::implicit_euler;

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (!(dt > 0.0)) v.push_back("[march] dt must be positive");
    if (!(T_final >= 0.0)) v.push_back("[march] T_final must be non-negative");
    if (!(picard_tol > 0.0)) v.push_back("[march] picard_tol must be positive");
    if (picard_max < 2) v.push_back("[march] picard_max must be at least 2");
    if (!(eta > 0.0)) v.push_back("[march] eta must be positive");
    if (!(map_distortion_max > 0.0)) v.push_back("[march] map_distortion_max must be positive");
    if (scheme == TimeScheme::steady) v.push_back("[march] steady scheme is not a time integrator");
    return v;
  }
};

// ---------------------------------------------------------------------------
// Initial data

enum class InitialKind { displaced_rest, density_bump, rigid_spin };

inline InitialKind parse_initial_kind(const std::string& s) {
  if (s == "displaced-rest") return InitialKind::displaced_rest;
  if (s == "density-bump") return InitialKind::density_bump;
  if (s == "rigid-spin") return InitialKind::rigid_spin;
  throw std::invalid_argument("unknown scenario kind '" + s + "'");
}

inline const char* to_string(InitialKind k) {
  switch (k) {
    case InitialKind::displaced_rest: return "displaced-rest";
    case InitialKind::density_bump: return "density-bump";
    case InitialKind::rigid_spin: return "rigid-spin";
  }
  return "unknown";
}

struct InitialOptions {
  double epsilon = 1e-2;  // density-bump amplitude
  double omega0 = 1e-2;   // rigid-spin rate
};

struct InitialData {
  ScalarField rho0;
  VectorField u0;
  Vec2 ell0;
  double omega0 = 0.0;
  Vec2 h0;
};

/// C^2 radial bump supported on [1 + 0.3(R-1), 1 + 0.7(R-1)], peak 1.
inline double radial_bump(double r, double container_radius) {
  const double span = container_radius - 1.0;
  const double a = 1.0 + 0.3 * span, b = 1.0 + 0.7 * span;
  if (r <= a || r >= b) return 0.0;
  const double half = 0.5 * (b - a);
  const double q = (r - a) * (b - r) / (half * half);
  return q * q * q;
}

/// Radial density with a*gamma*rho^(gamma-2) rho' = chi^2 omega^2 r, so the
/// pressure gradient supplies the centripetal acceleration of the lifted
/// rigid rotation. The additive constant is fixed by the discrete mean.
inline ScalarField cyclostrophic_density(const Grid& g, const PhysicalParams& p, double omega) {
  const double R = g.container_radius();
  auto integrand = [&](double s) {
    const double chi = lifting_cutoff(s, R);
    return chi * chi * omega * omega * s;
  };
  std::vector<double> I(g.nr(), 0.0);  // enthalpy increment from r = 1
  for (int i = 1; i < g.nr(); ++i) {
    const double a = g.r(i - 1), b = g.r(i);
    constexpr int n = 64;  // Simpson panels per cell
    const double h = (b - a) / n;
    double s = integrand(a) + integrand(b);
    for (int q = 1; q < n; ++q) s += (q % 2 ? 4.0 : 2.0) * integrand(a + q * h);
    I[i] = I[i - 1] + s * h / 3.0;
  }
  const double k = (p.gamma - 1.0) / (p.a * p.gamma);
  auto profile = [&](double C) {
    ScalarField rho(g.size());
    for (int i = 0; i < g.nr(); ++i)
      for (int j = 0; j < g.nt(); ++j) rho[g.index(i, j)] = std::pow(k * (C + I[i]), 1.0 / (p.gamma - 1.0));
    return rho;
  };
  // mean(C) is increasing; secant iteration from the uniform-state constant.
  double c0 = std::pow(p.rho_bar, p.gamma - 1.0) / k;
  double c1 = c0 * (1.0 - 1e-3);
  double m0 = mean_density(g, profile(c0)) - p.rho_bar;
  double m1 = mean_density(g, profile(c1)) - p.rho_bar;
  for (int it = 0; it < 60 && m1 != 0.0 && m1 != m0; ++it) {
    const double c2 = c1 - m1 * (c1 - c0) / (m1 - m0);
    c0 = c1;
    m0 = m1;
    c1 = c2;
    m1 = mean_density(g, profile(c1)) - p.rho_bar;
    if (std::fabs(m1) < 1e-15 * p.rho_bar) break;
  }
  return profile(c1);
}

inline InitialData make_initial(InitialKind kind, const PhysicalParams& p, const Geometry& geo, const Grid& g,
                                const InitialOptions& opt = {}) {
  InitialData d{ScalarField(g.size(), p.rho_bar), VectorField(g.size()), {}, 0.0, geo.center()};
  switch (kind) {
    case InitialKind::displaced_rest:
      break;
    case InitialKind::density_bump:
      for (int i = 0; i < g.nr(); ++i) {
        const double b = radial_bump(g.r(i), geo.container_radius);
        for (int j = 0; j < g.nt(); ++j) d.rho0[g.index(i, j)] = p.rho_bar * (1.0 + opt.epsilon * b * g.cos_theta(j));
      }
      break;
    case InitialKind::rigid_spin:
      d.omega0 = opt.omega0;
      d.u0 = lifting(g, Vec2{}, opt.omega0);
      d.rho0 = cyclostrophic_density(g, p, opt.omega0);
      break;
  }
  return d;
}

struct CompatReport {
  double trace = 0.0;     // boundary values of u0 against rigid / no-slip data
  double wall = 0.0;      // implied du/dt on the container wall
  double body = 0.0;      // implied du/dt on the body surface against the rigid acceleration

  double max() const { return std::max({trace, wall, body}); }
};

/// Residuals of the compatibility conditions at t = 0, in the reference frame
/// (X = identity, Q = I). The implied acceleration is
/// F2(0) + (mu/rho0) Lap u0 + ((lambda+mu)/rho0) grad div u0.
inline CompatReport compat_residuals(const PolarDiff& diff, const InitialData& init, const PhysicalParams& p,
                                     const Geometry& geo, const ControllerParams& c) {
  const Grid& g = diff.grid();
  const MassInertia mi = body_mass_inertia(p);
  FluidState s;
  s.rho_tilde.resize(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) s.rho_tilde[k] = init.rho0[k] - p.rho_bar;
  s.u_tilde = init.u0;
  BodyState b;
  b.h_tilde = init.h0 - geo.h1;
  b.ell_tilde = init.ell0;
  b.omega_tilde = init.omega0;
  const FlowMap map = identity_flowmap(diff);
  const Forcing F = eval_forcing(diff, s, b, map, init.rho0, p, c, mi.m, 0.0);
  const Vec2 acc_lin = (1.0 / mi.m) * F.f3;
  const double acc_ang = F.f4 / mi.J;

  CompatReport r;
  for (int j = 0; j < g.nt(); ++j) {
    const std::size_t ki = g.index(0, j), ko = g.index(g.nr() - 1, j);
    const Vec2 y = g.position(0, j);
    r.trace = std::max({r.trace, norm(init.u0.at(ki) - (init.ell0 + cross(init.omega0, y))), norm(init.u0.at(ko))});
    const Vec2 ao = F.f2.at(ko) + lame_apply(diff, init.u0, ko, init.rho0[ko], p.mu, p.lambda);
    const Vec2 ai = F.f2.at(ki) + lame_apply(diff, init.u0, ki, init.rho0[ki], p.mu, p.lambda);
    r.wall = std::max(r.wall, norm(ao));
    r.body = std::max(r.body, norm(ai - (acc_lin + cross(acc_ang, y))));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Stepping

struct StepRecord {
  long step = 0;
  double t = 0.0;
  Vec2 h;
  Vec2 ell;
  double omega = 0.0;
  EnergyReport energy;
  BalanceTerms rhs;
  int picard_iters = 0;
  double contraction_max = 0.0;  // max ratio of successive differences from iterate 2 on
  std::vector<double> picard_history;
  double distortion = 0.0;
  double u_max = 0.0;
  double h2_norm = 0.0;
  double min_density = 0.0;
  double wall_margin = 0.0;
};

class Simulation {
 public:
  Simulation(const PhysicalParams& p, const Geometry& geo, const ControllerParams& c, const Grid& grid,
             const MarchConfig& cfg, const InitialData& init)
      : phys_(p), geo_(geo), ctrl_(c), cfg_(cfg), diff_(grid), rho0_(init.rho0), mi_(body_mass_inertia(p)),
        lame_(diff_, rho0_, p.mu, p.lambda, cfg.dt, cfg.scheme) {
    const std::size_t n = grid.size();
    s_.rho_tilde.resize(n);
    for (std::size_t k = 0; k < n; ++k) s_.rho_tilde[k] = init.rho0[k] - p.rho_bar;
    s_.u_tilde = init.u0;
    s_.t = 0.0;
    b_.h_tilde = init.h0 - geo.h1;
    b_.ell_tilde = init.ell0;
    b_.omega_tilde = init.omega0;
    b_.angle = 0.0;
    map_ = identity_flowmap(diff_);
    F_ = eval_forcing(diff_, s_, b_, map_, rho0_, phys_, ctrl_, mi_.m, 0.0);
  }

  // The Lame solver keeps a pointer to diff_.
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const PolarDiff& diff() const { return diff_; }
  const Grid& grid() const { return diff_.grid(); }
  const FluidState& fluid() const { return s_; }
  const BodyState& body() const { return b_; }
  const FlowMap& map() const { return map_; }
  const Forcing& forcing() const { return F_; }
  const ScalarField& rho0() const { return rho0_; }
  const MassInertia& mass_inertia() const { return mi_; }
  double time() const { return s_.t; }
  long step_index() const { return step_; }
  EnergyContext energy_context() const { return {phys_, ctrl_, mi_}; }

  StepRecord record() const {
    StepRecord r;
    r.step = step_;
    r.t = s_.t;
    r.h = b_.h_tilde + geo_.h1;
    r.ell = b_.Q() * b_.ell_tilde;
    r.omega = b_.omega_tilde;
    const EnergyContext ctx = energy_context();
    r.energy = energy(diff_, s_, b_, map_, s_.t, ctx);
    r.rhs = balance_terms(diff_, s_, b_, map_, s_.t, ctx);
    r.picard_iters = last_iters_;
    r.picard_history = last_history_;
    r.contraction_max = last_contraction_;
    r.distortion = map_.distortion;
    double um = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s_.u_tilde.size(); ++k) {
      um = std::max({um, std::fabs(s_.u_tilde.x[k]), std::fabs(s_.u_tilde.y[k])});
      rmin = std::min(rmin, s_.rho_tilde[k] + phys_.rho_bar);
    }
    r.u_max = um;
    r.min_density = rmin;
    r.h2_norm = discrete_norms(diff_, s_.u_tilde, b_.Q(), map_).H2;
    r.wall_margin = geometry_guard(r.h, geo_, cfg_.eta).margin;
    return r;
  }

  /// One Picard-converged step. Throws GuardViolation or NumericalFailure;
  /// the state is left untouched on failure.
  void step() {
    const double dt = cfg_.dt;
    const double t1 = static_cast<double>(step_ + 1) * dt;
    const Mat2 Q0 = b_.Q();

    FluidState c = s_;
    c.t = t1;
    Vec2 ell = b_.ell_tilde;
    double omega = b_.omega_tilde;
    std::vector<double> history;
    bool converged = false;

    for (int it = 0;; ++it) {
      BodyState bk;
      bk.ell_tilde = ell;
      bk.omega_tilde = omega;
      bk.angle = b_.angle + 0.5 * dt * (b_.omega_tilde + omega);
      const Mat2 Q1 = bk.Q();
      bk.h_tilde = b_.h_tilde + (0.5 * dt) * (Q0 * b_.ell_tilde + Q1 * ell);
      const Vec2 h = bk.h_tilde + geo_.h1;
      enforce_geometry(h, geo_, cfg_.eta, t1);
      const RigidPlacement place{h - geo_.center(), Q1};
      FlowMap mk = advance_flowmap(diff_, map_, Q0, s_.u_tilde, Q1, c.u_tilde, dt, &place);
      if (!(mk.distortion <= cfg_.map_distortion_max))
        throw GuardViolation(GuardKind::distortion, mk.distortion, cfg_.map_distortion_max,
                             "|grad X - I| = " + std::to_string(mk.distortion) + " at t = " + std::to_string(t1));
      Forcing Fk = eval_forcing(diff_, c, bk, mk, rho0_, phys_, ctrl_, mi_.m, t1);

      if (converged) {
        s_ = std::move(c);
        b_ = bk;
        map_ = std::move(mk);
        F_ = std::move(Fk);
        break;
      }
      if (it >= cfg_.picard_max)
        throw NumericalFailure(FailureKind::picard_nonconvergence,
                               "no convergence in " + std::to_string(cfg_.picard_max) + " iterations at t = " +
                                   std::to_string(t1),
                               history);

      const BodyVelocity bv = solve_body(b_.ell_tilde, b_.omega_tilde, F_.f3, F_.f4, Fk.f3, Fk.f4, dt, mi_.m, mi_.J);
      VectorField src = Fk.f2;
      if (cfg_.scheme == TimeScheme::crank_nicolson)
        for (std::size_t k = 0; k < src.size(); ++k) src.set(k, 0.5 * (F_.f2.at(k) + Fk.f2.at(k)));
      VectorField u_new = lame_.step(s_.u_tilde, src, bv.ell, bv.omega);
      ScalarField rho_new =
          density_step(diff_, s_.rho_tilde, s_.u_tilde, F_.f1, u_new, Fk.f1, rho0_, phys_.rho_bar, dt);

      double num = std::max(norm(bv.ell - ell), std::fabs(bv.omega - omega));
      double den = std::max(norm(bv.ell), std::fabs(bv.omega));
      for (std::size_t k = 0; k < rho_new.size(); ++k) {
        num = std::max({num, std::fabs(rho_new[k] - c.rho_tilde[k]), std::fabs(u_new.x[k] - c.u_tilde.x[k]),
                        std::fabs(u_new.y[k] - c.u_tilde.y[k])});
        den = std::max({den, std::fabs(rho_new[k]), std::fabs(u_new.x[k]), std::fabs(u_new.y[k])});
      }
      const double d = num == 0.0 ? 0.0 : (den > 0.0 ? num / den : std::numeric_limits<double>::infinity());
      history.push_back(d);
      c.rho_tilde = std::move(rho_new);
      c.u_tilde = std::move(u_new);
      ell = bv.ell;
      omega = bv.omega;
      converged = d <= cfg_.picard_tol;
    }

    ++step_;
    last_iters_ = static_cast<int>(history.size());
    last_contraction_ = 0.0;
    for (std::size_t k = 1; k < history.size(); ++k)
      if (history[k - 1] > 0.0) last_contraction_ = std::max(last_contraction_, history[k] / history[k - 1]);
    last_history_ = std::move(history);
  }

 private:
  PhysicalParams phys_;
  Geometry geo_;
  ControllerParams ctrl_;
  MarchConfig cfg_;
  PolarDiff diff_;
  ScalarField rho0_;
  MassInertia mi_;
  LameSolver lame_;
  FluidState s_;
  BodyState b_;
  FlowMap map_;
  Forcing F_;
  long step_ = 0;
  int last_iters_ = 0;
  double last_contraction_ = 0.0;
  std::vector<double> last_history_;
};

struct AbortReport {
  enum class Category { guard, numerical } category;
  std::string kind;
  std::string message;
  double t = 0.0;
  double value = 0.0;
  double limit = 0.0;
  std::vector<double> history;
};

struct RunOutcome {
  std::vector<StepRecord> trajectory;
  std::optional<AbortReport> abort;
};

using StepObserver = std::function<void(const Simulation&, const StepRecord&)>;

/// Steps to T_final, recording after every accepted step. Guard and solver
/// failures end the run with an abort report; earlier records are kept.
inline RunOutcome run(const PhysicalParams& p, const Geometry& geo, const ControllerParams& c, const Grid& grid,
                      const MarchConfig& cfg, const InitialData& init, const StepObserver& observe = {}) {
  std::vector<std::string> bad = p.violations();
  for (auto& v : geo.violations()) bad.push_back(v);
  for (auto& v : validate(c).violations) bad.push_back(v);
  for (auto& v : cfg.violations()) bad.push_back(v);
  if (!bad.empty()) throw ValidationError(bad);

  RunOutcome out;
  const long nsteps = std::lround(cfg.T_final / cfg.dt);
  try {
    Simulation sim(p, geo, c, grid, cfg, init);
    const CompatReport cr = compat_residuals(sim.diff(), init, p, geo, c);
    if (!(cr.max() <= cfg.compat_tol))
      throw ValidationError({"[compatibility] initial data residual " + std::to_string(cr.max()) + " exceeds " +
                             std::to_string(cfg.compat_tol)});
    enforce_geometry(init.h0, geo, cfg.eta, 0.0);
    out.trajectory.reserve(static_cast<std::size_t>(nsteps) + 1);
    out.trajectory.push_back(sim.record());
    if (observe) observe(sim, out.trajectory.back());
    for (long n = 0; n < nsteps; ++n) {
      sim.step();
      out.trajectory.push_back(sim.record());
      if (observe) observe(sim, out.trajectory.back());
    }
  } catch (const GuardViolation& e) {
    out.abort = AbortReport{AbortReport::Category::guard, to_string(e.kind()), e.what(),
                            out.trajectory.empty() ? 0.0 : out.trajectory.back().t, e.value(), e.limit(), {}};
  } catch (const NumericalFailure& e) {
    out.abort = AbortReport{AbortReport::Category::numerical, to_string(e.kind()), e.what(),
                            out.trajectory.empty() ? 0.0 : out.trajectory.back().t, 0.0, 0.0, e.history()};
  }
  return out;
}

/// Balance samples (E, D, RHS) from a trajectory.
inline std::vector<BalanceSample> balance_samples(const std::vector<StepRecord>& tr) {
  std::vector<BalanceSample> w;
  w.reserve(tr.size());
  for (const auto& r : tr) w.push_back({r.t, r.energy.E_total(), r.energy.D_total(), r.rhs.total()});
  return w;
}

}  // namespace big
