#pragma once

// One-dimensional analog: two viscous barotropic gas columns on [0, h] and
// [h, L] separated by a point-mass piston driven by the same PD law. The
// columns are discretized in Lagrangian mass coordinates (fixed cell masses,
// moving nodes); velocities live on nodes, specific volumes in cells.
//
// Time stepping is the implicit midpoint rule with a discrete-gradient
// pressure, so the discrete energy changes by exactly minus the viscous and
// damper dissipation (plus the ramp term while k_p varies), up to the Newton
// tolerance.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "big/controller.hpp"
#include "big/errors.hpp"
#include "big/model_core.hpp"

namespace big {

struct PistonParams {
  double length = 2.0;
  double h1 = 1.0;
  double h0 = 1.1;
  double piston_mass = 1.0;
  int cells = 32;  // per column
  double dt = 1e-3;
  double T_final = 20.0;
  double spring_scale = 1.0;  // multiplies k_p; 0 switches the spring off
  double newton_tol = 1e-13;
  int newton_max = 30;

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (!(length > 0.0)) v.push_back("[piston] length must be positive");
    if (!(h1 > 0.0 && h1 < length)) v.push_back("[piston] h1 must lie inside (0, length)");
    if (!(h0 > 0.0 && h0 < length)) v.push_back("[piston] h0 must lie inside (0, length)");
    if (!(piston_mass > 0.0)) v.push_back("[piston] piston_mass must be positive");
    if (cells < 2) v.push_back("[piston] cells must be at least 2");
    if (!(dt > 0.0)) v.push_back("[piston] dt must be positive");
    if (!(T_final >= 0.0)) v.push_back("[piston] T_final must be non-negative");
    if (!(spring_scale >= 0.0)) v.push_back("[piston] spring_scale must be non-negative");
    return v;
  }
};

struct PistonEnergy {
  double kinetic_gas = 0.0;
  double internal = 0.0;
  double kinetic_piston = 0.0;
  double spring = 0.0;

  double total() const { return kinetic_gas + internal + kinetic_piston + spring; }
};

struct PistonRecord {
  double t = 0.0;
  double h = 0.0;
  double ell = 0.0;
  PistonEnergy energy;
  double D_visc = 0.0;
  double D_damp = 0.0;
  double mass_left = 0.0;
  double mass_right = 0.0;
  int newton_iters = 0;
};

class PistonSystem {
 public:
  PistonSystem(const PhysicalParams& phys, const ControllerParams& ctrl, const PistonParams& pp)
      : phys_(phys), ctrl_(ctrl), pp_(pp) {
    auto v = pp.violations();
    for (auto& s : phys.violations()) v.push_back(s);
    if (pp.spring_scale > 0.0) {
      for (auto& s : validate(ctrl).violations) v.push_back(s);
    } else {
      // Spring off: only the damper remains, so the ramp bound does not apply.
      if (!(ctrl.T_I > 0.0)) v.push_back("[piston] T_I must be positive");
      if (!(ctrl.k_d >= 0.0)) v.push_back("[piston] k_d must be non-negative");
    }
    if (!v.empty()) throw ValidationError(v);

    const int n = pp.cells;
    mu_eff_ = 2.0 * phys.mu + phys.lambda;
    // Column masses chosen so that both columns sit at rho_bar when h = h1,
    // which makes h1 the unique rest position.
    dm_.assign(2 * n, 0.0);
    for (int c = 0; c < n; ++c) dm_[c] = phys.rho_bar * pp.h1 / n;
    for (int c = n; c < 2 * n; ++c) dm_[c] = phys.rho_bar * (pp.length - pp.h1) / n;

    x_.assign(2 * n + 1, 0.0);
    v_.assign(2 * n + 1, 0.0);
    for (int i = 0; i <= n; ++i) x_[i] = pp.h0 * i / n;
    for (int i = n + 1; i <= 2 * n; ++i) x_[i] = pp.h0 + (pp.length - pp.h0) * (i - n) / n;
    x_[2 * n] = pp.length;

    node_mass_.assign(2 * n + 1, 0.0);
    for (int i = 1; i < 2 * n; ++i) node_mass_[i] = 0.5 * (dm_[i - 1] + dm_[i]);
    node_mass_[n] = pp.piston_mass;
  }

  int piston_node() const { return pp_.cells; }
  double time() const { return t_; }
  double h() const { return x_[piston_node()]; }
  double ell() const { return v_[piston_node()]; }
  const std::vector<double>& positions() const { return x_; }
  const std::vector<double>& velocities() const { return v_; }
  const std::vector<double>& cell_masses() const { return dm_; }

  double kp_at(double t) const { return pp_.spring_scale * kp(t, ctrl_); }

  std::vector<double> densities() const {
    std::vector<double> rho(dm_.size());
    for (std::size_t c = 0; c < dm_.size(); ++c) rho[c] = dm_[c] / (x_[c + 1] - x_[c]);
    return rho;
  }

  /// Column masses recomputed from densities and cell widths.
  std::pair<double, double> column_masses() const {
    const auto rho = densities();
    double l = 0.0, r = 0.0;
    for (std::size_t c = 0; c < rho.size(); ++c)
      (static_cast<int>(c) < pp_.cells ? l : r) += rho[c] * (x_[c + 1] - x_[c]);
    return {l, r};
  }

  PistonEnergy energy() const {
    PistonEnergy e;
    const int p = piston_node();
    for (std::size_t i = 1; i + 1 < x_.size(); ++i)
      if (static_cast<int>(i) != p) e.kinetic_gas += 0.5 * node_mass_[i] * v_[i] * v_[i];
    for (std::size_t c = 0; c < dm_.size(); ++c) e.internal += dm_[c] * psi((x_[c + 1] - x_[c]) / dm_[c]);
    e.kinetic_piston = 0.5 * pp_.piston_mass * ell() * ell();
    const double d = pp_.h1 - h();
    e.spring = 0.5 * kp_at(t_) * d * d;
    return e;
  }

  PistonRecord record() const {
    PistonRecord r;
    r.t = t_;
    r.h = h();
    r.ell = ell();
    r.energy = energy();
    for (std::size_t c = 0; c < dm_.size(); ++c) {
      const double dv = v_[c + 1] - v_[c];
      r.D_visc += mu_eff_ * dv * dv / (x_[c + 1] - x_[c]);
    }
    r.D_damp = ctrl_.k_d * ell() * ell();
    std::tie(r.mass_left, r.mass_right) = column_masses();
    r.newton_iters = last_iters_;
    return r;
  }

  void step() {
    const double dt = pp_.dt;
    const std::size_t nn = x_.size();
    const int p = piston_node();
    const double kmid = kp_at(t_ + 0.5 * dt);
    std::vector<double> v1 = v_, x1(nn), xm(nn), res(nn), diag(nn), off(nn);

    int it = 0;
    for (;; ++it) {
      if (it >= pp_.newton_max)
        throw NumericalFailure(FailureKind::picard_nonconvergence,
                               "piston Newton iteration did not converge at t=" + std::to_string(t_));
      for (std::size_t i = 0; i < nn; ++i) {
        x1[i] = x_[i] + 0.5 * dt * (v_[i] + v1[i]);
        xm[i] = 0.5 * (x_[i] + x1[i]);
      }
      if (!(x1[p] > 0.0 && x1[p] < pp_.length))
        throw GuardViolation(GuardKind::geometry, x1[p], pp_.length, "piston left the interval");

      // Cell stresses and their derivative with respect to the right-node velocity.
      std::vector<double> S(dm_.size()), g(dm_.size());
      for (std::size_t c = 0; c < dm_.size(); ++c) {
        const double tau0 = (x_[c + 1] - x_[c]) / dm_[c];
        const double tau1 = (x1[c + 1] - x1[c]) / dm_[c];
        if (!(tau1 > 0.0))
          throw GuardViolation(GuardKind::positivity, tau1, 0.0, "piston cell inverted at t=" + std::to_string(t_));
        const double X = xm[c + 1] - xm[c];
        const double D = 0.5 * (v_[c + 1] + v1[c + 1]) - 0.5 * (v_[c] + v1[c]);
        S[c] = -pressure_dg(tau0, tau1) + mu_eff_ * D / X;
        const double dp = dpressure(0.5 * (tau0 + tau1)) * 0.5;
        g[c] = -dp * 0.5 * dt / dm_[c] + mu_eff_ * (0.5 / X - D * 0.25 * dt / (X * X));
      }

      double worst = 0.0;
      for (std::size_t i = 1; i + 1 < nn; ++i) {
        const double vm = 0.5 * (v_[i] + v1[i]);
        res[i] = node_mass_[i] * (v1[i] - v_[i]) / dt - (S[i] - S[i - 1]);
        diag[i] = node_mass_[i] / dt + g[i] + g[i - 1];
        off[i] = -g[i];
        if (static_cast<int>(i) == p) {
          res[i] -= kmid * (pp_.h1 - xm[i]) - ctrl_.k_d * vm;
          diag[i] += kmid * 0.25 * dt + 0.5 * ctrl_.k_d;
        }
      }
      // Thomas algorithm on interior nodes 1..nn-2 (symmetric tridiagonal).
      const std::size_t lo = 1, hi = nn - 2;
      std::vector<double> cp(nn), dp(nn);
      cp[lo] = off[lo] / diag[lo];
      dp[lo] = res[lo] / diag[lo];
      for (std::size_t i = lo + 1; i <= hi; ++i) {
        const double m = diag[i] - off[i - 1] * cp[i - 1];
        cp[i] = off[i] / m;
        dp[i] = (res[i] - off[i - 1] * dp[i - 1]) / m;
      }
      std::vector<double> dv(nn, 0.0);
      dv[hi] = dp[hi];
      for (std::size_t i = hi; i-- > lo;) dv[i] = dp[i] - cp[i] * dv[i + 1];

      double vscale = 0.0;
      for (std::size_t i = lo; i <= hi; ++i) {
        v1[i] -= dv[i];
        worst = std::max(worst, std::fabs(dv[i]));
        vscale = std::max(vscale, std::fabs(v1[i]));
      }
      if (worst <= pp_.newton_tol * std::max(1.0, vscale)) break;
    }

    for (std::size_t i = 0; i < nn; ++i) x_[i] += 0.5 * dt * (v_[i] + v1[i]);
    v_ = v1;
    last_iters_ = it + 1;
    ++steps_;
    t_ = steps_ * dt;
  }

 private:
  // Internal energy per unit mass as a function of specific volume.
  double psi(double tau) const { return phys_.a * std::pow(tau, 1.0 - phys_.gamma) / (phys_.gamma - 1.0); }
  double pressure_of(double tau) const { return phys_.a * std::pow(tau, -phys_.gamma); }
  double dpressure(double tau) const { return -phys_.gamma * phys_.a * std::pow(tau, -phys_.gamma - 1.0); }

  /// Discrete gradient: p_dg (tau1 - tau0) = -(psi(tau1) - psi(tau0)), evaluated
  /// without cancellation through expm1/log1p.
  double pressure_dg(double tau0, double tau1) const {
    const double d = tau1 - tau0;
    if (d == 0.0) return pressure_of(tau0);
    const double g = phys_.gamma;
    const double dpsi = psi(tau0) * std::expm1((1.0 - g) * std::log1p(d / tau0));
    return -dpsi / d;
  }

  PhysicalParams phys_;
  ControllerParams ctrl_;
  PistonParams pp_;
  double mu_eff_ = 0.0;
  std::vector<double> dm_, x_, v_, node_mass_;
  double t_ = 0.0;
  long steps_ = 0;
  int last_iters_ = 0;
};

struct PistonOutcome {
  std::vector<PistonRecord> trajectory;
};

inline PistonOutcome run_piston(const PhysicalParams& phys, const ControllerParams& ctrl, const PistonParams& pp,
                                const std::function<void(const PistonRecord&)>& observer = {}) {
  PistonSystem sys(phys, ctrl, pp);
  PistonOutcome out;
  out.trajectory.push_back(sys.record());
  if (observer) observer(out.trajectory.back());
  const long n = std::lround(pp.T_final / pp.dt);
  for (long s = 0; s < n; ++s) {
    sys.step();
    out.trajectory.push_back(sys.record());
    if (observer) observer(out.trajectory.back());
  }
  return out;
}

}  // namespace big
