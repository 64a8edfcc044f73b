#pragma once

// Manufactured-solution order studies for the discrete operators: steady
// Lame solve, density update, discrete norms (spatial), implicit-Euler Lame
// stepping (temporal) and the trapezoidal body update (exactness).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "big/diagnostics.hpp"
#include "big/kinematics.hpp"
#include "big/linear_cascade.hpp"
#include "big/model_core.hpp"
#include "big/polar_diff.hpp"

namespace big {

/// Value, gradient and Hessian of a function of (x, y), propagated exactly
/// through arithmetic and elementary functions.
struct Jet2 {
  double v = 0.0, x = 0.0, y = 0.0, xx = 0.0, xy = 0.0, yy = 0.0;

  static Jet2 constant(double c) { return {c}; }
  static Jet2 var_x(double px) { return {px, 1.0, 0.0}; }
  static Jet2 var_y(double py) { return {py, 0.0, 1.0}; }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v, a.x + b.x, a.y + b.y, a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v, a.x - b.x, a.y - b.y, a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}
inline Jet2 operator*(double s, const Jet2& a) { return {s * a.v, s * a.x, s * a.y, s * a.xx, s * a.xy, s * a.yy}; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.x * b.v + a.v * b.x,
          a.y * b.v + a.v * b.y,
          a.xx * b.v + 2.0 * a.x * b.x + a.v * b.xx,
          a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
          a.yy * b.v + 2.0 * a.y * b.y + a.v * b.yy};
}
inline Jet2 operator+(double c, const Jet2& a) { return Jet2::constant(c) + a; }
inline Jet2 operator-(double c, const Jet2& a) { return Jet2::constant(c) - a; }

/// f(a) given f, f', f'' at a.v.
inline Jet2 chain(const Jet2& a, double f, double d1, double d2) {
  return {f,
          d1 * a.x,
          d1 * a.y,
          d2 * a.x * a.x + d1 * a.xx,
          d2 * a.x * a.y + d1 * a.xy,
          d2 * a.y * a.y + d1 * a.yy};
}
inline Jet2 sin(const Jet2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet2 exp(const Jet2& a) { return chain(a, std::exp(a.v), std::exp(a.v), std::exp(a.v)); }

/// A smooth vector field vanishing on r = 1 and r = R.
struct ManufacturedField {
  double R = 3.0;

  std::array<Jet2, 2> operator()(double px, double py) const {
    const Jet2 x = Jet2::var_x(px), y = Jet2::var_y(py);
    const Jet2 r2 = x * x + y * y;
    const Jet2 q = (1.0 / (R * R * R * R)) * ((r2 - Jet2::constant(1.0)) * (Jet2::constant(R * R) - r2));
    return {q * sin(x + 0.3 * y), q * cos(0.7 * x) * exp(0.2 * y)};
  }

  VectorField sample(const Grid& g) const {
    VectorField u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2 p = g.position(k);
      const auto f = (*this)(p.x, p.y);
      u.set(k, {f[0].v, f[1].v});
    }
    // Boundary values are zero analytically; pin them so round-off in q does not leak in.
    for (int j = 0; j < g.nt(); ++j) {
      u.set(g.index(0, j), {});
      u.set(g.index(g.nr() - 1, j), {});
    }
    return u;
  }

  Vec2 lame(double px, double py, double mu, double lambda) const {
    const auto f = (*this)(px, py);
    const double lm = lambda + mu;
    return {mu * (f[0].xx + f[0].yy) + lm * (f[0].xx + f[1].xy), mu * (f[1].xx + f[1].yy) + lm * (f[0].xy + f[1].yy)};
  }

  double div(double px, double py) const {
    const auto f = (*this)(px, py);
    return f[0].x + f[1].y;
  }
};

/// A smooth field without boundary zeros, for the norm study.
struct SmoothField {
  double R = 3.0;

  std::array<Jet2, 2> operator()(double px, double py) const {
    const Jet2 x = Jet2::var_x(px), y = Jet2::var_y(py);
    return {sin(0.5 * x + 0.2 * y), cos(0.3 * x) * exp(0.1 * y)};
  }

  VectorField sample(const Grid& g) const {
    VectorField u(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2 p = g.position(k);
      const auto f = (*this)(p.x, p.y);
      u.set(k, {f[0].v, f[1].v});
    }
    return u;
  }
};

struct OrderStudy {
  std::string name;
  std::vector<double> h;       // step (dr or dt) per level
  std::vector<double> errors;  // error per level
  std::vector<double> orders;  // log2 ratios between consecutive levels

  double min_order() const {
    return orders.empty() ? 0.0 : *std::min_element(orders.begin(), orders.end());
  }
};

inline void fill_orders(OrderStudy& s) {
  s.orders.clear();
  for (std::size_t k = 0; k + 1 < s.errors.size(); ++k)
    s.orders.push_back(std::log(s.errors[k] / s.errors[k + 1]) / std::log(s.h[k] / s.h[k + 1]));
}

/// Grids with halving spacing: nr_{k+1} - 1 = 2 (nr_k - 1), nt doubles.
inline std::vector<Grid> refinement_grids(int nr, int nt, int levels, double R) {
  std::vector<Grid> out;
  for (int k = 0; k < levels; ++k) {
    out.emplace_back(nr, nt, R);
    nr = 2 * (nr - 1) + 1;
    nt *= 2;
  }
  return out;
}

/// Max-norm error of the steady Dirichlet Lame solve -L u = f.
inline OrderStudy lame_spatial_study(const std::vector<Grid>& grids, const PhysicalParams& p) {
  OrderStudy s{"lame-spatial", {}, {}, {}};
  for (const Grid& g : grids) {
    const PolarDiff diff(g);
    const ManufacturedField mf{g.container_radius()};
    const ScalarField rho0(g.size(), p.rho_bar);
    const LameSolver solver(diff, rho0, p.mu, p.lambda, 1.0, TimeScheme::steady);
    VectorField f(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2 q = g.position(k);
      f.set(k, -(1.0 / p.rho_bar) * mf.lame(q.x, q.y, p.mu, p.lambda));
    }
    const VectorField u = solver.step(VectorField(g.size()), f, {}, 0.0);
    const VectorField exact = mf.sample(g);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, norm(u.at(k) - exact.at(k)));
    s.h.push_back(g.dr());
    s.errors.push_back(err);
  }
  fill_orders(s);
  return s;
}

/// Max-norm error of the density rate -rho_bar div u from one density step.
inline OrderStudy density_spatial_study(const std::vector<Grid>& grids, const PhysicalParams& p) {
  OrderStudy s{"density-spatial", {}, {}, {}};
  const double dt = 1e-2;
  for (const Grid& g : grids) {
    const PolarDiff diff(g);
    const ManufacturedField mf{g.container_radius()};
    const VectorField u = mf.sample(g);
    const ScalarField zero(g.size(), 0.0), rho0(g.size(), p.rho_bar);
    const ScalarField rho = density_step(diff, zero, u, zero, u, zero, rho0, p.rho_bar, dt);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec2 q = g.position(k);
      err = std::max(err, std::fabs(rho[k] / dt + p.rho_bar * mf.div(q.x, q.y)));
    }
    s.h.push_back(g.dr());
    s.errors.push_back(err);
  }
  fill_orders(s);
  return s;
}

/// Reference L2/H1/H2 norms by Gauss-Legendre in r and the periodic
/// trapezoid in theta (spectrally accurate for smooth periodic integrands).
template <class Field>
inline Norms reference_norms(const Field& mf, int nt_q = 512) {
  using Gauss = boost::math::quadrature::gauss<double, 48>;
  const auto& xs = Gauss::abscissa();
  const auto& ws = Gauss::weights();
  // Only non-negative abscissae are stored; expand to the full rule.
  std::vector<double> x, w;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    x.push_back(xs[k]);
    w.push_back(ws[k]);
    if (xs[k] != 0.0) {
      x.push_back(-xs[k]);
      w.push_back(ws[k]);
    }
  }
  const int nr_q = static_cast<int>(x.size());
  double l2 = 0.0, h1 = 0.0, h2 = 0.0;
  const double a = 1.0, b = mf.R, dth = 2.0 * M_PI / nt_q;
  for (int i = 0; i < nr_q; ++i) {
    const double r = 0.5 * (b - a) * x[i] + 0.5 * (b + a);
    const double wr = 0.5 * (b - a) * w[i] * r * dth;
    for (int j = 0; j < nt_q; ++j) {
      const auto f = mf(r * std::cos(j * dth), r * std::sin(j * dth));
      for (const Jet2& c : f) {
        l2 += wr * c.v * c.v;
        h1 += wr * (c.x * c.x + c.y * c.y);
        h2 += wr * (c.xx * c.xx + 2.0 * c.xy * c.xy + c.yy * c.yy);
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + h1), std::sqrt(l2 + h1 + h2)};
}

/// Relative errors of the discrete L2, H1 and H2 norms; one study per norm.
inline std::array<OrderStudy, 3> norm_spatial_study(const std::vector<Grid>& grids) {
  std::array<OrderStudy, 3> s{OrderStudy{"norm-L2", {}, {}, {}}, OrderStudy{"norm-H1", {}, {}, {}},
                              OrderStudy{"norm-H2", {}, {}, {}}};
  const SmoothField mf{grids.front().container_radius()};
  const Norms ref = reference_norms(mf);
  for (const Grid& g : grids) {
    const PolarDiff diff(g);
    const Norms n = discrete_norms(diff, mf.sample(g), Mat2::identity(), identity_flowmap(diff));
    const double got[3] = {n.L2, n.H1, n.H2}, want[3] = {ref.L2, ref.H1, ref.H2};
    for (int q = 0; q < 3; ++q) {
      s[q].h.push_back(g.dr());
      s[q].errors.push_back(std::fabs(got[q] - want[q]) / want[q]);
    }
  }
  for (auto& x : s) fill_orders(x);
  return s;
}

/// Self-convergence in dt of u_t = L u + e^{-t} g on a fixed grid, with g
/// chosen so that e^{-t} u* solves the continuous problem. Errors are
/// differences between successive dt levels, so spatial error cancels.
inline OrderStudy lame_temporal_study(const Grid& g, const PhysicalParams& p, double dt0, double T, int levels,
                                      TimeScheme scheme = TimeScheme::implicit_euler) {
  const PolarDiff diff(g);
  const ManufacturedField mf{g.container_radius()};
  const ScalarField rho0(g.size(), p.rho_bar);
  const VectorField u0 = mf.sample(g);
  VectorField gsrc(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 q = g.position(k);
    gsrc.set(k, -1.0 * u0.at(k) - (1.0 / p.rho_bar) * mf.lame(q.x, q.y, p.mu, p.lambda));
  }

  std::vector<VectorField> finals;
  std::vector<double> dts;
  for (int lv = 0; lv <= levels; ++lv) {
    const double dt = dt0 / std::pow(2.0, lv);
    const long n = std::lround(T / dt);
    const LameSolver solver(diff, rho0, p.mu, p.lambda, dt, scheme);
    VectorField u = u0;
    for (long s = 0; s < n; ++s) {
      const double t1 = (s + 1) * dt;
      // Implicit Euler samples the source at the new level; Crank-Nicolson at the midpoint.
      const double ts = scheme == TimeScheme::crank_nicolson ? t1 - 0.5 * dt : t1;
      VectorField f(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) f.set(k, std::exp(-ts) * gsrc.at(k));
      u = solver.step(u, f, {}, 0.0);
    }
    finals.push_back(std::move(u));
    dts.push_back(dt);
  }
  OrderStudy s{scheme == TimeScheme::crank_nicolson ? "lame-temporal-cn" : "lame-temporal-ie", {}, {}, {}};
  for (int lv = 0; lv < levels; ++lv) {
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, norm(finals[lv].at(k) - finals[lv + 1].at(k)));
    s.h.push_back(dts[lv]);
    s.errors.push_back(err);
  }
  fill_orders(s);
  return s;
}

/// Largest deviation of the trapezoidal body update from the exact solution
/// under forcing linear in time, where the rule has no truncation error.
inline double body_trapezoid_defect(double m, double J, double dt, int steps) {
  const Vec2 a{0.3, -0.2}, b{0.05, 0.11};
  const double c = 0.07, d = -0.013;
  Vec2 ell{0.01, -0.02};
  double omega = 0.004;
  const Vec2 ell0 = ell;
  const double omega0 = omega;
  double worst = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double t0 = s * dt, t1 = (s + 1) * dt;
    const BodyVelocity v = solve_body(ell, omega, a + t0 * b, c + d * t0, a + t1 * b, c + d * t1, dt, m, J);
    ell = v.ell;
    omega = v.omega;
    const Vec2 ell_exact = ell0 + (1.0 / m) * (t1 * a + 0.5 * t1 * t1 * b);
    const double omega_exact = omega0 + (c * t1 + 0.5 * d * t1 * t1) / J;
    worst = std::max({worst, norm(ell - ell_exact) / std::max(1.0, norm(ell_exact)),
                      std::fabs(omega - omega_exact) / std::max(1.0, std::fabs(omega_exact))});
  }
  return worst;
}

struct ConvergenceReport {
  OrderStudy lame;
  OrderStudy density;
  std::array<OrderStudy, 3> norms;
  OrderStudy temporal_ie;
  OrderStudy temporal_cn;
  double body_defect = 0.0;

  double spatial_min_order() const {
    return std::min({lame.min_order(), density.min_order(), norms[0].min_order(), norms[1].min_order(),
                     norms[2].min_order()});
  }
};

inline ConvergenceReport run_convergence(const PhysicalParams& p, double R, int base_nr, int base_nt, int levels,
                                         double dt_base, double T_final) {
  ConvergenceReport r;
  const auto grids = refinement_grids(base_nr, base_nt, levels, R);
  r.lame = lame_spatial_study(grids, p);
  r.density = density_spatial_study(grids, p);
  r.norms = norm_spatial_study(grids);
  const Grid g(base_nr, base_nt, R);
  r.temporal_ie = lame_temporal_study(g, p, dt_base, T_final, levels, TimeScheme::implicit_euler);
  r.temporal_cn = lame_temporal_study(g, p, dt_base, T_final, levels, TimeScheme::crank_nicolson);
  const MassInertia mi = body_mass_inertia(p);
  r.body_defect = body_trapezoid_defect(mi.m, mi.J, 1e-2, 1000);
  return r;
}

}  // namespace big
