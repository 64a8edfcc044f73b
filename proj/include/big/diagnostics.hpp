#pragma once

// Energy functional, dissipation, the right side of the energy identity,
// discrete norms and the balance residual. Integrals are over the current
// fluid domain, pulled back to the reference annulus with weight det grad X.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "big/algebra.hpp"
#include "big/controller.hpp"
#include "big/errors.hpp"
#include "big/kinematics.hpp"
#include "big/model_core.hpp"
#include "big/polar_diff.hpp"

namespace big {

/// Physical (x-frame) derivatives of w(Y(x)) given its y-derivatives.
/// grad(j, p) = dw_j/dx_p; hess[j](p, q) = d^2 w_j / dx_p dx_q.
struct PhysDerivs {
  Mat2 grad;
  std::array<Mat2, 2> hess{};

  double div() const { return trace(grad); }
  Vec2 laplacian() const { return {hess[0](0, 0) + hess[0](1, 1), hess[1](0, 0) + hess[1](1, 1)}; }
  Vec2 grad_div() const { return {hess[0](0, 0) + hess[1](1, 0), hess[0](0, 1) + hess[1](1, 1)}; }
};

inline PhysDerivs physical_derivs(const Deriv2& a, const Deriv2& b, const Mat2& G, const std::array<double, 8>& H) {
  const std::array<Deriv2, 2> d = {a, b};
  PhysDerivs out;
  for (int j = 0; j < 2; ++j) {
    const Vec2 gy = d[j].gradient();
    const Mat2 hy{{d[j].fxx, d[j].fxy, d[j].fxy, d[j].fyy}};
    for (int p = 0; p < 2; ++p) out.grad(j, p) = gy.x * G(0, p) + gy.y * G(1, p);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        double s = 0.0;
        for (int m = 0; m < 2; ++m) {
          for (int l = 0; l < 2; ++l) s += hy(m, l) * G(m, p) * G(l, q);
          s += gy[m] * H[h_index(m, q, p)];
        }
        out.hess[j](p, q) = s;
      }
  }
  return out;
}

/// Physical derivatives of the field Q u_tilde at node k.
inline PhysDerivs velocity_derivs(const PolarDiff& diff, const VectorField& u_tilde, const Mat2& Q,
                                  const FlowMap& map, std::size_t k) {
  const Deriv2 a = diff.at(u_tilde.x, k), b = diff.at(u_tilde.y, k);
  // Q is constant in space, so derivatives of Q u are Q times those of u.
  Deriv2 qa, qb;
  auto mix = [](double q0, const Deriv2& x, double q1, const Deriv2& y) {
    return Deriv2{q0 * x.fx + q1 * y.fx, q0 * x.fy + q1 * y.fy, q0 * x.fxx + q1 * y.fxx, q0 * x.fxy + q1 * y.fxy,
                  q0 * x.fyy + q1 * y.fyy};
  };
  qa = mix(Q(0, 0), a, Q(0, 1), b);
  qb = mix(Q(1, 0), a, Q(1, 1), b);
  return physical_derivs(qa, qb, map.G[k], map.H[k]);
}

struct EnergyReport {
  double E_kin = 0.0;
  double E_compress = 0.0;
  double E_body = 0.0;
  double E_spring = 0.0;
  double D_visc_mu = 0.0;
  double D_visc_lambda = 0.0;
  double D_damp = 0.0;
  double mass = 0.0;

  double E_total() const { return E_kin + E_compress + E_body + E_spring; }
  double D_visc() const { return D_visc_mu + D_visc_lambda; }
  double D_total() const { return D_visc() + D_damp; }
};

/// Terms on the right of the energy identity (rates).
struct BalanceTerms {
  double fluid_forcing = 0.0;  // integral of f0 p* rho*/rho_bar + f1 . u
  double body_forcing = 0.0;   // f2 . ell + f3 . omega
  double cubic = 0.0;          // integral of p*/(2 rho_bar) |rho*|^2 div u
  double transport = 0.0;      // integral of div(|u|^2 u / 2)
  double spring_rate = 0.0;    // kbar_p'/2 |h1 - h|^2

  double total() const { return fluid_forcing + body_forcing + cubic + transport + spring_rate; }
};

struct EnergyContext {
  PhysicalParams phys;
  ControllerParams ctrl;
  MassInertia body;
};

inline EnergyReport energy(const PolarDiff& diff, const FluidState& s, const BodyState& b, const FlowMap& map,
                           double t, const EnergyContext& ctx) {
  const Grid& g = diff.grid();
  const PhysicalParams& p = ctx.phys;
  const double rb = p.rho_bar;
  const double pstar = p.a * p.gamma * std::pow(rb, p.gamma - 2.0);
  const Mat2 Q = b.Q();

  EnergyReport r;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = g.weight(k) * map.det[k];
    const Vec2 u = s.u_tilde.at(k);
    const double rs = s.rho_tilde[k];
    const PhysDerivs d = velocity_derivs(diff, s.u_tilde, Q, map, k);
    const Mat2 D = sym(d.grad);
    r.E_kin += w * 0.5 * dot(u, u);
    r.E_compress += w * pstar / (2.0 * rb) * rs * rs;
    r.D_visc_mu += w * 2.0 * (p.mu / rb) * ddot(D, D);
    r.D_visc_lambda += w * (p.lambda / rb) * d.div() * d.div();
    r.mass += w * (rs + rb);
  }
  const Vec2 ell = Q * b.ell_tilde;
  r.E_body = 0.5 * (ctx.body.m / rb) * dot(ell, ell) + 0.5 * (ctx.body.J / rb) * b.omega_tilde * b.omega_tilde;
  r.E_spring = 0.5 * (kp(t, ctx.ctrl) / rb) * dot(b.h_tilde, b.h_tilde);
  r.D_damp = (ctx.ctrl.k_d / rb) * dot(ell, ell);
  return r;
}

inline BalanceTerms balance_terms(const PolarDiff& diff, const FluidState& s, const BodyState& b, const FlowMap& map,
                                  double t, const EnergyContext& ctx) {
  const Grid& g = diff.grid();
  const PhysicalParams& p = ctx.phys;
  const double rb = p.rho_bar;
  const double pstar = p.a * p.gamma * std::pow(rb, p.gamma - 2.0);
  const Mat2 Q = b.Q();

  BalanceTerms r;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = g.weight(k) * map.det[k];
    const double rs = s.rho_tilde[k];
    const double rho = rs + rb;
    const Vec2 u = Q * s.u_tilde.at(k);
    const PhysDerivs d = velocity_derivs(diff, s.u_tilde, Q, map, k);
    const Vec2 gy = diff.grad(s.rho_tilde, k);
    const Vec2 grad_rho = transpose(map.G[k]) * gy;
    const double div = d.div();

    const double f0 = -rs * div;
    const Vec2 visc = p.mu * d.laplacian() + (p.lambda + p.mu) * d.grad_div();
    const Vec2 f1 = -(d.grad * u) - (1.0 / rb - 1.0 / rho) * visc +
                    (pstar - p.a * p.gamma * std::pow(rho, p.gamma - 2.0)) * grad_rho;
    r.fluid_forcing += w * (f0 * pstar * rs / rb + dot(f1, u));
    r.cubic += w * pstar / (2.0 * rb) * rs * rs * div;
    r.transport += w * (dot(u, d.grad * u) + 0.5 * dot(u, u) * div);
  }

  // f2, f3 on the body surface; the surface moves rigidly so x - h = Q y and N = Q n.
  Vec2 f2;
  double f3 = 0.0;
  const double dth = g.dtheta();
  for (int j = 0; j < g.nt(); ++j) {
    const std::size_t k = g.index(0, j);
    const double rho = s.rho_tilde[k] + rb;
    const double q = pstar * s.rho_tilde[k] - p.a * (std::pow(rho, p.gamma) - std::pow(rb, p.gamma)) / rb;
    const Vec2 xh = Q * g.position(0, j);
    const Vec2 N = -xh;
    f2 += -dth * q * N;
    f3 += -dth * cross(xh, q * N);
  }
  r.body_forcing = dot(f2, Q * b.ell_tilde) + f3 * b.omega_tilde;
  r.spring_rate = 0.5 * (kp_prime(t, ctx.ctrl) / rb) * dot(b.h_tilde, b.h_tilde);
  return r;
}

/// Quantities per record needed for the balance residual.
struct BalanceSample {
  double t;
  double E;
  double D;
  double rhs;
};

/// r_n = (E_{n+1} - E_n)/dt_n + D_n - RHS_n, returned unnormalized.
inline std::vector<double> balance_residual_raw(std::span<const BalanceSample> w) {
  if (w.size() < 3) throw NumericalFailure(FailureKind::insufficient_data, "balance residual needs >= 3 records");
  std::vector<double> r(w.size() - 1);
  for (std::size_t n = 0; n + 1 < w.size(); ++n) {
    const double dt = w[n + 1].t - w[n].t;
    r[n] = (w[n + 1].E - w[n].E) / dt + w[n].D - w[n].rhs;
  }
  return r;
}

/// |r_n| divided by max over the window of max(E, D, eps). Pointwise
/// normalization is singular at rest states where E = D = 0.
inline std::vector<double> balance_residual(std::span<const BalanceSample> w) {
  std::vector<double> r = balance_residual_raw(w);
  double scale = std::numeric_limits<double>::epsilon();
  for (const auto& s : w) scale = std::max({scale, s.E, s.D});
  for (double& v : r) v = std::fabs(v) / scale;
  return r;
}

struct Norms {
  double L2 = 0.0, H1 = 0.0, H2 = 0.0;
};

/// Physical-frame Sobolev norms of the vector field Q u_tilde; each norm
/// includes all lower-order terms.
inline Norms discrete_norms(const PolarDiff& diff, const VectorField& u_tilde, const Mat2& Q, const FlowMap& map) {
  const Grid& g = diff.grid();
  double l2 = 0.0, h1 = 0.0, h2 = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = g.weight(k) * map.det[k];
    const Vec2 u = Q * u_tilde.at(k);
    const PhysDerivs d = velocity_derivs(diff, u_tilde, Q, map, k);
    l2 += w * dot(u, u);
    h1 += w * ddot(d.grad, d.grad);
    h2 += w * (ddot(d.hess[0], d.hess[0]) + ddot(d.hess[1], d.hess[1]));
  }
  return {std::sqrt(l2), std::sqrt(l2 + h1), std::sqrt(l2 + h1 + h2)};
}

inline Norms discrete_norms(const PolarDiff& diff, const ScalarField& f, const FlowMap& map) {
  VectorField v(f.size());
  v.x = f;
  return discrete_norms(diff, v, Mat2::identity(), map);
}

}  // namespace big
