#pragma once

// Nonlinear right-hand sides of the transformed system. Node-level kernels
// take every derivative explicitly so they can be checked in isolation; the
// field-level evaluator gathers those inputs from a state and flow map.

#include <array>
#include <cmath>
#include <vector>

#include "big/algebra.hpp"
#include "big/controller.hpp"
#include "big/kinematics.hpp"
#include "big/linear_cascade.hpp"
#include "big/model_core.hpp"
#include "big/parallel.hpp"
#include "big/polar_diff.hpp"

namespace big {

/// Inputs of F1/F2 at one node. J(i,l) = du_i/dy_l; Hu[i](m,l) = d^2 u_i/dy_m dy_l.
struct NodeInput {
  double rho_tilde = 0.0;
  double rho0 = 1.0;
  Vec2 u;
  Mat2 J;
  std::array<Mat2, 2> Hu{};
  Vec2 grad_rho;
  Mat2 G = Mat2::identity();
  Mat2 Q = Mat2::identity();
  std::array<double, 8> H{};
  double omega = 0.0;
};

inline double kronecker(int a, int b) { return a == b ? 1.0 : 0.0; }

inline double f1_node(const NodeInput& in, double rho_bar) {
  const double rho = in.rho_tilde + rho_bar;
  const Mat2 A = transpose(in.G * in.Q) - Mat2::identity();
  return -rho * ddot(in.J, A) - (rho - in.rho0) * trace(in.J);
}

inline Vec2 f2_node(const NodeInput& in, const PhysicalParams& p) {
  const double rho = in.rho_tilde + p.rho_bar;
  if (!(rho > 0.0)) throw GuardViolation(GuardKind::positivity, rho, 0.0, "non-positive density in F2");
  const double mu = p.mu, lm = p.lambda + p.mu;
  const Mat2& G = in.G;
  const auto& H = in.H;
  const double coef = (in.rho0 - rho) / (in.rho0 * rho);
  const double pgrad = p.a * p.gamma * std::pow(rho, p.gamma - 2.0);
  const Vec2 rot = cross(in.omega, in.u);

  Vec2 out;
  for (int i = 0; i < 2; ++i) {
    double visc = 0.0;  // groups scaled by mu/rho
    for (int m = 0; m < 2; ++m)
      for (int l = 0; l < 2; ++l)
        for (int q = 0; q < 2; ++q)
          visc += in.Hu[i](m, l) * (G(m, q) * G(l, q) - kronecker(m, q) * kronecker(l, q));
    for (int l = 0; l < 2; ++l)
      for (int q = 0; q < 2; ++q) visc += in.J(i, l) * H[h_index(l, q, q)];

    double bulk = 0.0;  // groups scaled by (lambda+mu)/rho
    for (int q = 0; q < 2; ++q)
      for (int l = 0; l < 2; ++l) bulk += in.J(q, l) * H[h_index(l, q, i)];
    for (int q = 0; q < 2; ++q)
      for (int m = 0; m < 2; ++m)
        for (int l = 0; l < 2; ++l) bulk += in.Hu[q](m, l) * (G(m, q) - kronecker(m, q)) * G(l, i);
    for (int q = 0; q < 2; ++q)
      for (int l = 0; l < 2; ++l) bulk += in.Hu[q](q, l) * (G(l, i) - kronecker(l, i));

    const double lap = in.Hu[i](0, 0) + in.Hu[i](1, 1);
    const double graddiv = in.Hu[0](0, i) + in.Hu[1](1, i);

    double pres = 0.0;
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l) pres += in.Q(j, i) * in.grad_rho[l] * G(l, j);

    out[i] = -rot[i] + mu / rho * visc + mu * lap * coef + lm / rho * bulk + lm * graddiv * coef - pgrad * pres;
  }
  return out;
}

struct Forcing {
  ScalarField f1;
  VectorField f2;
  Vec2 f3;
  double f4 = 0.0;
};

/// Boundary stress integrand [mu(S + S^T) + lambda tr(S) I - a(rho^gamma - rho_bar^gamma) I] n
/// with S = Q J G and n the unit normal pointing into the body. The constant
/// rho_bar^gamma integrates to zero on the closed circle.
inline Vec2 boundary_traction(const Mat2& Q, const Mat2& J, const Mat2& G, double rho_tilde, const Vec2& n,
                              const PhysicalParams& p) {
  const Mat2 S = Q * J * G;
  Mat2 T = p.mu * (S + transpose(S));
  const double diag = p.lambda * trace(S) - p.a * (std::pow(rho_tilde + p.rho_bar, p.gamma) - std::pow(p.rho_bar, p.gamma));
  T(0, 0) += diag;
  T(1, 1) += diag;
  return T * n;
}

struct BodyLoads {
  Vec2 force;     // -(boundary integral) only
  double torque;  // -(boundary moment)
};

/// Trapezoidal quadrature on r = 1 of the traction and its moment.
inline BodyLoads body_loads(const PolarDiff& diff, const FluidState& s, const FlowMap& map, const Mat2& Q,
                            const PhysicalParams& p) {
  const Grid& g = diff.grid();
  const double dth = g.dtheta();
  Vec2 f;
  double tq = 0.0;
  for (int j = 0; j < g.nt(); ++j) {
    const std::size_t k = g.index(0, j);
    const Vec2 gx = diff.grad(s.u_tilde.x, k), gy = diff.grad(s.u_tilde.y, k);
    const Mat2 J{{gx.x, gx.y, gy.x, gy.y}};
    const Vec2 y = g.position(0, j);
    const Vec2 t = boundary_traction(Q, J, map.G[k], s.rho_tilde[k], -y, p);
    f += t;
    tq += cross(y, t);
  }
  return {-dth * f, -dth * tq};
}

inline Vec2 eval_F3(const PolarDiff& diff, const FluidState& s, const BodyState& b, const FlowMap& map,
                    const PhysicalParams& p, const ControllerParams& c, double m, double t) {
  const Mat2 Q = b.Q();
  const BodyLoads loads = body_loads(diff, s, map, Q, p);
  return -m * cross(b.omega_tilde, b.ell_tilde) + loads.force + feedback_lagrangian(t, b.h_tilde, b.ell_tilde, Q, c);
}

inline double eval_F4(const PolarDiff& diff, const FluidState& s, const BodyState& b, const FlowMap& map,
                      const PhysicalParams& p) {
  return body_loads(diff, s, map, b.Q(), p).torque;
}

inline NodeInput gather_node(const PolarDiff& diff, const FluidState& s, const FlowMap& map, const Mat2& Q,
                             double omega, const ScalarField& rho0, std::size_t k) {
  const Deriv2 a = diff.at(s.u_tilde.x, k), b = diff.at(s.u_tilde.y, k);
  NodeInput in;
  in.rho_tilde = s.rho_tilde[k];
  in.rho0 = rho0[k];
  in.u = s.u_tilde.at(k);
  in.J = Mat2{{a.fx, a.fy, b.fx, b.fy}};
  in.Hu = {Mat2{{a.fxx, a.fxy, a.fxy, a.fyy}}, Mat2{{b.fxx, b.fxy, b.fxy, b.fyy}}};
  in.grad_rho = diff.grad(s.rho_tilde, k);
  in.G = map.G[k];
  in.Q = Q;
  in.H = map.H[k];
  in.omega = omega;
  return in;
}

inline ScalarField eval_F1(const PolarDiff& diff, const FluidState& s, const FlowMap& map, const Mat2& Q,
                           const ScalarField& rho0, double rho_bar) {
  const std::size_t n = diff.grid().size();
  ScalarField out(n);
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) out[k] = f1_node(gather_node(diff, s, map, Q, 0.0, rho0, k), rho_bar);
  });
  return out;
}

inline VectorField eval_F2(const PolarDiff& diff, const FluidState& s, const FlowMap& map, const Mat2& Q,
                           double omega, const ScalarField& rho0, const PhysicalParams& p) {
  const std::size_t n = diff.grid().size();
  VectorField out(n);
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) out.set(k, f2_node(gather_node(diff, s, map, Q, omega, rho0, k), p));
  });
  return out;
}

/// All four terms from one gather pass per node.
inline Forcing eval_forcing(const PolarDiff& diff, const FluidState& s, const BodyState& b, const FlowMap& map,
                            const ScalarField& rho0, const PhysicalParams& p, const ControllerParams& c, double m,
                            double t) {
  const std::size_t n = diff.grid().size();
  const Mat2 Q = b.Q();
  Forcing f{ScalarField(n), VectorField(n), {}, 0.0};
  parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      const NodeInput in = gather_node(diff, s, map, Q, b.omega_tilde, rho0, k);
      f.f1[k] = f1_node(in, p.rho_bar);
      f.f2.set(k, f2_node(in, p));
    }
  });
  const BodyLoads loads = body_loads(diff, s, map, Q, p);
  f.f3 = -m * cross(b.omega_tilde, b.ell_tilde) + loads.force + feedback_lagrangian(t, b.h_tilde, b.ell_tilde, Q, c);
  f.f4 = loads.torque;
  return f;
}

}  // namespace big
