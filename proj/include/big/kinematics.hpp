#pragma once

// Rotation and flow-map evolution, and the Jacobian products evaluated along
// the map. The map is stored as the displacement X - y so the rest map is
// represented exactly.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "big/algebra.hpp"
#include "big/errors.hpp"
#include "big/model_core.hpp"
#include "big/parallel.hpp"
#include "big/polar_diff.hpp"

namespace big {

/// Index of d^2 Y_l / dx_p dx_i in the packed per-node array.
constexpr int h_index(int l, int p, int i) { return (l * 2 + p) * 2 + i; }

struct FlowMap {
  VectorField disp;                      // X - y
  std::vector<Mat2> gradX;               // dX_i/dy_m
  std::vector<Mat2> G;                   // grad Y evaluated at X
  std::vector<std::array<double, 8>> H;  // second derivatives of Y at X
  std::vector<double> det;               // det grad X
  double distortion = 0.0;               // max |grad X - I|

  Vec2 X(const Grid& g, std::size_t k) const { return g.position(k) + disp.at(k); }
  double inverse_defect() const {
    double m = 0.0;
    for (std::size_t k = 0; k < G.size(); ++k) m = std::fmax(m, max_abs(gradX[k] * G[k] - Mat2::identity()));
    return m;
  }
};

/// Per-node products of grad X and the derivatives of G = (grad X)^{-1}.
/// Second derivatives use d/dy_m G_li = sum_p H_lpi dX_p/dy_m, so
/// H_lpi = sum_m (d/dy_m G_li) G_mp.
inline FlowMap make_flowmap(const PolarDiff& diff, VectorField disp) {
  const Grid& g = diff.grid();
  const std::size_t n = g.size();
  FlowMap m;
  m.disp = std::move(disp);
  m.gradX.resize(n);
  m.G.resize(n);
  m.H.resize(n);
  m.det.resize(n);

  std::array<std::vector<double>, 4> Gm;  // entries of G - I as fields
  for (auto& f : Gm) f.resize(n);

  std::vector<double> bad(n, 1.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const Vec2 gx = diff.grad(m.disp.x, k), gy = diff.grad(m.disp.y, k);
      const Mat2 F{{1.0 + gx.x, gx.y, gy.x, 1.0 + gy.y}};
      m.gradX[k] = F;
      m.det[k] = det(F);
      bad[k] = m.det[k];
      if (!(m.det[k] > 0.0)) continue;
      m.G[k] = inverse(F);
      for (int q = 0; q < 4; ++q) Gm[q][k] = m.G[k].a[q] - Mat2::identity().a[q];
    }
  });
  for (std::size_t k = 0; k < n; ++k)
    if (!(bad[k] > 0.0))
      throw GuardViolation(GuardKind::map_degenerate, bad[k], 0.0,
                           "det grad X = " + std::to_string(bad[k]) + " at node " + std::to_string(k));

  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      std::array<Vec2, 4> dG;  // dG[l*2+i] = (d/dy_0, d/dy_1) of G_li
      for (int q = 0; q < 4; ++q) dG[q] = diff.grad(Gm[q], k);
      const Mat2& G = m.G[k];
      for (int l = 0; l < 2; ++l)
        for (int p = 0; p < 2; ++p)
          for (int i = 0; i < 2; ++i)
            m.H[k][h_index(l, p, i)] = dG[l * 2 + i].x * G(0, p) + dG[l * 2 + i].y * G(1, p);
    }
  });

  double dist = 0.0;
  for (std::size_t k = 0; k < n; ++k) dist = std::fmax(dist, max_abs(m.gradX[k] - Mat2::identity()));
  m.distortion = dist;
  return m;
}

inline FlowMap identity_flowmap(const PolarDiff& diff) {
  return make_flowmap(diff, VectorField(diff.grid().size()));
}

/// 2D rotation update with angular rate constant over the step.
inline double advance_rotation(double angle, double omega_tilde, double dt) { return angle + omega_tilde * dt; }

/// 3D: Q exp(A(w) dt), re-orthonormalized by Gram-Schmidt on the rows.
inline Mat3 advance_rotation(const Mat3& Q, const Vec3& omega_tilde, double dt) {
  Mat3 R = matmul(Q, rodrigues({omega_tilde[0] * dt, omega_tilde[1] * dt, omega_tilde[2] * dt}));
  auto normalize = [](std::array<double, 3>& v) {
    const double s = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (double& x : v) x /= s;
  };
  normalize(R[0]);
  const double d = R[1][0] * R[0][0] + R[1][1] * R[0][1] + R[1][2] * R[0][2];
  for (int i = 0; i < 3; ++i) R[1][i] -= d * R[0][i];
  normalize(R[1]);
  const Vec3 c = cross(R[0], R[1]);
  R[2] = {c[0], c[1], c[2]};
  return R;
}

/// Trapezoidal accumulation of Q u_tilde into the displacement. When
/// `rigid` is set, inner-boundary nodes are placed at h + Q y and the outer
/// boundary stays fixed.
struct RigidPlacement {
  Vec2 h;  // body centre relative to the container centre
  Mat2 Q;
};

inline VectorField advance_displacement(const Grid& g, const VectorField& disp, const Mat2& Q0,
                                        const VectorField& u0, const Mat2& Q1, const VectorField& u1, double dt,
                                        const RigidPlacement* rigid = nullptr) {
  VectorField out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 v = Q0 * u0.at(k) + Q1 * u1.at(k);
    out.set(k, disp.at(k) + (0.5 * dt) * v);
  }
  if (rigid != nullptr) {
    for (int j = 0; j < g.nt(); ++j) {
      const Vec2 y = g.position(0, j);
      out.set(g.index(0, j), rigid->h + rigid->Q * y - y);
      out.set(g.index(g.nr() - 1, j), Vec2{});
    }
  }
  return out;
}

inline FlowMap advance_flowmap(const PolarDiff& diff, const FlowMap& map, const Mat2& Q0, const VectorField& u0,
                               const Mat2& Q1, const VectorField& u1, double dt,
                               const RigidPlacement* rigid = nullptr) {
  return make_flowmap(diff, advance_displacement(diff.grid(), map.disp, Q0, u0, Q1, u1, dt, rigid));
}

struct PhysicalFields {
  VectorField position;  // X(y)
  ScalarField rho;
  VectorField u;
};

inline PhysicalFields to_physical(const Grid& g, const FluidState& s, const Mat2& Q, const FlowMap& map,
                                  double rho_bar) {
  PhysicalFields p{VectorField(g.size()), ScalarField(g.size()), VectorField(g.size())};
  for (std::size_t k = 0; k < g.size(); ++k) {
    p.position.set(k, map.X(g, k));
    p.rho[k] = s.rho_tilde[k] + rho_bar;
    p.u.set(k, Q * s.u_tilde.at(k));
  }
  return p;
}

struct GeometryMargin {
  bool ok;
  double margin;  // R - |h - center| - 1
};

/// No-contact condition dist(h, wall) > 1 + eta (strict).
inline GeometryMargin geometry_guard(const Vec2& h, const Geometry& geo, double eta) {
  const double wall = geo.container_radius - norm(h - geo.center());
  return {wall > 1.0 + eta, wall - 1.0};
}

inline void enforce_geometry(const Vec2& h, const Geometry& geo, double eta, double t) {
  const GeometryMargin gm = geometry_guard(h, geo, eta);
  if (!gm.ok)
    throw GuardViolation(GuardKind::geometry, gm.margin, eta,
                         "t = " + std::to_string(t) + ", h = (" + std::to_string(h.x) + ", " + std::to_string(h.y) +
                             "), wall margin " + std::to_string(gm.margin) + " <= eta " + std::to_string(eta));
}

}  // namespace big
