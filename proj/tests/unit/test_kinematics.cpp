#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "big/kinematics.hpp"

using namespace big;
using std::numbers::pi;

TEST(Algebra, PlanarCrossProducts) {
  EXPECT_EQ(cross(Vec2{1.0, 0.0}, Vec2{0.0, 1.0}), 1.0);
  EXPECT_EQ(cross(Vec2{0.0, 1.0}, Vec2{1.0, 0.0}), -1.0);
  EXPECT_EQ(cross(2.0, Vec2{1.0, 0.0}), (Vec2{0.0, 2.0}));
  EXPECT_EQ(cross(2.0, Vec2{0.0, 1.0}), (Vec2{-2.0, 0.0}));
  // Agrees with the embedded 3D product.
  const Vec3 c = cross(Vec3{0.0, 0.0, 0.7}, Vec3{0.3, -0.2, 0.0});
  const Vec2 c2 = cross(0.7, Vec2{0.3, -0.2});
  EXPECT_DOUBLE_EQ(c[0], c2.x);
  EXPECT_DOUBLE_EQ(c[1], c2.y);
  EXPECT_EQ((skew(0.7) * Vec2{0.3, -0.2}), c2);
}

TEST(Algebra, Mat2Operations) {
  const Mat2 a{{1.0, 2.0, 3.0, 4.0}};
  EXPECT_EQ(det(a), -2.0);
  EXPECT_EQ(trace(a), 5.0);
  EXPECT_EQ(transpose(a), (Mat2{{1.0, 3.0, 2.0, 4.0}}));
  const Mat2 p = a * inverse(a);
  EXPECT_LT(max_abs(p - Mat2::identity()), 1e-15);
  EXPECT_EQ(ddot(a, Mat2::identity()), 5.0);
  EXPECT_EQ(sym(a), (Mat2{{1.0, 2.5, 2.5, 4.0}}));
}

TEST(Skew, AboutZ) {
  const Mat3 s = skew(Vec3{0.0, 0.0, 1.0});
  const Mat3 expected{{{0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};
  EXPECT_EQ(s, expected);
}

TEST(Skew, ZeroVector) { EXPECT_EQ(skew(Vec3{0.0, 0.0, 0.0}), Mat3{}); }

TEST(AdvanceRotation, ZeroRateKeepsAngle) { EXPECT_EQ(advance_rotation(0.37, 0.0, 0.5), 0.37); }

TEST(AdvanceRotation, PlanarHalfTurn) {
  const Mat2 Q = rotation(advance_rotation(0.0, pi, 1.0));
  EXPECT_LT(max_abs(Q - Mat2{{-1.0, 0.0, 0.0, -1.0}}), 1e-15);
}

TEST(AdvanceRotation, SpatialQuarterTurnAboutZ) {
  Mat3 Q = identity<3>();
  const int steps = 1000;
  for (int s = 0; s < steps; ++s) Q = advance_rotation(Q, {0.0, 0.0, 1.0}, (pi / 2.0) / steps);
  const Mat3 expected{{{0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}}};
  EXPECT_LT(max_abs_diff(Q, expected), 1e-10);
}

TEST(AdvanceRotation, SpatialStaysOrthonormal) {
  Mat3 Q = identity<3>();
  for (int s = 0; s < 500; ++s) Q = advance_rotation(Q, {0.3, -0.7, 1.1}, 0.01);
  EXPECT_LT(max_abs_diff(matmul(Q, transpose(Q)), identity<3>()), 1e-13);
}

TEST(FlowMap, RestMapStaysIdentity) {
  const Grid g(17, 32, 3.0);
  const PolarDiff diff(g);
  FlowMap m = identity_flowmap(diff);
  const VectorField zero(g.size());
  for (int s = 0; s < 10; ++s) m = advance_flowmap(diff, m, Mat2::identity(), zero, Mat2::identity(), zero, 0.1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    ASSERT_EQ(m.disp.at(k), (Vec2{}));
    ASSERT_EQ(m.det[k], 1.0);
  }
  EXPECT_EQ(m.distortion, 0.0);
}

TEST(FlowMap, AffineMapHasVanishingSecondDerivatives) {
  const Grid g(17, 32, 3.0);
  const PolarDiff diff(g);
  const Mat2 M{{1.1, 0.05, -0.08, 0.95}};
  const Vec2 c{0.02, -0.01};
  VectorField disp(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 y = g.position(k);
    disp.set(k, M * y + c - y);
  }
  const FlowMap m = make_flowmap(diff, disp);
  double worst_h = 0.0, worst_g = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (double v : m.H[k]) worst_h = std::max(worst_h, std::fabs(v));
    worst_g = std::max(worst_g, max_abs(m.G[k] - inverse(M)));
  }
  EXPECT_LT(worst_h, 1e-12);
  EXPECT_LT(worst_g, 1e-13);
  EXPECT_LT(m.inverse_defect(), 1e-14);
  EXPECT_NEAR(m.distortion, 0.1, 1e-13);
}

TEST(FlowMap, DegenerateMapIsRejected) {
  const Grid g(17, 32, 3.0);
  const PolarDiff diff(g);
  VectorField disp(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) disp.set(k, Vec2{-2.0 * g.position(k).x, 0.0});  // reflection
  EXPECT_THROW(make_flowmap(diff, disp), GuardViolation);
}

TEST(FlowMap, RigidMotionPlacesBodyBoundaryExactly) {
  const Grid g(17, 32, 3.0);
  const PolarDiff diff(g);
  FlowMap m = identity_flowmap(diff);
  const Vec2 ell_t{0.2, -0.1};
  const double w = 0.3, dt = 0.01;
  double angle = 0.0;
  Vec2 h{};
  VectorField u(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) u.set(k, ell_t + cross(w, g.position(k)));
  for (int s = 0; s < 50; ++s) {
    const Mat2 Q0 = rotation(angle);
    angle = advance_rotation(angle, w, dt);
    const Mat2 Q1 = rotation(angle);
    h += (0.5 * dt) * (Q0 * ell_t + Q1 * ell_t);
    const RigidPlacement place{h, Q1};
    m = advance_flowmap(diff, m, Q0, u, Q1, u, dt, &place);
  }
  const Mat2 Q = rotation(angle);
  for (int j = 0; j < g.nt(); ++j) {
    const std::size_t k = g.index(0, j);
    const Vec2 expect = h + Q * g.position(0, j);
    EXPECT_LT(norm(m.X(g, k) - expect), 1e-15);
    EXPECT_EQ(m.X(g, g.index(g.nr() - 1, j)), g.position(g.nr() - 1, j));
  }
}

TEST(FlowMap, SmallVelocityStepDistortionBound) {
  const Grid g(17, 32, 3.0);
  const PolarDiff diff(g);
  VectorField u(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 y = g.position(k);
    u.set(k, {0.01 * std::sin(y.x) * std::cos(0.5 * y.y), 0.01 * std::cos(y.x + y.y)});
  }
  double grad_max = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 a = diff.grad(u.x, k), b = diff.grad(u.y, k);
    grad_max = std::max({grad_max, std::fabs(a.x), std::fabs(a.y), std::fabs(b.x), std::fabs(b.y)});
  }
  const double dt = 0.05;
  const FlowMap m = advance_flowmap(diff, identity_flowmap(diff), Mat2::identity(), u, Mat2::identity(), u, dt);
  EXPECT_LE(m.distortion, grad_max * dt * (1.0 + 1e-12));
}

TEST(ToPhysical, IdentityTransform) {
  const Grid g(17, 32, 3.0);
  const PolarDiff diff(g);
  FluidState s;
  s.rho_tilde.assign(g.size(), 0.0);
  s.u_tilde = VectorField(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) s.u_tilde.set(k, {0.1 * k, -0.2});
  const PhysicalFields p = to_physical(g, s, Mat2::identity(), identity_flowmap(diff), 1.3);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(p.position.at(k), g.position(k));
    EXPECT_EQ(p.u.at(k), s.u_tilde.at(k));
    EXPECT_EQ(p.rho[k], 1.3);
  }
}

TEST(ToPhysical, RigidFieldUnderRotation) {
  const Grid g(17, 32, 3.0);
  const double w = 0.4, angle = 0.9;
  const Vec2 ell_t{0.1, 0.3}, h{0.05, -0.02};
  const Mat2 Q = rotation(angle);
  FluidState s;
  s.rho_tilde.assign(g.size(), 0.0);
  s.u_tilde = VectorField(g.size());
  VectorField disp(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 y = g.position(k);
    s.u_tilde.set(k, ell_t + cross(w, y));
    disp.set(k, h + Q * y - y);
  }
  const PolarDiff diff(g);
  const PhysicalFields p = to_physical(g, s, Q, make_flowmap(diff, disp), 1.0);
  const Vec2 ell = Q * ell_t;
  for (int j = 0; j < g.nt(); ++j) {
    const std::size_t k = g.index(0, j);
    const Vec2 expect = ell + cross(w, p.position.at(k) - h);
    EXPECT_LT(norm(p.u.at(k) - expect), 1e-15);
  }
}

TEST(GeometryGuard, Cases) {
  Geometry geo;
  geo.container_radius = 3.0;
  const GeometryMargin centre = geometry_guard({0.0, 0.0}, geo, 0.1);
  EXPECT_TRUE(centre.ok);
  EXPECT_DOUBLE_EQ(centre.margin, 2.0);
  EXPECT_FALSE(geometry_guard({1.95, 0.0}, geo, 0.1).ok);
  EXPECT_FALSE(geometry_guard({0.0, 1.9}, geo, 0.1).ok);
  EXPECT_TRUE(geometry_guard({0.0, 1.89}, geo, 0.1).ok);
  EXPECT_THROW(enforce_geometry({1.95, 0.0}, geo, 0.1, 0.0), GuardViolation);
}
