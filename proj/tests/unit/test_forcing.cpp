#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/forcing_oracle.hpp"
#include "big/forcing.hpp"
#include "big/marcher.hpp"

using namespace big;

namespace {

struct Fixture {
  Grid g{17, 32, 3.0};
  PolarDiff diff{g};
  PhysicalParams p;
  ControllerParams c;
  FlowMap map = identity_flowmap(diff);
  FluidState s;
  BodyState b;
  ScalarField rho0;

  Fixture() {
    s.rho_tilde.assign(g.size(), 0.0);
    s.u_tilde = VectorField(g.size());
    rho0.assign(g.size(), p.rho_bar);
  }
  double m() const { return body_mass_inertia(p).m; }
};

double rel_err(double got, const oracle::Real& want) {
  const double w = static_cast<double>(want);
  return std::fabs(got - w) / std::max(std::fabs(w), 1e-300);
}

}  // namespace

TEST(F1, VanishesAtRestFrameWithMatchingDensity) {
  Fixture f;
  for (std::size_t k = 0; k < f.g.size(); ++k) {
    f.s.rho_tilde[k] = 0.05 * std::sin(0.1 * k);
    f.rho0[k] = f.s.rho_tilde[k] + f.p.rho_bar;
    f.s.u_tilde.set(k, {0.01 * std::cos(0.2 * k), 0.0});
  }
  const ScalarField f1 = eval_F1(f.diff, f.s, f.map, Mat2::identity(), f.rho0, f.p.rho_bar);
  for (double v : f1) EXPECT_EQ(v, 0.0);
}

TEST(F1, ZeroVelocityGradient) {
  Fixture f;
  for (std::size_t k = 0; k < f.g.size(); ++k) f.s.rho_tilde[k] = 0.1;
  for (std::size_t k = 0; k < f.g.size(); ++k) f.s.u_tilde.set(k, {0.3, -0.2});
  const ScalarField f1 = eval_F1(f.diff, f.s, f.map, rotation(0.3), f.rho0, f.p.rho_bar);
  for (double v : f1) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(F2, VanishesAtTrivialState) {
  Fixture f;
  const VectorField f2 = eval_F2(f.diff, f.s, f.map, Mat2::identity(), 0.0, f.rho0, f.p);
  for (std::size_t k = 0; k < f.g.size(); ++k) EXPECT_EQ(f2.at(k), (Vec2{}));
}

TEST(F2, RotationOnlyUnderUniformDensity) {
  Fixture f;
  for (std::size_t k = 0; k < f.g.size(); ++k) {
    const Vec2 y = f.g.position(k);
    f.s.u_tilde.set(k, {0.1 * std::sin(y.x), 0.05 * y.y * y.x});
  }
  const double w = 0.7;
  const VectorField f2 = eval_F2(f.diff, f.s, f.map, Mat2::identity(), w, f.rho0, f.p);
  for (std::size_t k = 0; k < f.g.size(); ++k) {
    const Vec2 expect = -cross(w, f.s.u_tilde.at(k));
    EXPECT_NEAR(f2.x[k], expect.x, 1e-15);
    EXPECT_NEAR(f2.y[k], expect.y, 1e-15);
  }
}

TEST(F2, PressureGroupInIdentityFrame) {
  Fixture f;
  for (std::size_t k = 0; k < f.g.size(); ++k) {
    const Vec2 y = f.g.position(k);
    f.s.rho_tilde[k] = 0.05 * std::cos(y.x) * std::sin(0.5 * y.y);
    f.rho0[k] = f.s.rho_tilde[k] + f.p.rho_bar;
  }
  const VectorField f2 = eval_F2(f.diff, f.s, f.map, Mat2::identity(), 0.0, f.rho0, f.p);
  for (std::size_t k = 0; k < f.g.size(); ++k) {
    const double rho = f.s.rho_tilde[k] + f.p.rho_bar;
    const Vec2 gr = f.diff.grad(f.s.rho_tilde, k);
    const double c = f.p.a * f.p.gamma * std::pow(rho, f.p.gamma - 2.0);
    const Vec2 expect = -c * gr;
    const double scale = std::max(norm(expect), 1e-300);
    EXPECT_LE(norm(f2.at(k) - expect), 1e-12 * scale + 1e-300) << "node " << k;
  }
}

TEST(F2, NonPositiveDensityIsRejected) {
  NodeInput in;
  in.rho_tilde = -1.0;
  EXPECT_THROW(f2_node(in, PhysicalParams{}), GuardViolation);
}

TEST(F1F2, MatchExtendedPrecisionOracle) {
  std::mt19937_64 rng(20240611);
  PhysicalParams p;
  p.mu = 0.37;
  p.lambda = 0.21;
  p.a = 1.3;
  p.gamma = 2.4;
  p.rho_bar = 1.1;
  double worst1 = 0.0, worst2 = 0.0;
  for (int n = 0; n < 100; ++n) {
    const NodeInput in = oracle::random_node(rng);
    const oracle::NodeHP hp = oracle::lift(in);
    worst1 = std::max(worst1, rel_err(f1_node(in, p.rho_bar), oracle::f1(hp, p.rho_bar)));
    const auto want = oracle::f2(hp, p.a, p.gamma, p.mu, p.lambda, p.rho_bar);
    const Vec2 got = f2_node(in, p);
    worst2 = std::max({worst2, rel_err(got.x, want[0]), rel_err(got.y, want[1])});
  }
  EXPECT_LE(worst1, 1e-12);
  EXPECT_LE(worst2, 1e-12);
}

TEST(F3, VanishesAtRestAtStart) {
  Fixture f;
  const Vec2 F3 = eval_F3(f.diff, f.s, f.b, f.map, f.p, f.c, f.m(), 0.0);
  EXPECT_EQ(F3, (Vec2{}));
}

TEST(F3, PureSpring) {
  Fixture f;
  f.b.h_tilde = {0.05, 0.0};
  const Vec2 F3 = eval_F3(f.diff, f.s, f.b, f.map, f.p, f.c, f.m(), f.c.T_I + 1.0);
  EXPECT_EQ(F3.x, -0.05);
  EXPECT_EQ(F3.y, 0.0);
}

TEST(F3, RigidRotationCarriesNoViscousTraction) {
  Fixture f;
  f.p.lambda = 0.3;
  f.s.u_tilde = lifting(f.g, {0.0, 0.0}, 1.0);
  f.b.omega_tilde = 1.0;
  f.b.ell_tilde = {0.02, -0.01};
  const Vec2 F3 = eval_F3(f.diff, f.s, f.b, f.map, f.p, f.c, f.m(), 0.0);
  // Direct evaluation: only the Coriolis-type term and the damper remain.
  const Vec2 expect = -f.m() * cross(1.0, f.b.ell_tilde) - f.c.k_d * f.b.ell_tilde;
  EXPECT_LT(norm(F3 - expect), 1e-13);
  EXPECT_LT(std::fabs(eval_F4(f.diff, f.s, f.b, f.map, f.p)), 1e-13);
}

TEST(F4, UniformDensityExertsNoTorque) {
  Fixture f;
  for (double& r : f.s.rho_tilde) r = 0.2;
  EXPECT_LT(std::fabs(eval_F4(f.diff, f.s, f.b, f.map, f.p)), 1e-13);
}

TEST(F4, RadialPressureVariationExertsNoTorque) {
  Fixture f;
  for (int j = 0; j < f.g.nt(); ++j) f.s.rho_tilde[f.g.index(0, j)] = 1e-2 * f.g.cos_theta(j);
  EXPECT_LT(std::fabs(eval_F4(f.diff, f.s, f.b, f.map, f.p)), 1e-13);
}

TEST(F4, BoundaryQuadratureConvergesSpectrally) {
  // Smooth swirl with a shear layer at the body surface; the trapezoidal
  // rule in theta must agree with the doubled resolution.
  auto torque = [](int nt) {
    const Grid g(17, nt, 3.0);
    const PolarDiff diff(g);
    PhysicalParams p;
    p.lambda = 0.1;
    FluidState s;
    s.rho_tilde.assign(g.size(), 0.0);
    s.u_tilde = VectorField(g.size());
    for (int i = 0; i < g.nr(); ++i)
      for (int j = 0; j < g.nt(); ++j) {
        const std::size_t k = g.index(i, j);
        const double r = g.r(i), th = j * g.dtheta();
        const double q = (r - 1.0) * (3.0 - r) * (1.0 + 0.3 * std::cos(2.0 * th) + 0.2 * std::sin(3.0 * th));
        s.u_tilde.set(k, {-q * std::sin(th), q * std::cos(th)});
        s.rho_tilde[k] = 0.01 * std::exp(std::cos(th)) * (3.0 - r);
      }
    BodyState b;
    return eval_F4(diff, s, b, identity_flowmap(diff), p);
  };
  const double a = torque(64), b = torque(128);
  EXPECT_GT(std::fabs(a), 1e-3);
  EXPECT_LT(std::fabs(a - b), 1e-10 * std::fabs(a));
}

TEST(Forcing, CombinedEvaluatorMatchesSeparateOnes) {
  Fixture f;
  for (std::size_t k = 0; k < f.g.size(); ++k) {
    const Vec2 y = f.g.position(k);
    f.s.rho_tilde[k] = 0.02 * std::sin(y.x + 0.3 * y.y);
    f.s.u_tilde.set(k, {0.01 * std::cos(y.y), 0.02 * std::sin(y.x)});
  }
  f.s.u_tilde = with_boundary(f.g, f.s.u_tilde, {0.01, 0.0}, 0.02);
  f.b.angle = 0.2;
  f.b.omega_tilde = 0.02;
  f.b.ell_tilde = {0.01, 0.0};
  f.b.h_tilde = {-0.03, 0.01};
  const Forcing all = eval_forcing(f.diff, f.s, f.b, f.map, f.rho0, f.p, f.c, f.m(), 0.1);
  const ScalarField f1 = eval_F1(f.diff, f.s, f.map, f.b.Q(), f.rho0, f.p.rho_bar);
  const VectorField f2 = eval_F2(f.diff, f.s, f.map, f.b.Q(), f.b.omega_tilde, f.rho0, f.p);
  EXPECT_EQ(all.f1, f1);
  EXPECT_EQ(all.f2.x, f2.x);
  EXPECT_EQ(all.f2.y, f2.y);
  EXPECT_EQ(all.f3, eval_F3(f.diff, f.s, f.b, f.map, f.p, f.c, f.m(), 0.1));
  EXPECT_EQ(all.f4, eval_F4(f.diff, f.s, f.b, f.map, f.p));
}
