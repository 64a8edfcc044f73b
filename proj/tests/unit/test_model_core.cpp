#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "big/marcher.hpp"
#include "big/model_core.hpp"

using namespace big;
using std::numbers::pi;

namespace {

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Pressure, UnitAndQuadraticCases) {
  PhysicalParams p;
  p.a = 1.0;
  p.gamma = 2.0;
  EXPECT_DOUBLE_EQ(pressure(1.0, p), 1.0);
  EXPECT_DOUBLE_EQ(pressure(2.0, p), 4.0);
  EXPECT_EQ(pressure(0.0, p), 0.0);
}

TEST(Pressure, NegativeDensityIsDomainError) {
  EXPECT_THROW(pressure(-1e-3, PhysicalParams{}), std::domain_error);
}

TEST(Pressure, MonotoneInDensity) {
  PhysicalParams p;
  p.gamma = 2.7;
  p.a = 0.8;
  double prev = pressure(0.0, p);
  for (int k = 1; k <= 2000; ++k) {
    const double v = pressure(k * 2e-3, p);
    ASSERT_GT(v, prev) << "rho = " << k * 2e-3;
    prev = v;
  }
}

TEST(Stress, PurePressure) {
  PhysicalParams p;
  const Mat2 s = stress(Mat2::zero(), 1.0, p);
  EXPECT_EQ(s, (Mat2{{-1.0, 0.0, 0.0, -1.0}}));
}

TEST(Stress, IdentityGradientWithZeroLambda) {
  PhysicalParams p;
  p.mu = 1.0;
  p.lambda = 0.0;
  EXPECT_EQ(stress(Mat2::identity(), 0.0, p), (Mat2{{2.0, 0.0, 0.0, 2.0}}));
}

TEST(Stress, ShearIsSymmetrized) {
  PhysicalParams p;
  p.mu = 1.0;
  p.lambda = 0.0;
  EXPECT_EQ(stress(Mat2{{0.0, 1.0, 0.0, 0.0}}, 0.0, p), (Mat2{{0.0, 1.0, 1.0, 0.0}}));
}

TEST(Stress, ThreeDimensionalMatchesTwoDimensionalBlock) {
  PhysicalParams p;
  p.mu = 0.7;
  p.lambda = 0.3;
  Mat3 g{};
  g[0] = {0.1, 0.2, 0.0};
  g[1] = {-0.4, 0.5, 0.0};
  const Mat3 s3 = stress<3>(g, 2.0, p);
  const Mat2 s2 = stress(Mat2{{0.1, 0.2, -0.4, 0.5}}, 2.0, p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(s3[i][j], s2(i, j), 1e-15);
  EXPECT_NEAR(s3[2][2], p.lambda * 0.6 - 2.0, 1e-15);
}

TEST(BodyMassInertia, Ball) {
  PhysicalParams p;
  p.dim = 3;
  p.rho_body = 1.0;
  const MassInertia mi = body_mass_inertia(p);
  EXPECT_NEAR(mi.m, 4.0 * pi / 3.0, 1e-14);
  EXPECT_NEAR(mi.m, 4.18879, 1e-5);
  EXPECT_NEAR(mi.J, 8.0 * pi / 15.0, 1e-14);
}

TEST(BodyMassInertia, DiskMomentMatchesRadialIntegral) {
  PhysicalParams p;
  p.dim = 2;
  p.rho_body = 1.0;
  const MassInertia mi = body_mass_inertia(p);
  EXPECT_NEAR(mi.m, pi, 1e-15);
  // Independent: 2 pi integral_0^1 r^2 r dr.
  const double J = 2.0 * pi * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                                  [](double r) { return r * r * r; }, 0.0, 1.0);
  EXPECT_NEAR(mi.J, J, 1e-14);
}

TEST(TotalMass, UniformDensityOnIdentityMap) {
  const Grid g(33, 64, 3.0);
  const std::vector<double> det(g.size(), 1.0);
  EXPECT_NEAR(total_mass(g, std::vector<double>(g.size(), 0.0), 1.0, det), 8.0 * pi, 1e-12);
  EXPECT_NEAR(total_mass(g, std::vector<double>(g.size(), 0.5), 1.0, det), 12.0 * pi, 1e-12);
}

TEST(TotalMass, NonPositiveJacobianIsRejected) {
  const Grid g(17, 32, 3.0);
  std::vector<double> det(g.size(), 1.0);
  det[40] = 0.0;
  EXPECT_THROW(total_mass(g, std::vector<double>(g.size(), 0.0), 1.0, det), GuardViolation);
}

TEST(TotalMass, ShortRunKeepsInitialMass) {
  const Grid g(17, 32, 3.0);
  PhysicalParams p;
  Geometry geo;
  MarchConfig cfg;
  cfg.dt = 2e-3;
  cfg.T_final = 0.2;
  const InitialData init = make_initial(InitialKind::displaced_rest, p, geo, g);
  const RunOutcome out = run(p, geo, ControllerParams{}, g, cfg, init);
  ASSERT_FALSE(out.abort.has_value());
  const double m0 = out.trajectory.front().energy.mass;
  for (const auto& r : out.trajectory) EXPECT_NEAR(r.energy.mass, m0, 1e-10 * m0);
}

TEST(MeanDensity, ConstantField) {
  const Grid g(33, 64, 3.0);
  EXPECT_NEAR(mean_density(g, std::vector<double>(g.size(), 1.7)), 1.7, 1e-14);
}

TEST(MeanDensity, ZeroMeanAngularBump) {
  const Grid g(33, 64, 3.0);
  std::vector<double> rho(g.size());
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nt(); ++j)
      rho[g.index(i, j)] = 1.0 + 0.1 * radial_bump(g.r(i), 3.0) * g.cos_theta(j);
  std::vector<double> bump(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) bump[k] = rho[k] - 1.0;
  EXPECT_LT(std::fabs(integrate(g, bump)), 1e-10);
  EXPECT_NEAR(mean_density(g, rho), 1.0, 1e-12);
}

TEST(MeanDensity, RadialBumpAgainstIndependentQuadrature) {
  const double R = 3.0, eps = 0.05;
  const double M = 2.0 * pi * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                  [&](double r) { return radial_bump(r, R) * r; }, 1.0, R, 12, 1e-14);
  const double expected = 1.0 + eps * M / (pi * (R * R - 1.0));
  const Grid g(257, 64, R);
  std::vector<double> rho(g.size());
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nt(); ++j) rho[g.index(i, j)] = 1.0 + eps * radial_bump(g.r(i), R);
  EXPECT_NEAR(mean_density(g, rho), expected, 1e-6);
}

TEST(PhysicalParams, DefaultsSatisfyHypotheses) { EXPECT_TRUE(PhysicalParams{}.violations().empty()); }

TEST(PhysicalParams, RejectsSmallGamma) {
  PhysicalParams p;
  p.gamma = 1.4;
  EXPECT_TRUE(mentions(p.violations(), "gamma must exceed 3/2"));
}

TEST(PhysicalParams, RejectsZeroViscosity) {
  PhysicalParams p;
  p.mu = 0.0;
  EXPECT_TRUE(mentions(p.violations(), "[viscosity] mu must be positive"));
}

TEST(PhysicalParams, RejectsNegativeBulkSum) {
  PhysicalParams p;
  p.lambda = -2.0 * p.mu;
  EXPECT_TRUE(mentions(p.violations(), "[viscosity] lambda + mu"));
}

TEST(Geometry, RejectsTargetTooCloseToWall) {
  Geometry geo;
  geo.h1 = {1.95, 0.0};
  EXPECT_FALSE(geo.violations().empty());
  geo.h1 = {1.5, 0.0};
  EXPECT_TRUE(geo.violations().empty());
}

TEST(Grid, NodePlacementAndWeights) {
  const Grid g(17, 32, 3.0);
  EXPECT_DOUBLE_EQ(g.r(0), 1.0);
  EXPECT_DOUBLE_EQ(g.r(16), 3.0);
  EXPECT_EQ(g.index(2, 5), 2u * 32u + 5u);
  EXPECT_TRUE(g.on_inner(g.index(0, 3)));
  EXPECT_TRUE(g.on_outer(g.index(16, 3)));
  EXPECT_NEAR(annulus_area(g), 8.0 * pi, 1e-12);
}

TEST(Grid, TooSmallIsRejected) {
  EXPECT_THROW(Grid(3, 32, 3.0), std::invalid_argument);
  EXPECT_THROW(Grid(17, 32, 0.9), std::invalid_argument);
}
