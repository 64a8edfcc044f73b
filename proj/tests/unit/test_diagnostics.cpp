#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "big/diagnostics.hpp"
#include "big/marcher.hpp"

using namespace big;

namespace {

struct Rest {
  Grid g{33, 64, 3.0};
  PolarDiff diff{g};
  FlowMap map = identity_flowmap(diff);
  FluidState s;
  BodyState b;
  EnergyContext ctx{PhysicalParams{}, ControllerParams{}, body_mass_inertia(PhysicalParams{})};

  Rest() {
    s.rho_tilde.assign(g.size(), 0.0);
    s.u_tilde = VectorField(g.size());
  }
};

}  // namespace

TEST(Energy, RestStateAfterRampHasOnlySpring) {
  Rest r;
  r.b.h_tilde = {0.05, 0.0};
  const EnergyReport e = energy(r.diff, r.s, r.b, r.map, r.ctx.ctrl.T_I + 0.5, r.ctx);
  EXPECT_DOUBLE_EQ(e.E_spring, 0.00125);
  EXPECT_DOUBLE_EQ(e.E_total(), 0.00125);
  EXPECT_EQ(e.E_kin, 0.0);
  EXPECT_EQ(e.E_compress, 0.0);
  EXPECT_EQ(e.E_body, 0.0);
  EXPECT_EQ(e.D_total(), 0.0);
}

TEST(Energy, SpringVanishesAtStart) {
  Rest r;
  r.b.h_tilde = {0.05, 0.0};
  EXPECT_EQ(energy(r.diff, r.s, r.b, r.map, 0.0, r.ctx).E_spring, 0.0);
}

TEST(Energy, CompressionOfConstantPerturbation) {
  Rest r;
  const double c = 0.1;
  for (double& v : r.s.rho_tilde) v = c;
  const PhysicalParams& p = r.ctx.phys;
  const double pstar = p.a * p.gamma * std::pow(p.rho_bar, p.gamma - 2.0);
  const double expect = pstar / (2.0 * p.rho_bar) * c * c * 8.0 * std::numbers::pi;
  EXPECT_NEAR(energy(r.diff, r.s, r.b, r.map, 0.0, r.ctx).E_compress, expect, 1e-13);
}

TEST(Energy, BodyKineticEnergy) {
  Rest r;
  r.b.ell_tilde = {0.1, 0.0};
  r.b.omega_tilde = 0.2;
  r.b.angle = 0.7;
  const MassInertia mi = r.ctx.body;
  const EnergyReport e = energy(r.diff, r.s, r.b, r.map, 0.0, r.ctx);
  EXPECT_NEAR(e.E_body, 0.5 * mi.m * 0.01 + 0.5 * mi.J * 0.04, 1e-15);
  EXPECT_NEAR(e.D_damp, r.ctx.ctrl.k_d * 0.01, 1e-15);
}

TEST(Energy, RigidRotationDissipatesNothing) {
  Rest r;
  for (std::size_t k = 0; k < r.g.size(); ++k) r.s.u_tilde.set(k, cross(0.3, r.g.position(k)));
  const EnergyReport e = energy(r.diff, r.s, r.b, r.map, 0.0, r.ctx);
  EXPECT_LT(e.D_visc(), 1e-24);
  EXPECT_GT(e.E_kin, 0.0);
}

TEST(BalanceResidual, ExactEquilibriumIsZero) {
  std::vector<BalanceSample> w;
  for (int n = 0; n < 10; ++n) w.push_back({0.1 * n, 0.0, 0.0, 0.0});
  for (double v : balance_residual(w)) EXPECT_EQ(v, 0.0);
  for (double v : balance_residual_raw(w)) EXPECT_EQ(v, 0.0);
}

TEST(BalanceResidual, ForwardDifferenceOfKnownSeries) {
  std::vector<BalanceSample> w;
  for (int n = 0; n < 5; ++n) {
    const double t = 0.5 * n;
    w.push_back({t, std::exp(-t), std::exp(-t), 0.0});
  }
  const auto r = balance_residual_raw(w);
  ASSERT_EQ(r.size(), 4u);
  for (std::size_t n = 0; n < r.size(); ++n)
    EXPECT_NEAR(r[n], (w[n + 1].E - w[n].E) / 0.5 + w[n].D, 1e-15);
  const auto rel = balance_residual(w);
  for (std::size_t n = 0; n < r.size(); ++n) EXPECT_NEAR(rel[n], std::fabs(r[n]) / 1.0, 1e-15);
}

TEST(BalanceResidual, NeedsThreeRecords) {
  std::vector<BalanceSample> w{{0.0, 1.0, 0.0, 0.0}, {0.1, 1.0, 0.0, 0.0}};
  EXPECT_THROW(balance_residual_raw(w), NumericalFailure);
}

TEST(BalanceResidual, EquilibriumSimulationRecordsNoImbalance) {
  const Grid g(17, 32, 3.0);
  PhysicalParams p;
  Geometry geo;
  geo.h1 = {0.0, 0.0};
  MarchConfig cfg;
  cfg.dt = 1e-2;
  cfg.T_final = 0.1;
  const RunOutcome out = run(p, geo, ControllerParams{}, g, cfg, make_initial(InitialKind::displaced_rest, p, geo, g));
  ASSERT_FALSE(out.abort.has_value());
  for (double v : balance_residual_raw(balance_samples(out.trajectory))) EXPECT_EQ(v, 0.0);
}

TEST(DiscreteNorms, ConstantField) {
  Rest r;
  const double c = 0.4;
  const Norms n = discrete_norms(r.diff, ScalarField(r.g.size(), c), r.map);
  const double expect = c * std::sqrt(8.0 * std::numbers::pi);
  EXPECT_NEAR(n.L2, expect, 1e-13);
  EXPECT_NEAR(n.H1, expect, 1e-12);
  EXPECT_NEAR(n.H2, expect, 1e-12);
}

TEST(DiscreteNorms, OrderedAndFrameInvariant) {
  Rest r;
  VectorField u(r.g.size());
  for (std::size_t k = 0; k < r.g.size(); ++k) {
    const Vec2 y = r.g.position(k);
    u.set(k, {std::sin(0.5 * y.x), std::cos(0.4 * y.y) * y.x});
  }
  const Norms a = discrete_norms(r.diff, u, Mat2::identity(), r.map);
  const Norms b = discrete_norms(r.diff, u, rotation(1.1), r.map);
  EXPECT_LT(a.L2, a.H1);
  EXPECT_LT(a.H1, a.H2);
  EXPECT_NEAR(a.L2, b.L2, 1e-12 * a.L2);
  EXPECT_NEAR(a.H1, b.H1, 1e-12 * a.H1);
  EXPECT_NEAR(a.H2, b.H2, 1e-12 * a.H2);
}
