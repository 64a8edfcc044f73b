#pragma once

// One pass of the frozen-coefficient linear system: body ODEs, then the
// parabolic Lame step with strong Dirichlet data, then the density update.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "big/algebra.hpp"
#include "big/errors.hpp"
#include "big/model_core.hpp"
#include "big/polar_diff.hpp"

namespace big {

struct CascadeRHS {
  ScalarField f1;
  VectorField f2;
  Vec2 f3;
  double f4 = 0.0;

  CascadeRHS(ScalarField a, VectorField b, Vec2 c, double d)
      : f1(std::move(a)), f2(std::move(b)), f3(c), f4(d) {
    auto finite = [](double v) { return std::isfinite(v); };
    bool ok = finite(f3.x) && finite(f3.y) && finite(f4);
    for (double v : f1) ok = ok && finite(v);
    for (std::size_t k = 0; k < f2.size(); ++k) ok = ok && finite(f2.x[k]) && finite(f2.y[k]);
    if (!ok) throw std::invalid_argument("CascadeRHS: non-finite forcing");
  }
};

struct BodyVelocity {
  Vec2 ell;
  double omega = 0.0;
};

/// Trapezoidal step of m ell' = f3, J omega' = f4. Pass the same forcing
/// twice for a one-level step.
inline BodyVelocity solve_body(const Vec2& ell_prev, double omega_prev, const Vec2& f3_prev, double f4_prev,
                               const Vec2& f3_next, double f4_next, double dt, double m, double J) {
  if (!(m > 0.0) || !(J > 0.0)) throw std::invalid_argument("solve_body: m and J must be positive");
  return {ell_prev + (0.5 * dt / m) * (f3_prev + f3_next), omega_prev + 0.5 * dt / J * (f4_prev + f4_next)};
}

inline BodyVelocity solve_body(const Vec2& ell_prev, double omega_prev, const Vec2& f3, double f4, double dt,
                               double m, double J) {
  return solve_body(ell_prev, omega_prev, f3, f4, f3, f4, dt, m, J);
}

// ---------------------------------------------------------------------------
// Lifting of rigid boundary data

/// C^2 cutoff: 1 for r <= r1, 0 for r >= r2, quintic smoothstep between.
inline double cutoff(double r, double r1, double r2) {
  if (r <= r1) return 1.0;
  if (r >= r2) return 0.0;
  const double s = (r - r1) / (r2 - r1);
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

inline double lifting_cutoff(double r, double container_radius) {
  const double span = container_radius - 1.0;
  return cutoff(r, 1.0 + 0.25 * span, 1.0 + 0.75 * span);
}

/// chi(|y|) (a + b x y) on the grid.
inline VectorField lifting(const Grid& g, const Vec2& a, double b) {
  VectorField out(g.size());
  for (int i = 0; i < g.nr(); ++i) {
    const double chi = i == 0 ? 1.0 : (i == g.nr() - 1 ? 0.0 : lifting_cutoff(g.r(i), g.container_radius()));
    for (int j = 0; j < g.nt(); ++j) out.set(g.index(i, j), chi * (a + cross(b, g.position(i, j))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lame operator

/// (mu Lap u + (lambda+mu) grad div u) / rho0 at node k.
inline Vec2 lame_apply(const PolarDiff& diff, const VectorField& u, std::size_t k, double rho0, double mu,
                       double lambda) {
  const Deriv2 a = diff.at(u.x, k), b = diff.at(u.y, k);
  const double lm = lambda + mu;
  return {(mu * a.laplacian() + lm * (a.fxx + b.fxy)) / rho0, (mu * b.laplacian() + lm * (a.fxy + b.fyy)) / rho0};
}

inline double divergence(const PolarDiff& diff, const VectorField& u, std::size_t k) {
  return diff.grad(u.x, k).x + diff.grad(u.y, k).y;
}

enum class TimeScheme { implicit_euler, crank_nicolson, steady };

/// Rigid data on r = 1, zero on r = R, interior copied from `u`.
inline VectorField with_boundary(const Grid& g, VectorField u, const Vec2& ell, double omega) {
  for (int j = 0; j < g.nt(); ++j) {
    u.set(g.index(0, j), ell + cross(omega, g.position(0, j)));
    u.set(g.index(g.nr() - 1, j), Vec2{});
  }
  return u;
}

/// Factorizes  mass*u - theta*L u  on interior nodes once; each call solves
/// with new data. L carries the spatially varying coefficient 1/rho0.
class LameSolver {
 public:
  LameSolver(const PolarDiff& diff, const ScalarField& rho0, double mu, double lambda, double dt,
             TimeScheme scheme)
      : diff_(&diff), rho0_(rho0), mu_(mu), lambda_(lambda), dt_(dt), scheme_(scheme) {
    const Grid& g = diff.grid();
    if (g.nr() < 4) throw std::invalid_argument("LameSolver: need at least 4 rings");
    nint_ = static_cast<std::size_t>(g.nr() - 2) * g.nt();
    mass_ = scheme == TimeScheme::steady ? 0.0 : 1.0 / dt;
    theta_ = scheme == TimeScheme::crank_nicolson ? 0.5 : 1.0;
    assemble();
  }

  TimeScheme scheme() const { return scheme_; }
  double dt() const { return dt_; }
  double last_residual() const { return last_residual_; }

  /// Advances u_prev with source f2 and boundary data (ell, omega) at the
  /// new level. For the steady scheme u_prev is ignored and -L u = f2 is solved.
  VectorField step(const VectorField& u_prev, const VectorField& f2, const Vec2& ell, double omega) const {
    const Grid& g = diff_->grid();
    VectorField ub = with_boundary(g, VectorField(g.size()), ell, omega);
    Eigen::VectorXd rhs(2 * nint_);
    for (int i = 1; i < g.nr() - 1; ++i)
      for (int j = 0; j < g.nt(); ++j) {
        const std::size_t k = g.index(i, j);
        const std::size_t row = 2 * unknown(i, j);
        Vec2 r = f2.at(k);
        if (scheme_ != TimeScheme::steady) r += mass_ * u_prev.at(k);
        if (scheme_ == TimeScheme::crank_nicolson)
          r += (1.0 - theta_) * lame_apply(*diff_, u_prev, k, rho0_[k], mu_, lambda_);
        rhs[row] = r.x;
        rhs[row + 1] = r.y;
      }
    Eigen::VectorXd bvals(2 * boundary_nodes_.size());
    for (std::size_t q = 0; q < boundary_nodes_.size(); ++q) {
      bvals[2 * q] = ub.x[boundary_nodes_[q]];
      bvals[2 * q + 1] = ub.y[boundary_nodes_[q]];
    }
    rhs -= B_ * bvals;

    Eigen::VectorXd x = lu_->solve(rhs);
    const double bn = std::fmax(rhs.norm(), 1e-300);
    std::vector<double> history;
    double res = (A_ * x - rhs).norm() / bn;
    history.push_back(res);
    for (int pass = 0; pass < 3 && res > 1e-10; ++pass) {
      x += lu_->solve(rhs - A_ * x);
      res = (A_ * x - rhs).norm() / bn;
      history.push_back(res);
    }
    last_residual_ = rhs.norm() == 0.0 ? 0.0 : res;
    if (res > 1e-10 && rhs.norm() != 0.0)
      throw NumericalFailure(FailureKind::linear_solver, "Lame solve relative residual " + std::to_string(res),
                             history);

    VectorField out = ub;
    for (int i = 1; i < g.nr() - 1; ++i)
      for (int j = 0; j < g.nt(); ++j) {
        const std::size_t row = 2 * unknown(i, j);
        out.set(g.index(i, j), {x[row], x[row + 1]});
      }
    return out;
  }

 private:
  std::size_t unknown(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * diff_->grid().nt() + j;
  }

  void assemble() {
    const Grid& g = diff_->grid();
    std::vector<std::size_t> bindex(g.size(), 0);
    for (int j = 0; j < g.nt(); ++j) {
      bindex[g.index(0, j)] = boundary_nodes_.size();
      boundary_nodes_.push_back(g.index(0, j));
    }
    for (int j = 0; j < g.nt(); ++j) {
      bindex[g.index(g.nr() - 1, j)] = boundary_nodes_.size();
      boundary_nodes_.push_back(g.index(g.nr() - 1, j));
    }

    using T = Eigen::Triplet<double>;
    std::vector<T> ta, tb;
    const double lm = lambda_ + mu_;
    for (int i = 1; i < g.nr() - 1; ++i)
      for (int j = 0; j < g.nt(); ++j) {
        const std::size_t k = g.index(i, j);
        const auto row = static_cast<Eigen::Index>(2 * unknown(i, j));
        const double s = theta_ / rho0_[k];
        ta.emplace_back(row, row, mass_);
        ta.emplace_back(row + 1, row + 1, mass_);
        for (const auto& e : diff_->stencil(k)) {
          // rows: x-component  -s[mu(uxx+uyy) + lm(uxx + vxy)]
          //       y-component  -s[mu(vxx+vyy) + lm(uxy + vyy)]
          const double wxx = e.w[2], wxy = e.w[3], wyy = e.w[4];
          const double axu = -s * (mu_ * (wxx + wyy) + lm * wxx);
          const double axv = -s * lm * wxy;
          const double ayu = -s * lm * wxy;
          const double ayv = -s * (mu_ * (wxx + wyy) + lm * wyy);
          const int ie = g.ring(e.node);
          auto& dst = (ie == 0 || ie == g.nr() - 1) ? tb : ta;
          const auto col = static_cast<Eigen::Index>(
              2 * ((ie == 0 || ie == g.nr() - 1) ? bindex[e.node] : unknown(ie, g.spoke(e.node))));
          dst.emplace_back(row, col, axu);
          dst.emplace_back(row, col + 1, axv);
          dst.emplace_back(row + 1, col, ayu);
          dst.emplace_back(row + 1, col + 1, ayv);
        }
      }
    A_.resize(static_cast<Eigen::Index>(2 * nint_), static_cast<Eigen::Index>(2 * nint_));
    A_.setFromTriplets(ta.begin(), ta.end());
    A_.makeCompressed();
    B_.resize(static_cast<Eigen::Index>(2 * nint_), static_cast<Eigen::Index>(2 * boundary_nodes_.size()));
    B_.setFromTriplets(tb.begin(), tb.end());
    B_.makeCompressed();

    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
    lu_->analyzePattern(A_);
    lu_->factorize(A_);
    if (lu_->info() != Eigen::Success)
      throw NumericalFailure(FailureKind::linear_solver, "Lame factorization failed: " + lu_->lastErrorMessage());
  }

  const PolarDiff* diff_;
  ScalarField rho0_;
  double mu_, lambda_, dt_;
  TimeScheme scheme_;
  double mass_ = 0.0, theta_ = 1.0;
  std::size_t nint_ = 0;
  std::vector<std::size_t> boundary_nodes_;
  Eigen::SparseMatrix<double> A_, B_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
  mutable double last_residual_ = 0.0;
};

// ---------------------------------------------------------------------------
// Density

/// rho_next = rho_prev + dt/2 [(f1 - rho0 div u)_prev + (f1 - rho0 div u)_next].
inline ScalarField density_step(const PolarDiff& diff, const ScalarField& rho_prev, const VectorField& u_prev,
                                const ScalarField& f1_prev, const VectorField& u_next, const ScalarField& f1_next,
                                const ScalarField& rho0, double rho_bar, double dt) {
  const Grid& g = diff.grid();
  ScalarField out(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = f1_prev[k] - rho0[k] * divergence(diff, u_prev, k);
    const double b = f1_next[k] - rho0[k] * divergence(diff, u_next, k);
    out[k] = rho_prev[k] + 0.5 * dt * (a + b);
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!(out[k] + rho_bar > 0.0))
      throw GuardViolation(GuardKind::positivity, out[k] + rho_bar, 0.0,
                           "density " + std::to_string(out[k] + rho_bar) + " at node " + std::to_string(k));
  return out;
}

}  // namespace big
