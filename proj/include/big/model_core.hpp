#pragma once

// Physical constants, the reference annulus grid, field containers and the
// constitutive relations of the barotropic fluid.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "big/algebra.hpp"
#include "big/errors.hpp"

namespace big {

struct PhysicalParams {
  double a = 1.0;         // pressure coefficient
  double gamma = 2.0;     // adiabatic exponent
  double mu = 0.1;        // shear viscosity
  double lambda = 0.0;    // second viscosity
  double rho_bar = 1.0;   // mean density
  double rho_body = 1.0;  // body density
  int dim = 2;

  /// Every violated hypothesis, empty when valid.
  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (!(gamma > 1.5))
      v.push_back("[adiabatic] gamma must exceed 3/2 (gamma = " + std::to_string(gamma) + ")");
    if (!(mu > 0.0)) v.push_back("[viscosity] mu must be positive (mu = " + std::to_string(mu) + ")");
    if (!(lambda + mu >= 0.0))
      v.push_back("[viscosity] lambda + mu must be non-negative (lambda + mu = " + std::to_string(lambda + mu) + ")");
    if (!(a > 0.0)) v.push_back("[constitutive] a must be positive");
    if (!(rho_bar > 0.0)) v.push_back("[mean density] rho_bar must be positive");
    if (!(rho_body > 0.0)) v.push_back("[body] rho_body must be positive");
    if (dim != 2 && dim != 3) v.push_back("[body] dim must be 2 or 3");
    return v;
  }
};

/// Container is the disk of radius `container_radius` centred at the origin.
/// The body has radius 1 and starts at the centre.
struct Geometry {
  double container_radius = 3.0;
  Vec2 h1{0.05, 0.0};  // target centre
  double eta = 0.1;    // no-contact margin

  Vec2 center() const { return {0.0, 0.0}; }

  std::vector<std::string> violations() const {
    std::vector<std::string> v;
    if (!(container_radius > 2.0)) v.push_back("[geometry] container radius must exceed 2");
    if (!(eta > 0.0)) v.push_back("[geometry] eta must be positive");
    const double reach = container_radius - 1.0 - eta;
    if (!(norm(h1 - center()) < reach))
      v.push_back("[geometry] target h1 must satisfy |h1 - center| < R - 1 - eta (|h1| = " +
                  std::to_string(norm(h1 - center())) + ", limit " + std::to_string(reach) + ")");
    return v;
  }
};

/// Polar nodes r_i = 1 + i dr (i < nr), theta_j = j dtheta (periodic).
/// Flat index i * nt + j: radius outer, angle inner.
class Grid {
 public:
  Grid(int nr, int nt, double container_radius)
      : nr_(nr), nt_(nt), radius_(container_radius) {
    if (nr < 4 || nt < 8) throw std::invalid_argument("grid too small (need nr >= 4, nt >= 8)");
    if (!(container_radius > 1.0)) throw std::invalid_argument("container radius must exceed body radius");
    dr_ = (radius_ - 1.0) / (nr_ - 1);
    dth_ = 2.0 * std::numbers::pi / nt_;
    cos_.resize(nt_);
    sin_.resize(nt_);
    for (int j = 0; j < nt_; ++j) {
      cos_[j] = std::cos(j * dth_);
      sin_[j] = std::sin(j * dth_);
    }
  }

  int nr() const { return nr_; }
  int nt() const { return nt_; }
  std::size_t size() const { return static_cast<std::size_t>(nr_) * nt_; }
  double container_radius() const { return radius_; }
  double dr() const { return dr_; }
  double dtheta() const { return dth_; }

  std::size_t index(int i, int j) const {
    j %= nt_;
    if (j < 0) j += nt_;
    return static_cast<std::size_t>(i) * nt_ + j;
  }
  int ring(std::size_t k) const { return static_cast<int>(k / nt_); }
  int spoke(std::size_t k) const { return static_cast<int>(k % nt_); }

  double r(int i) const { return i == nr_ - 1 ? radius_ : 1.0 + i * dr_; }
  double cos_theta(int j) const { return cos_[j]; }
  double sin_theta(int j) const { return sin_[j]; }

  /// Reference position y - h0 of node (i, j).
  Vec2 position(int i, int j) const { return {r(i) * cos_[j], r(i) * sin_[j]}; }
  Vec2 position(std::size_t k) const { return position(ring(k), spoke(k)); }

  bool on_inner(std::size_t k) const { return ring(k) == 0; }
  bool on_outer(std::size_t k) const { return ring(k) == nr_ - 1; }
  bool on_boundary(std::size_t k) const { return on_inner(k) || on_outer(k); }

  /// Trapezoidal in r, rectangle in theta, with the polar Jacobian r.
  double weight(int i) const {
    const double c = (i == 0 || i == nr_ - 1) ? 0.5 : 1.0;
    return c * dr_ * dth_ * r(i);
  }
  double weight(std::size_t k) const { return weight(ring(k)); }

 private:
  int nr_, nt_;
  double radius_;
  double dr_ = 0.0, dth_ = 0.0;
  std::vector<double> cos_, sin_;
};

using ScalarField = std::vector<double>;

/// Cartesian components sampled at polar nodes.
struct VectorField {
  std::vector<double> x, y;

  VectorField() = default;
  explicit VectorField(std::size_t n) : x(n, 0.0), y(n, 0.0) {}

  std::size_t size() const { return x.size(); }
  Vec2 at(std::size_t k) const { return {x[k], y[k]}; }
  void set(std::size_t k, const Vec2& v) { x[k] = v.x; y[k] = v.y; }
};

struct FluidState {
  ScalarField rho_tilde;  // rho(X) - rho_bar
  VectorField u_tilde;    // Q^T u(X)
  double t = 0.0;
};

struct BodyState {
  Vec2 h_tilde;        // h - h1
  Vec2 ell_tilde;      // Q^T ell
  double omega_tilde = 0.0;
  double angle = 0.0;  // Q = rotation(angle)

  Mat2 Q() const { return rotation(angle); }
};

// ---------------------------------------------------------------------------
// Constitutive relations

inline double pressure(double rho, const PhysicalParams& p) {
  if (rho < 0.0) throw std::domain_error("pressure: negative density");
  return p.a * std::pow(rho, p.gamma);
}

/// sigma = 2 mu D(u) + lambda div(u) I - p I.
template <std::size_t Dim>
MatN<Dim> stress(const MatN<Dim>& grad_u, double p, const PhysicalParams& params) {
  const double div = trace(grad_u);
  MatN<Dim> s{};
  for (std::size_t i = 0; i < Dim; ++i)
    for (std::size_t j = 0; j < Dim; ++j) s[i][j] = params.mu * (grad_u[i][j] + grad_u[j][i]);
  for (std::size_t i = 0; i < Dim; ++i) s[i][i] += params.lambda * div - p;
  return s;
}

inline Mat2 stress(const Mat2& grad_u, double p, const PhysicalParams& params) {
  const double div = trace(grad_u);
  Mat2 s = params.mu * (grad_u + transpose(grad_u));
  s(0, 0) += params.lambda * div - p;
  s(1, 1) += params.lambda * div - p;
  return s;
}

struct MassInertia {
  double m;
  double J;  // scalar moment (2D) or the diagonal entry of J (3D)
};

/// Unit ball (3D) or unit disk (2D) of density rho_body.
inline MassInertia body_mass_inertia(const PhysicalParams& p) {
  using std::numbers::pi;
  if (p.dim == 3) {
    const double m = 4.0 / 3.0 * pi * p.rho_body;
    return {m, 2.0 * m / 5.0};
  }
  if (p.dim == 2) {
    const double m = pi * p.rho_body;
    return {m, m / 2.0};
  }
  throw std::invalid_argument("body_mass_inertia: dim must be 2 or 3");
}

// ---------------------------------------------------------------------------
// Integral quantities

/// Quadrature of f * weight over the reference annulus.
inline double integrate(const Grid& g, std::span<const double> f) {
  double s = 0.0;
  for (int i = 0; i < g.nr(); ++i) {
    double row = 0.0;
    for (int j = 0; j < g.nt(); ++j) row += f[g.index(i, j)];
    s += g.weight(i) * row;
  }
  return s;
}

/// Physical-frame mass: sum of (rho_tilde + rho_bar) det(grad X) over F(0).
inline double total_mass(const Grid& g, std::span<const double> rho_tilde, double rho_bar,
                         std::span<const double> det_grad_x) {
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!(det_grad_x[k] > 0.0))
      throw GuardViolation(GuardKind::map_degenerate, det_grad_x[k], 0.0,
                           "non-positive Jacobian in mass quadrature at node " + std::to_string(k));
    f[k] = (rho_tilde[k] + rho_bar) * det_grad_x[k];
  }
  return integrate(g, f);
}

inline double annulus_area(const Grid& g) {
  std::vector<double> one(g.size(), 1.0);
  return integrate(g, one);
}

inline double mean_density(const Grid& g, std::span<const double> rho0) {
  return integrate(g, rho0) / annulus_area(g);
}

}  // namespace big
