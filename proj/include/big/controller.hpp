#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "big/algebra.hpp"

namespace big {

enum class Ramp { smoothstep, linear_capped };

inline Ramp parse_ramp(const std::string& s) {
  if (s == "smoothstep") return Ramp::smoothstep;
  if (s == "linear-capped") return Ramp::linear_capped;
  throw std::invalid_argument("unknown ramp profile '" + s + "'");
}

inline const char* to_string(Ramp r) { return r == Ramp::smoothstep ? "smoothstep" : "linear-capped"; }

struct ControllerParams {
  double k_d = 2.0;
  double T_I = 0.25;
  Ramp ramp = Ramp::smoothstep;
};

// linear-capped: k_p' is a trapezoid rising on [0, T/4], flat on [T/4, 3T/4],
// falling on [3T/4, T]; peak slope 4/(3T).
namespace detail {
inline double capped_value(double s) {
  constexpr double peak = 4.0 / 3.0;
  if (s <= 0.25) return peak * 2.0 * s * s;
  if (s <= 0.75) return peak * (0.125 + (s - 0.25));
  const double q = 1.0 - s;
  return 1.0 - peak * 2.0 * q * q;
}
inline double capped_slope(double s) {
  constexpr double peak = 4.0 / 3.0;
  if (s <= 0.25) return peak * 4.0 * s;
  if (s <= 0.75) return peak;
  return peak * 4.0 * (1.0 - s);
}
}  // namespace detail

inline double kp(double t, const ControllerParams& c) {
  if (t < 0.0) throw std::domain_error("kp: negative time");
  if (t >= c.T_I) return 1.0;
  const double s = t / c.T_I;
  if (c.ramp == Ramp::smoothstep) return s * s * (3.0 - 2.0 * s);
  return detail::capped_value(s);
}

inline double kp_prime(double t, const ControllerParams& c) {
  if (t < 0.0) throw std::domain_error("kp_prime: negative time");
  if (t >= c.T_I) return 0.0;
  const double s = t / c.T_I;
  if (c.ramp == Ramp::smoothstep) return 6.0 * s * (1.0 - s) / c.T_I;
  return detail::capped_slope(s) / c.T_I;
}

/// Closed-form supremum of k_p' over [0, T_I].
inline double kp_prime_sup(const ControllerParams& c) {
  return c.ramp == Ramp::smoothstep ? 1.5 / c.T_I : (4.0 / 3.0) / c.T_I;
}

struct ControllerCheck {
  std::vector<std::string> violations;
  bool slope_binding = false;  // the slope bound is the tightest satisfied clause

  bool ok() const { return violations.empty(); }
};

/// Ramp hypotheses: k_p(0)=0, 0 <= k_p <= 1, k_p = 1 after T_I, monotone C^1,
/// and sup k_p' < k_d / (2 T_I^2).
inline ControllerCheck validate(const ControllerParams& c) {
  ControllerCheck r;
  if (!(c.T_I > 0.0)) {
    r.violations.push_back("[ramp hypothesis] T_I must be positive (T_I = " + std::to_string(c.T_I) + ")");
    return r;
  }
  if (!(c.k_d >= 0.0))
    r.violations.push_back("[ramp hypothesis] k_d must be non-negative (k_d = " + std::to_string(c.k_d) + ")");
  // Profiles are fixed closed forms; these clauses hold by construction and
  // are checked here so a new profile cannot slip through.
  if (kp(0.0, c) != 0.0) r.violations.push_back("[ramp hypothesis] k_p(0) must be 0");
  if (kp(c.T_I, c) != 1.0) r.violations.push_back("[ramp hypothesis] k_p(T_I) must be 1");
  const double sup = kp_prime_sup(c);
  const double bound = c.k_d / (2.0 * c.T_I * c.T_I);
  if (!(sup < bound)) {
    r.violations.push_back("[ramp hypothesis] sup k_p' = " + std::to_string(sup) +
                           " must be < k_d/(2 T_I^2) = " + std::to_string(bound));
  } else {
    r.slope_binding = (bound - sup) < 0.1 * bound;
  }
  return r;
}

/// w = k_p(t) (h1 - h) - k_d ell.
inline Vec2 feedback_force(double t, const Vec2& h, const Vec2& h1, const Vec2& ell, const ControllerParams& c) {
  return kp(t, c) * (h1 - h) - c.k_d * ell;
}

/// Controller part of the transformed body force: -k_p Q^T h_tilde - k_d ell_tilde.
inline Vec2 feedback_lagrangian(double t, const Vec2& h_tilde, const Vec2& ell_tilde, const Mat2& Q,
                                const ControllerParams& c) {
  return kp(t, c) * (transpose(Q) * (-h_tilde)) - c.k_d * ell_tilde;
}

}  // namespace big
