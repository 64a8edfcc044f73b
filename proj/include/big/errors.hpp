#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace big {

/// Configuration or hypothesis violations. Carries every violated clause.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

enum class GuardKind { positivity, map_degenerate, geometry, distortion };

inline const char* to_string(GuardKind k) {
  switch (k) {
    case GuardKind::positivity: return "positivity";
    case GuardKind::map_degenerate: return "map-degenerate";
    case GuardKind::geometry: return "geometry";
    case GuardKind::distortion: return "map-distortion";
  }
  return "unknown";
}

/// A state left the region where the model is valid. Runs abort on this.
class GuardViolation : public std::runtime_error {
 public:
  GuardViolation(GuardKind kind, double value, double limit, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + " guard: " + detail),
        kind_(kind), value_(value), limit_(limit) {}

  GuardKind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }
  double limit() const noexcept { return limit_; }

 private:
  GuardKind kind_;
  double value_;
  double limit_;
};

enum class FailureKind { picard_nonconvergence, linear_solver, order_below_threshold, insufficient_data };

inline const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::picard_nonconvergence: return "picard-nonconvergence";
    case FailureKind::linear_solver: return "linear-solver";
    case FailureKind::order_below_threshold: return "order-below-threshold";
    case FailureKind::insufficient_data: return "insufficient-data";
  }
  return "unknown";
}

/// Numerical breakdown (solver did not reach its contract). `history` holds
/// the residual or successive-difference sequence that led to the failure.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(FailureKind kind, const std::string& detail, std::vector<double> history = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind), history_(std::move(history)) {}

  FailureKind kind() const noexcept { return kind_; }
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  FailureKind kind_;
  std::vector<double> history_;
};

}  // namespace big
