#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "degenfd/error.hpp"

namespace degenfd {

/// Which phase receives theta2 in the transmission law.
///
/// PositiveGetsTheta2 follows the smoothed ramp used by the scheme's
/// stability argument (theta2 for t > eps). PositiveGetsTheta1 mirrors it,
/// assigning theta1 to {u > 0} as in the two-phase model statement.
enum class Orientation { PositiveGetsTheta2, PositiveGetsTheta1 };

struct ConstantExponent {
  double theta;
};

struct TransmissionExponent {
  double theta1;
  double theta2;
  double ramp_width;  // eps
  Orientation orientation = Orientation::PositiveGetsTheta2;
};

/// Exponent on the gradient factor, either fixed or solution-dependent.
class DegeneracyLaw {
 public:
  static constexpr double kMaxExponent = 16.0;
  /// Lipschitz constant of the unit smoothstep 3s^2 - 2s^3 on [0, 1].
  static constexpr double kRampSlope = 1.5;

  static DegeneracyLaw constant(double theta) { return DegeneracyLaw(ConstantExponent{theta}); }
  static DegeneracyLaw transmission(double theta1, double theta2, double eps,
                                    Orientation orientation = Orientation::PositiveGetsTheta2) {
    return DegeneracyLaw(TransmissionExponent{theta1, theta2, eps, orientation});
  }

  bool is_constant() const noexcept { return std::holds_alternative<ConstantExponent>(law_); }
  const std::variant<ConstantExponent, TransmissionExponent>& variant() const noexcept { return law_; }

  double min_exponent() const noexcept {
    return is_constant() ? std::get<ConstantExponent>(law_).theta : std::get<TransmissionExponent>(law_).theta1;
  }
  double max_exponent() const noexcept {
    return is_constant() ? std::get<ConstantExponent>(law_).theta : std::get<TransmissionExponent>(law_).theta2;
  }
  /// Lipschitz constant of t -> exponent(t); zero for a constant law.
  double lipschitz_in_t() const noexcept {
    if (is_constant()) return 0.0;
    const auto& tr = std::get<TransmissionExponent>(law_);
    return (tr.theta2 - tr.theta1) * kRampSlope / (2.0 * tr.ramp_width);
  }

  /// Same law with the transmission ramp rescaled to (-eps, eps).
  DegeneracyLaw with_ramp_width(double eps) const {
    if (is_constant()) return *this;
    auto tr = std::get<TransmissionExponent>(law_);
    tr.ramp_width = eps;
    return DegeneracyLaw(tr);
  }

  std::string describe() const {
    if (is_constant()) return "constant(" + std::to_string(min_exponent()) + ")";
    const auto& tr = std::get<TransmissionExponent>(law_);
    return "transmission(" + std::to_string(tr.theta1) + ", " + std::to_string(tr.theta2) + ", " +
           std::to_string(tr.ramp_width) + ")";
  }

  /// Constant: theta. Transmission (PositiveGetsTheta2): theta1 for t <= -eps,
  /// theta2 for t >= eps, and a C^1 cubic smoothstep in between with the
  /// midpoint (theta1 + theta2) / 2 at t = 0.
  double exponent(double t) const noexcept {
    if (const auto* c = std::get_if<ConstantExponent>(&law_)) return c->theta;
    const auto& tr = std::get<TransmissionExponent>(law_);
    if (tr.orientation == Orientation::PositiveGetsTheta1) t = -t;
    if (t <= -tr.ramp_width) return tr.theta1;
    if (t >= tr.ramp_width) return tr.theta2;
    const double s = (t + tr.ramp_width) / (2.0 * tr.ramp_width);
    const double ramp = s * s * (3.0 - 2.0 * s);
    return std::clamp(tr.theta1 + (tr.theta2 - tr.theta1) * ramp, tr.theta1, tr.theta2);
  }

 private:
  explicit DegeneracyLaw(std::variant<ConstantExponent, TransmissionExponent> law) : law_(law) { validate(); }

  void validate() const {
    if (const auto* c = std::get_if<ConstantExponent>(&law_)) {
      if (!(c->theta >= 1.0) || c->theta > kMaxExponent)
        throw InputError("constant degeneracy exponent must lie in [1, 16]");
      return;
    }
    const auto& tr = std::get<TransmissionExponent>(law_);
    if (!(tr.theta1 >= 1.0) || !(tr.theta1 < tr.theta2) || tr.theta2 > kMaxExponent)
      throw InputError("transmission exponents must satisfy 1 <= theta1 < theta2 <= 16");
    if (!(tr.ramp_width > 0.0) || !std::isfinite(tr.ramp_width))
      throw InputError("transmission ramp width must be positive");
  }

  std::variant<ConstantExponent, TransmissionExponent> law_;
};

inline double exponent(const DegeneracyLaw& law, double t) noexcept { return law.exponent(t); }

}  // namespace degenfd
