#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "voros/errors.hpp"

namespace voros {

using cplx = std::complex<double>;

/// Rotation angle alpha with omega = e^{i alpha}, and the unimodular phase
/// factor k = e^{i phi} of the generalized functional equation
///   k f(omega^2 x) + k^{-1} f(omega^{-2} x) = C(x) f(x).
class RotationParams {
public:
  /// alpha must lie strictly inside (0, pi/2).
  static RotationParams from_alpha(double alpha, double phase_offset = 0.0) {
    if (!(alpha > 0.0 && alpha < std::numbers::pi / 2))
      throw DomainError("rotation angle alpha=" + std::to_string(alpha) + " outside (0, pi/2)");
    if (!std::isfinite(phase_offset))
      throw DomainError("phase offset must be finite");
    return RotationParams(alpha, phase_offset);
  }

  /// Angle of the oscillator -y'' + (z^m + lambda) y = 0: alpha = 2 pi / (m + 2).
  static double alpha_for_exponent(double m) { return 2.0 * std::numbers::pi / (m + 2.0); }
  /// Inverse of alpha_for_exponent.
  static double exponent_for_alpha(double alpha) { return 2.0 * std::numbers::pi / alpha - 2.0; }

  double alpha() const noexcept { return alpha_; }
  double phase_offset() const noexcept { return phase_offset_; }
  /// Avila's parameter pi - 2 alpha, in (0, pi).
  double theta() const noexcept { return std::numbers::pi - 2.0 * alpha_; }

  cplx omega() const { return std::polar(1.0, alpha_); }
  cplx phase_factor() const { return std::polar(1.0, phase_offset_); }

  /// omega^n on the principal determination e^{i n alpha}; n may be fractional.
  cplx omega_pow(double n) const { return std::polar(1.0, n * alpha_); }
  /// k^n = e^{i n phi}.
  cplx k_pow(double n) const { return std::polar(1.0, n * phase_offset_); }

private:
  RotationParams(double alpha, double phase_offset) : alpha_(alpha), phase_offset_(phase_offset) {}

  double alpha_;
  double phase_offset_;
};

} // namespace voros
