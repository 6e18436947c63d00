#pragma once

// Genus-zero real entire functions with positive zeros,
//
//   f(x) = prod_{j>=1} (1 - x / E_j),   0 < E_1 < E_2 < ...,
//
// stored as N explicit zeros plus an optional power-law model
// E_j = A (j + shift)^p of the zeros with index j > N.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "voros/errors.hpp"
#include "voros/rotation.hpp"

namespace voros {

/// Power-law model of the zeros beyond the stored list: E_j = A (j + shift)^p, j >= start_index.
struct ZeroTail {
  double amplitude = 1.0;
  double exponent = 2.0;
  double index_shift = 0.0;
  std::size_t start_index = 1;

  double zero(double j) const { return amplitude * std::pow(j + index_shift, exponent); }

  friend bool operator==(const ZeroTail&, const ZeroTail&) = default;
};

/// Absolute accuracy of the modeled-tail contribution to logs and phases.
/// Dominated by the quadrature tolerance of the Euler-Maclaurin remainder.
inline constexpr double kTailErrorBound = 1e-10;

namespace detail {

// log(1 + w) without cancellation for small |w| or w near -1.
inline cplx log1p(cplx w) {
  if (std::abs(w) > 0.5)
    return std::log(cplx(1.0 + w.real(), w.imag()));
  return {0.5 * std::log1p(2.0 * w.real() + std::norm(w)), std::atan2(w.imag(), 1.0 + w.real())};
}

// Boost 1.74 declares integrate() non-const; one rule per thread keeps the
// abscissa cache unshared.
inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule;
}

inline constexpr std::size_t kExplicitTailTerms = 256;

// Sum of term(E_j) over all modeled tail zeros. The first kExplicitTailTerms
// are summed directly; the remainder uses the midpoint Euler-Maclaurin formula
// about c = last - 1/2 with the integral mapped to u = E(c)/E in (0, 1].
// `term` must decay at least like 1/E.
template <class Value, class Term>
Value tail_sum(const ZeroTail& tail, Term&& term) {
  Value sum{};
  const std::size_t last = tail.start_index + kExplicitTailTerms;
  for (std::size_t j = tail.start_index; j < last; ++j)
    sum += term(tail.zero(static_cast<double>(j)));

  const double c = static_cast<double>(last) - 0.5;
  const double base = c + tail.index_shift;
  const double e_c = tail.zero(c);
  const double inv_p = 1.0 / tail.exponent;

  // dx = (base / p) u^{-1/p - 1} du; the factor term/u stays bounded as u -> 0.
  auto integrand = [&](double u) -> Value {
    if (u < 1e-250)
      return Value{};
    return (term(e_c / u) / u) * std::pow(u, -inv_p);
  };
  const Value integral = tanh_sinh_rule().integrate(integrand, 0.0, 1.0, 1e-12) * (base * inv_p);

  auto h = [&](double x) { return term(tail.zero(x)); };
  const Value d1 = (h(c - 2.0) - 8.0 * h(c - 1.0) + 8.0 * h(c + 1.0) - h(c + 2.0)) / 12.0;
  const Value d3 = (h(c + 2.0) - 2.0 * h(c + 1.0) + 2.0 * h(c - 1.0) - h(c - 2.0)) / 2.0;
  return sum + integral + d1 / 24.0 - 7.0 * d3 / 5760.0;
}

} // namespace detail

/// Immutable genus-zero product. Build with make_product().
class EntireProduct {
public:
  /// The empty product, f == 1.
  EntireProduct() = default;

  const std::vector<double>& zeros() const noexcept { return zeros_; }
  const std::optional<ZeroTail>& tail() const noexcept { return tail_; }
  std::size_t size() const noexcept { return zeros_.size(); }

  /// E_j for 1-based j, reading the tail model past the stored list.
  double zero(std::size_t j) const {
    if (j >= 1 && j <= zeros_.size())
      return zeros_[j - 1];
    if (tail_ && j >= tail_->start_index)
      return tail_->zero(static_cast<double>(j));
    throw DomainError("zero index " + std::to_string(j) + " not covered by the product");
  }

private:
  friend EntireProduct make_product(std::vector<double> zeros, std::optional<ZeroTail> tail);

  EntireProduct(std::vector<double> zeros, std::optional<ZeroTail> tail)
      : zeros_(std::move(zeros)), tail_(std::move(tail)) {}

  std::vector<double> zeros_;
  std::optional<ZeroTail> tail_;
};

/// Validates and builds a product. Zeros must be positive and strictly
/// increasing; a tail must start at index N+1 with its first modeled zero
/// above the last stored one.
inline EntireProduct make_product(std::vector<double> zeros, std::optional<ZeroTail> tail = std::nullopt) {
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (!std::isfinite(zeros[i]) || zeros[i] <= 0.0)
      throw ValidationError("zeros must be positive and finite", i + 1);
    if (i > 0 && !(zeros[i] > zeros[i - 1]))
      throw ValidationError("zeros must be strictly increasing", i + 1);
  }
  if (tail) {
    const std::size_t first = zeros.size() + 1;
    if (!(tail->amplitude > 0.0) || !std::isfinite(tail->amplitude))
      throw ValidationError("tail amplitude must be positive", first);
    if (!(tail->exponent > 1.0) || !std::isfinite(tail->exponent))
      throw ValidationError("tail exponent must exceed 1", first);
    if (tail->start_index != first)
      throw ValidationError("tail must start right after the stored zeros", first);
    if (!(static_cast<double>(first) + tail->index_shift > 0.0))
      throw ValidationError("tail index shift makes the first modeled zero non-positive", first);
    if (!zeros.empty() && !(tail->zero(static_cast<double>(first)) > zeros.back()))
      throw ValidationError("first modeled tail zero does not exceed the last stored zero", first);
  }
  return EntireProduct(std::move(zeros), std::move(tail));
}

/// Principal-branch sum of log(1 - x/E_j) over all zeros (stored and modeled).
/// Returns -inf real part when x is exactly a stored zero.
inline cplx log_eval(const EntireProduct& f, cplx x) {
  cplx sum{};
  for (double e : f.zeros()) {
    const cplx w = -x / e;
    if (w == cplx(-1.0, 0.0))
      return {-std::numeric_limits<double>::infinity(), 0.0};
    sum += detail::log1p(w);
  }
  if (const auto& tail = f.tail())
    sum += detail::tail_sum<cplx>(*tail, [x](double e) { return detail::log1p(-x / e); });
  return sum;
}

/// f(x). Factors within 1e-14 of zero are multiplied directly rather than
/// through the log sum; the result is exactly 0 iff x is a stored zero.
inline cplx eval(const EntireProduct& f, cplx x) {
  cplx log_sum{};
  cplx small = 1.0;
  for (double e : f.zeros()) {
    const cplx w = -x / e;
    const cplx factor = 1.0 + w;
    if (std::abs(factor) < 1e-14)
      small *= factor;
    else
      log_sum += detail::log1p(w);
  }
  if (small == 0.0)
    return 0.0;
  if (const auto& tail = f.tail())
    log_sum += detail::tail_sum<cplx>(*tail, [x](double e) { return detail::log1p(-x / e); });
  constexpr double kMaxLog = 709.0;
  if (log_sum.real() > kMaxLog)
    throw RangeError("product overflows binary64", log_sum.real() / std::numbers::ln10);
  return std::exp(log_sum) * small;
}

/// f'(x) = G(x) [ -1/E_i + (1 - x/E_i) sum_{j != i} 1/(x - E_j) ], with E_i the
/// nearest stored zero and G = f / (1 - x/E_i); stable at and near E_i.
inline cplx eval_derivative(const EntireProduct& f, cplx x) {
  cplx tail_log_derivative{};
  if (const auto& tail = f.tail())
    tail_log_derivative = detail::tail_sum<cplx>(*tail, [x](double e) { return 1.0 / (x - e); });

  const auto& zs = f.zeros();
  if (zs.empty())
    return eval(f, x) * tail_log_derivative;

  std::size_t nearest = 0;
  for (std::size_t i = 1; i < zs.size(); ++i)
    if (std::abs(x - zs[i]) < std::abs(x - zs[nearest]))
      nearest = i;

  cplx log_g{};
  cplx log_derivative_g = tail_log_derivative;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (i == nearest)
      continue;
    log_g += detail::log1p(-x / zs[i]);
    log_derivative_g += 1.0 / (x - zs[i]);
  }
  if (const auto& tail = f.tail())
    log_g += detail::tail_sum<cplx>(*tail, [x](double e) { return detail::log1p(-x / e); });
  if (log_g.real() > 709.0)
    throw RangeError("product derivative overflows binary64", log_g.real() / std::numbers::ln10);

  const double ei = zs[nearest];
  return std::exp(log_g) * (-1.0 / ei + (1.0 - x / ei) * log_derivative_g);
}

namespace detail {

// arg(1 - (t/E) e^{-2i alpha}) in (0, pi - 2 alpha) for t > 0.
inline double ray_phase_term(double t, double e, double sin2a, double cos2a) {
  const double x = t / e;
  return std::atan2(x * sin2a, 1.0 - x * cos2a);
}

inline double ray_phase_slope(double t, double e, double sin2a, double cos2a) {
  const double x = t / e;
  const double re = 1.0 - x * cos2a;
  const double im = x * sin2a;
  return sin2a / (e * (re * re + im * im));
}

} // namespace detail

/// Continuous argument of f(omega^{-2} t) for t >= 0: zero at t = 0 and
/// strictly increasing, each factor contributing a value in (0, pi).
inline double phase_on_ray(const EntireProduct& f, const RotationParams& rot, double t) {
  if (t <= 0.0)
    return 0.0;
  const double sin2a = std::sin(2.0 * rot.alpha());
  const double cos2a = std::cos(2.0 * rot.alpha());
  double sum = 0.0;
  for (double e : f.zeros())
    sum += detail::ray_phase_term(t, e, sin2a, cos2a);
  if (const auto& tail = f.tail())
    sum += detail::tail_sum<double>(*tail, [&](double e) { return detail::ray_phase_term(t, e, sin2a, cos2a); });
  return sum;
}

/// d/dt of phase_on_ray; strictly positive.
inline double phase_derivative(const EntireProduct& f, const RotationParams& rot, double t) {
  const double sin2a = std::sin(2.0 * rot.alpha());
  const double cos2a = std::cos(2.0 * rot.alpha());
  double sum = 0.0;
  for (double e : f.zeros())
    sum += detail::ray_phase_slope(t, e, sin2a, cos2a);
  if (const auto& tail = f.tail())
    sum += detail::tail_sum<double>(*tail, [&](double e) { return detail::ray_phase_slope(t, e, sin2a, cos2a); });
  return sum;
}

/// |f(r e^{i theta})|; even and 2 pi periodic in theta, nondecreasing on (0, pi).
inline double modulus_profile(const EntireProduct& f, double r, double theta) {
  return std::abs(eval(f, std::polar(r, theta)));
}

/// Least-squares fit of log E_j = log A + p log(j + shift) over the trailing
/// `window` zeros (Gauss-Newton in (log A, p, shift)). The returned tail
/// starts at index N+1.
inline ZeroTail fit_tail(std::span<const double> zeros, std::size_t window) {
  const std::size_t n = zeros.size();
  if (window < 3 || window > n)
    throw FitError("tail fit window must be in [3, " + std::to_string(n) + "], got " + std::to_string(window));
  const std::size_t first = n - window; // 0-based
  for (std::size_t i = first + 1; i < n; ++i)
    if (!(zeros[i] > zeros[i - 1]) || !(zeros[i - 1] > 0.0))
      throw FitError("tail fit data not positive and increasing at index " + std::to_string(i + 1));

  Eigen::VectorXd log_e(window);
  for (std::size_t i = 0; i < window; ++i)
    log_e[i] = std::log(zeros[first + i]);
  const double j_min = static_cast<double>(first + 1);

  auto residuals = [&](const Eigen::Vector3d& params) {
    Eigen::VectorXd r(window);
    for (std::size_t i = 0; i < window; ++i)
      r[i] = params[0] + params[1] * std::log(j_min + i + params[2]) - log_e[i];
    return r;
  };

  // Start from the shift-free linear fit.
  Eigen::Vector3d params;
  {
    Eigen::MatrixXd design(window, 2);
    for (std::size_t i = 0; i < window; ++i) {
      design(i, 0) = 1.0;
      design(i, 1) = std::log(j_min + i);
    }
    const Eigen::Vector2d linear = design.colPivHouseholderQr().solve(log_e);
    params << linear[0], linear[1], 0.0;
  }

  double damping = 1e-12;
  double cost = residuals(params).squaredNorm();
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd jac(window, 3);
    for (std::size_t i = 0; i < window; ++i) {
      const double x = j_min + i + params[2];
      jac(i, 0) = 1.0;
      jac(i, 1) = std::log(x);
      jac(i, 2) = params[1] / x;
    }
    const Eigen::VectorXd r = residuals(params);
    Eigen::Matrix3d normal = jac.transpose() * jac;
    const Eigen::Vector3d grad = jac.transpose() * r;
    bool accepted = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::Matrix3d damped = normal;
      damped.diagonal() *= 1.0 + damping;
      step = damped.ldlt().solve(-grad);
      Eigen::Vector3d trial = params + step;
      if (j_min + trial[2] <= 1e-3) {
        damping *= 10.0;
        continue;
      }
      const double trial_cost = residuals(trial).squaredNorm();
      if (trial_cost <= cost) {
        params = trial;
        cost = trial_cost;
        damping = std::max(damping / 10.0, 1e-15);
        accepted = true;
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted || step.norm() < 1e-15 * (1.0 + params.norm()))
      break;
  }

  ZeroTail tail{std::exp(params[0]), params[1], params[2], n + 1};
  if (!(tail.exponent > 1.0) || !std::isfinite(tail.exponent))
    throw FitError("fitted tail exponent " + std::to_string(tail.exponent) + " does not exceed 1");
  const double last = zeros[n - 1];
  if (std::abs(tail.zero(static_cast<double>(n)) - last) > 0.01 * last)
    throw FitError("fitted tail misses the last stored zero by more than 1%");
  if (!(tail.zero(static_cast<double>(n + 1)) > last))
    throw FitError("fitted tail is not increasing past the last stored zero");
  return tail;
}

/// Tail with the amplitude and exponent held fixed; only the index shift is
/// fitted, as the window mean of (E_j / A)^{1/p} - j.
inline ZeroTail fit_tail_shift(std::span<const double> zeros, double amplitude, double exponent, std::size_t window) {
  const std::size_t n = zeros.size();
  if (window < 1 || window > n)
    throw FitError("tail fit window must be in [1, " + std::to_string(n) + "], got " + std::to_string(window));
  if (!(amplitude > 0.0) || !(exponent > 1.0))
    throw FitError("tail amplitude must be positive and exponent above 1");
  double shift = 0.0;
  for (std::size_t i = n - window; i < n; ++i) {
    if (!(zeros[i] > 0.0))
      throw FitError("tail fit data not positive at index " + std::to_string(i + 1));
    shift += std::pow(zeros[i] / amplitude, 1.0 / exponent) - static_cast<double>(i + 1);
  }
  shift /= static_cast<double>(window);
  ZeroTail tail{amplitude, exponent, shift, n + 1};
  if (!(static_cast<double>(n + 1) + shift > 0.0) || !(tail.zero(static_cast<double>(n + 1)) > zeros[n - 1]))
    throw FitError("pinned tail is not increasing past the last stored zero");
  return tail;
}

} // namespace voros
