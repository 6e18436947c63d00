#pragma once

// Independent ground truth from the oscillator
//
//   -y'' + (z^m + lambda) y = 0                                  (l = 1)
//
// Solutions are parametrized in the paper convention `lambda`; the rotated
// family y_k(z, lambda) = omega^{k/2} y_0(omega^{-k} z, omega^{2k} lambda)
// with omega = exp(2 pi i / (m + 2)) solves the l = 1 equation for integer k
// and -y'' + (-z^m + lambda) y = 0 (l = 2) for half-odd k.
//
// Sign convention: the internal spectral variable is s = -lambda. The
// spectral determinant F(s) = y_0(0, -s) / y_0(0, 0) then has positive zeros
// (the half-line Dirichlet spectrum), matching the normalization of
// EntireProduct. Stokes multipliers C0, D0 and the PT spectra are reported in
// the paper convention, where PT eigenvalues are positive.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/numeric/odeint.hpp>

#include "voros/errors.hpp"
#include "voros/roots.hpp"
#include "voros/rotation.hpp"

namespace voros {

/// The eigenvalue problem -w'' + (-1)^l (iz)^m w = lambda w with its decay rays.
class ODEProblem {
public:
  static ODEProblem make(double m, int ell = 1) {
    if (!std::isfinite(m) || m < 2.0)
      throw DomainError("oscillator exponent m=" + std::to_string(m) + " must be >= 2");
    if (ell != 1 && ell != 2)
      throw DomainError("index l must be 1 or 2, got " + std::to_string(ell));
    return ODEProblem(m, ell);
  }

  double m() const noexcept { return m_; }
  int ell() const noexcept { return ell_; }
  ODEProblem with_ell(int ell) const { return make(m_, ell); }

  /// Arg omega = 2 pi / (m + 2), in (0, pi/2] for m >= 2.
  double alpha() const { return 2.0 * std::numbers::pi / (m_ + 2.0); }
  cplx omega() const { return std::polar(1.0, alpha()); }
  /// omega^n := exp(i n alpha); in particular omega^{k/2} = exp(pi i k / (m + 2)).
  cplx omega_pow(double n) const { return std::polar(1.0, n * alpha()); }

  /// Directions beta = pi/2 -+ (l + 1) pi / (m + 2) along which w decays.
  std::array<double, 2> boundary_rays() const {
    const double d = (ell_ + 1) * std::numbers::pi / (m_ + 2.0);
    return {std::numbers::pi / 2 - d, std::numbers::pi / 2 + d};
  }

  /// Weyl exponent of the half-line spectrum: E_k ~ c k^{2m/(m+2)}.
  double weyl_exponent() const { return 2.0 * m_ / (m_ + 2.0); }

private:
  ODEProblem(double m, int ell) : m_(m), ell_(ell) {}
  double m_;
  int ell_;
};

enum class MapDirection { paper_to_internal, internal_to_paper };

/// s = -lambda in both directions; an involution.
inline cplx convention_map(const ODEProblem&, cplx value, MapDirection) { return -value; }

struct OriginData {
  cplx value;
  cplx derivative;
};

inline cplx wronskian(const OriginData& a, const OriginData& b) {
  return a.value * b.derivative - a.derivative * b.value;
}

/// Origin data of y_k together with how it was obtained.
struct SolutionRecord {
  double ray_index = 0.0;
  OriginData origin;
  double seed_radius = 0.0;
  /// Relative change of the origin data under seed radius R -> 2R (0 if not requested).
  double error_estimate = 0.0;
};

struct OracleOptions {
  double rel_tol = 1e-13;
  /// Seed radius R satisfies 2/(m+2) R^{(m+2)/2} >= seed_action ...
  double seed_action = 30.0;
  /// ... and R^m >= seed_potential_ratio * |lambda|.
  double seed_potential_ratio = 100.0;
  std::size_t max_steps = 2'000'000;
};

namespace detail {

/// Recessive asymptotic seed at z = R: log y(R) and u = y'/y, from the formal
/// solution of u' + u^2 = z^m + lambda,
///   u = z^{m/2} sum_{j,n} c_{jn} z^{-m j - n (m+2)/2},  c_00 = -1,
/// normalized so that log y = -2/(m+2) z^{(m+2)/2} - (m/4) log z + o(1)
/// (for m = 2 the term -(lambda/2) log z is kept as well).
struct Seed {
  cplx log_value;
  cplx log_derivative;
};

inline Seed asymptotic_seed(double m, cplx lambda, double r) {
  constexpr int J = 12;
  constexpr int N = 10;
  std::array<std::array<cplx, N + 1>, J + 1> c{};
  auto expo = [m](int j, int n) { return m / 2 - m * j - n * (m + 2) / 2; };
  for (int nn = 0; nn <= N; ++nn) {
    for (int jj = 0; jj <= J; ++jj) {
      if (jj == 0 && nn == 0) {
        c[0][0] = -1.0;
        continue;
      }
      cplx rest{};
      for (int j = 0; j <= jj; ++j)
        for (int n = 0; n <= nn; ++n) {
          if ((j == 0 && n == 0) || (j == jj && n == nn))
            continue;
          rest += c[j][n] * c[jj - j][nn - n];
        }
      if (nn >= 1)
        rest += c[jj][nn - 1] * expo(jj, nn - 1);
      if (jj == 1 && nn == 0)
        rest -= lambda;
      c[jj][nn] = rest / 2.0;
    }
  }
  const double log_r = std::log(r);
  cplx u{}, log_y{};
  for (int j = 0; j <= J; ++j)
    for (int n = 0; n <= N; ++n) {
      const double e = expo(j, n);
      u += c[j][n] * std::exp(e * log_r);
      if (std::abs(e + 1.0) < 1e-12)
        log_y += c[j][n] * log_r;
      else
        log_y += c[j][n] * std::exp((e + 1.0) * log_r) / (e + 1.0);
    }
  return {log_y, u};
}

using OdeState = std::array<cplx, 2>;

struct OscillatorRhs {
  double m;
  cplx lambda;
  void operator()(const OdeState& y, OdeState& dy, double z) const {
    const double zm = z > 0.0 ? std::pow(z, m) : 0.0;
    dy[0] = y[1];
    dy[1] = (zm + lambda) * y[0];
  }
};

/// Integrates y'' = (z^m + lambda) y along the real segment from z0 to z1 with
/// running renormalization; returns the state and the accumulated log scale.
inline std::pair<OdeState, double> integrate_segment(double m, cplx lambda, OdeState y, double z0, double z1,
                                                     const OracleOptions& opt) {
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(0.0, opt.rel_tol, odeint::runge_kutta_fehlberg78<OdeState>());
  const OscillatorRhs rhs{m, lambda};
  const double dir = z1 < z0 ? -1.0 : 1.0;
  double z = z0;
  const double local = std::sqrt(std::abs(std::pow(std::max(std::abs(z0), std::abs(z1)), m) + lambda)) + 1.0;
  double dz = dir * std::min(0.05 / local, std::abs(z1 - z0));
  double log_scale = 0.0;
  std::size_t steps = 0;
  while (dir * (z1 - z) > 0.0) {
    if (dir * (z + dz - z1) > 0.0)
      dz = z1 - z;
    if (stepper.try_step(rhs, y, z, dz) == odeint::fail) {
      if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z)))
        throw IntegrationError("step size underflow", z);
      continue;
    }
    if (std::abs(z1 - z) < 1e-15 * (1.0 + std::abs(z1)) || dir * (z - z1) >= 0.0)
      z = z1;
    const double mag = std::max(std::abs(y[0]), std::abs(y[1]));
    if (!std::isfinite(mag))
      throw IntegrationError("non-finite state", z);
    if (mag > 1e100) {
      y[0] /= mag;
      y[1] /= mag;
      log_scale += std::log(mag);
    }
    if (++steps > opt.max_steps)
      throw IntegrationError("step budget exhausted", z);
  }
  return {y, log_scale};
}

} // namespace detail

/// Seed radius: 2/(m+2) R^{(m+2)/2} >= seed_action and R^m >= ratio * |lambda|.
inline double seed_radius(const ODEProblem& prob, cplx lambda, const OracleOptions& opt = {}) {
  const double m = prob.m();
  const double by_action = std::pow(opt.seed_action * (m + 2.0) / 2.0, 2.0 / (m + 2.0));
  const double by_potential = std::pow(opt.seed_potential_ratio * std::abs(lambda), 1.0 / m);
  return std::max({by_action, by_potential, 1.0});
}

/// Origin data of the normalized recessive solution y_0(z, lambda), integrated
/// inward along the positive real axis from z = R.
inline OriginData recessive_origin_data(const ODEProblem& prob, cplx lambda, double radius,
                                        const OracleOptions& opt = {}) {
  const auto seed = detail::asymptotic_seed(prob.m(), lambda, radius);
  auto [y, log_scale] =
      detail::integrate_segment(prob.m(), lambda, {cplx(1.0), seed.log_derivative}, radius, 0.0, opt);
  const cplx factor = std::exp(seed.log_value + log_scale);
  return {y[0] * factor, y[1] * factor};
}

/// y_k at the origin via the rotation rule
///   y_k(0) = omega^{k/2} y_0(0, omega^{2k} lambda),
///   y_k'(0) = omega^{-k/2} y_0'(0, omega^{2k} lambda).
/// `ray_index` may be an integer or half an odd integer with |k| < (m+2)/2.
inline SolutionRecord sibuya_solution(const ODEProblem& prob, cplx lambda, double ray_index,
                                      bool estimate_error = false, const OracleOptions& opt = {}) {
  const double k = ray_index;
  if (std::abs(2.0 * k - std::round(2.0 * k)) > 1e-12)
    throw DomainError("ray index must be an integer or half an odd integer");
  if (!(std::abs(k) * prob.alpha() < std::numbers::pi))
    throw DomainError("ray of y_k meets the branch cut of z^m");
  const cplx rotated = lambda * prob.omega_pow(2.0 * k);
  const double radius = seed_radius(prob, rotated, opt);
  const OriginData y0 = recessive_origin_data(prob, rotated, radius, opt);
  SolutionRecord rec;
  rec.ray_index = k;
  rec.seed_radius = radius;
  rec.origin = {prob.omega_pow(k / 2.0) * y0.value, prob.omega_pow(-k / 2.0) * y0.derivative};
  if (estimate_error) {
    const OriginData y2 = recessive_origin_data(prob, rotated, 2.0 * radius, opt);
    const double scale = std::abs(y0.value) + std::abs(y0.derivative);
    rec.error_estimate = (std::abs(y2.value - y0.value) + std::abs(y2.derivative - y0.derivative)) / scale;
  }
  return rec;
}

/// Continues origin data of a solution along the real axis to z = `to` (>= 0).
inline OriginData propagate(const ODEProblem& prob, cplx lambda, const OriginData& at_origin, double to,
                            const OracleOptions& opt = {}) {
  if (to == 0.0)
    return at_origin;
  auto [y, log_scale] =
      detail::integrate_segment(prob.m(), lambda, {at_origin.value, at_origin.derivative}, 0.0, to, opt);
  const double f = std::exp(log_scale);
  return {y[0] * f, y[1] * f};
}

/// Spectral determinant in the internal variable, F(s) = y_0(0, -s) / y_0(0, 0).
/// Caches the normalization; F(0) = 1 and F is real on the real axis.
class Determinant {
public:
  explicit Determinant(ODEProblem prob, OracleOptions opt = {})
      : prob_(prob), opt_(opt), norm_(sibuya_solution(prob, 0.0, 0.0, false, opt).origin.value) {}

  cplx operator()(cplx s) const {
    if (s == 0.0)
      return 1.0;
    return sibuya_solution(prob_, -s, 0.0, false, opt_).origin.value / norm_;
  }

  const ODEProblem& problem() const { return prob_; }

private:
  ODEProblem prob_;
  OracleOptions opt_;
  cplx norm_;
};

inline cplx determinant_f(const ODEProblem& prob, cplx s, const OracleOptions& opt = {}) {
  return Determinant(prob, opt)(s);
}

/// Stokes multiplier C0(lambda) = W(y_1, y_{-1}) / W(y_0, y_{-1}), paper convention.
inline cplx stokes_C0(const ODEProblem& prob, cplx lambda, const OracleOptions& opt = {}) {
  const auto y0 = sibuya_solution(prob, lambda, 0.0, false, opt).origin;
  const auto yp = sibuya_solution(prob, lambda, 1.0, false, opt).origin;
  const auto ym = sibuya_solution(prob, lambda, -1.0, false, opt).origin;
  const cplx den = wronskian(y0, ym);
  const double size = std::abs(y0.value * ym.derivative) + std::abs(y0.derivative * ym.value);
  if (!(std::abs(den) > 1e-10 * size))
    throw ConditioningError("W(y_0, y_-1) is numerically singular");
  return wronskian(yp, ym) / den;
}

enum class D0Route { functional, wronskian };

/// D0(lambda) = C0(omega^{-1} lambda) C0(omega lambda) - 1, or equivalently
/// W(y_{-3/2}, y_{3/2}) / W(y_{1/2}, y_{3/2}); zeros are the l = 2 eigenvalues.
inline cplx stokes_D0(const ODEProblem& prob, cplx lambda, D0Route route = D0Route::wronskian,
                      const OracleOptions& opt = {}) {
  if (route == D0Route::functional)
    return stokes_C0(prob, lambda * prob.omega_pow(-1.0), opt) * stokes_C0(prob, lambda * prob.omega(), opt) -
           1.0;
  const auto ym = sibuya_solution(prob, lambda, -1.5, false, opt).origin;
  const auto yh = sibuya_solution(prob, lambda, 0.5, false, opt).origin;
  const auto yp = sibuya_solution(prob, lambda, 1.5, false, opt).origin;
  const cplx den = wronskian(yh, yp);
  const double size = std::abs(yh.value * yp.derivative) + std::abs(yh.derivative * yp.value);
  if (!(std::abs(den) > 1e-10 * size))
    throw ConditioningError("W(y_1/2, y_3/2) is numerically singular");
  return wronskian(ym, yp) / den;
}

/// Real-valued eigencondition for the PT problem: W(num) / W(den) times the
/// phase of W(den) relative to its value at lambda = 0. This is C0 (l = 1) or
/// D0 (l = 2) exactly when W(den) is constant in lambda (m > 2). For m = 2 the
/// asymptotic normalization carries a z^{-lambda/2} factor, W(den) picks up a
/// lambda-dependent phase, and this form stays real with the same zeros.
inline double pt_condition(const ODEProblem& prob, double lambda, const OracleOptions& opt = {}) {
  const double num_a = prob.ell() == 1 ? 1.0 : -1.5;
  const double num_b = prob.ell() == 1 ? -1.0 : 1.5;
  const double den_a = prob.ell() == 1 ? 0.0 : 0.5;
  const double den_b = prob.ell() == 1 ? -1.0 : 1.5;
  auto w = [&](cplx x, double a, double b) {
    return wronskian(sibuya_solution(prob, x, a, false, opt).origin, sibuya_solution(prob, x, b, false, opt).origin);
  };
  const cplx den = w(lambda, den_a, den_b);
  const cplx den0 = w(0.0, den_a, den_b);
  const cplx phase0 = den0 / std::abs(den0);
  return std::real(w(lambda, num_a, num_b) / (phase0 * std::abs(den)));
}

namespace detail {

/// Leading-order counting function of the half-line problem, N(s) ~ K s^mu / pi.
inline double weyl_density(const ODEProblem& prob, double s) {
  const double m = prob.m();
  const double mu = (m + 2.0) / (2.0 * m);
  // K_m = int_0^1 sqrt(1 - u^m) du
  const double k_m = std::sqrt(std::numbers::pi) * boost::math::tgamma(1.0 + 1.0 / m) /
                     (2.0 * boost::math::tgamma(1.5 + 1.0 / m));
  return k_m * mu * std::pow(std::max(s, 0.5), mu - 1.0) / std::numbers::pi;
}

/// Scan `fn` (real on the real axis) upward from `start` with a step tied to
/// the local level density until `count` sign changes are found or `limit` is
/// passed.
template <class F>
EigenvalueSet density_scan(const ODEProblem& prob, F&& fn, std::size_t count, double start, double limit,
                           double density_factor, Method method) {
  EigenvalueSet set;
  set.method = method;
  set.window = {{start, limit, 0.0, 0.0}, true};
  auto real_fn = [&](double x) { return std::real(fn(cplx(x))); };
  double a = start;
  double fa = real_fn(a);
  while (set.size() < count && a < limit) {
    const double step = 0.08 / (density_factor * weyl_density(prob, a));
    const double b = std::min(a + step, limit);
    const double fb = real_fn(b);
    if (fa != 0.0 && fb != 0.0 && std::signbit(fa) != std::signbit(fb))
      set.push(refine_real_root(real_fn, a, b, fa, fb, 1e-13));
    else if (fb == 0.0)
      set.push(b);
    a = b;
    fa = fb;
  }
  set.partial = set.size() < count;
  set.sort();
  return set;
}

} // namespace detail

/// First `count` zeros of F on the positive internal axis (half-line Dirichlet
/// eigenvalues, internal convention).
inline EigenvalueSet halfline_dirichlet_spectrum(const ODEProblem& prob, std::size_t count, double limit = 1e4,
                                                 const OracleOptions& opt = {}) {
  if (count < 1)
    throw DomainError("count must be >= 1");
  const Determinant f(prob.with_ell(1), opt);
  return detail::density_scan(prob, f, count, 0.0, limit, 1.0, Method::oracle);
}

/// Real PT eigenvalues (paper convention): zeros of C0 (l = 1) or D0 (l = 2) on (0, limit].
inline EigenvalueSet pt_eigenvalues(const ODEProblem& prob, std::size_t count, double limit = 1e4,
                                    const OracleOptions& opt = {}) {
  if (count < 1)
    throw DomainError("count must be >= 1");
  // The full-line problems have twice the half-line level density.
  return detail::density_scan(
      prob, [&](cplx x) { return pt_condition(prob, x.real(), opt); }, count, 0.0, limit, 2.0, Method::oracle);
}

/// Complex PT eigenvalues (paper convention) inside `rect`, by the winding
/// machinery applied to C0 (l = 1) or D0 (l = 2). Counting runs at a relaxed
/// integration tolerance; each root is then polished at `opt.rel_tol`.
inline EigenvalueSet pt_eigenvalues_complex(const ODEProblem& prob, const Rect& rect, int depth = 30,
                                            const OracleOptions& opt = {}) {
  auto make = [&prob](const OracleOptions& o) {
    return [&prob, o](cplx x) {
      return prob.ell() == 1 ? stokes_C0(prob, x, o) : stokes_D0(prob, x, D0Route::wronskian, o);
    };
  };
  OracleOptions coarse = opt;
  coarse.rel_tol = std::max(opt.rel_tol, 1e-8);
  const ComplexZeros zeros = find_complex_zeros(make(coarse), rect, depth, WindingOptions{.edge_samples = 12, .max_arg_step = std::numbers::pi / 5.0, .max_refine = 16});
  const double scale = std::max(rect.width(), rect.height());
  EigenvalueSet set;
  set.method = Method::oracle;
  set.window = {rect, false};
  for (std::size_t i = 0; i < zeros.roots.size(); ++i) {
    const auto polished = newton_polish(make(opt), zeros.roots[i], 1e-3 * scale);
    set.push(polished ? *polished : zeros.roots[i], zeros.multiple[i]);
  }
  set.unresolved = zeros.unresolved;
  set.partial = !zeros.unresolved.empty();
  set.sort();
  return set;
}

} // namespace voros
