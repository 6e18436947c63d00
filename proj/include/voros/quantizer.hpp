#pragma once

// Fixed-point iteration of the exact quantization map E -> E', where E'_k
// solves Arg f_E(omega^{-2} E'_k) = pi (k - 1/2) + phi and f_E is the
// product built from the current sequence.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "voros/errors.hpp"
#include "voros/product.hpp"
#include "voros/rotation.hpp"

namespace voros {

/// Starting sequence: either c (k - 1/2)^p for k = 1..N or an explicit list.
struct InitialSpec {
  enum class Mode { power_law, explicit_list };

  Mode mode = Mode::power_law;
  double scale = 1.0;
  double exponent = 2.0;
  std::vector<double> values;

  static InitialSpec power_law(double scale, double exponent) {
    InitialSpec s;
    s.scale = scale;
    s.exponent = exponent;
    return s;
  }

  static InitialSpec explicit_list(std::vector<double> values) {
    InitialSpec s;
    s.mode = Mode::explicit_list;
    s.values = std::move(values);
    return s;
  }

  /// Power law matching the Weyl growth of the half-line spectrum of
  /// -w'' + z^m w, with m = 2 pi / alpha - 2: exponent 2m/(m+2) and the
  /// scale from the leading WKB condition.
  static InitialSpec weyl(double alpha) {
    const double m = RotationParams::exponent_for_alpha(alpha);
    const double p = 2.0 * m / (m + 2.0);
    const double km = std::sqrt(std::numbers::pi) * std::tgamma(1.0 + 1.0 / m) / (2.0 * std::tgamma(1.5 + 1.0 / m));
    return power_law(std::pow(std::numbers::pi / km, p), p);
  }

  /// The right-hand side pi (k - 1/2) + phi grows like pi k; a power law with
  /// exponent p gives phases growing like k, so it is compatible for any p > 1.
  bool rhs_compatible() const {
    return mode == Mode::explicit_list || exponent > 1.0;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    if (mode == Mode::power_law)
      os << "power-law c=" << scale << " p=" << exponent;
    else
      os << "explicit list of " << values.size();
    return os.str();
  }
};

struct QuantizationProblem {
  RotationParams rot = RotationParams::from_alpha(std::numbers::pi / 3.0);
  std::size_t level_count = 64;
  double tolerance = 1e-10;
  std::size_t max_iterations = 200;
  InitialSpec initial;
  /// Relaxation factor in (0, 1]; 1 is the plain iteration.
  double relaxation = 1.0;
  /// Model the zeros past N with a power law; ignored below kMinTailLevels.
  bool use_tail = true;
  /// Number of trailing zeros used for the tail fit; 0 picks max(8, N/4).
  std::size_t tail_window = 0;

  static constexpr std::size_t kMinTailLevels = 8;

  double rhs_offset() const noexcept { return rot.phase_offset(); }

  /// Pure scheme at angle alpha with right-hand side pi (k - 1/2) + offset.
  static QuantizationProblem scheme(double alpha, std::size_t levels, double offset = 0.0) {
    QuantizationProblem q;
    q.rot = RotationParams::from_alpha(alpha, offset);
    q.level_count = levels;
    q.initial = InitialSpec::weyl(alpha);
    return q;
  }

  /// Spectral determinant of -w'' + z^m w on the half line: alpha = 2 pi/(m+2), offset alpha/2.
  static QuantizationProblem ode(double m, std::size_t levels) {
    const double alpha = RotationParams::alpha_for_exponent(m);
    return scheme(alpha, levels, alpha / 2.0);
  }

  void validate() const {
    if (level_count < 1)
      throw DomainError("level count must be at least 1");
    if (!(tolerance > 0.0))
      throw DomainError("tolerance must be positive");
    if (!(relaxation > 0.0 && relaxation <= 1.0))
      throw DomainError("relaxation factor must lie in (0, 1]");
  }
};

struct ConvergenceReport {
  std::size_t iterations = 0;
  std::vector<double> residual_history;
  double quantization_residual = 0.0;
  bool converged = false;
  double tolerance = 0.0;
  std::string initial;
};

inline std::vector<double> initial_sequence(const QuantizationProblem& problem) {
  const auto& init = problem.initial;
  std::vector<double> out;
  if (init.mode == InitialSpec::Mode::explicit_list) {
    if (init.values.size() != problem.level_count)
      throw ValidationError("initial list length differs from the level count", init.values.size());
    out = init.values;
  } else {
    if (!(init.scale > 0.0) || !(init.exponent > 0.0))
      throw ValidationError("power-law scale and exponent must be positive", 1);
    out.reserve(problem.level_count);
    for (std::size_t k = 1; k <= problem.level_count; ++k)
      out.push_back(init.scale * std::pow(static_cast<double>(k) - 0.5, init.exponent));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0) || !std::isfinite(out[i]))
      throw ValidationError("initial values must be positive and finite", i + 1);
    if (i > 0 && !(out[i] > out[i - 1]))
      throw ValidationError("initial values must be strictly increasing", i + 1);
  }
  return out;
}

/// Unique t > 0 with phase_on_ray(f, rot, t) = pi (k - 1/2) + phi. `hint`
/// seeds the bracket search.
inline double solve_level(const EntireProduct& f, const RotationParams& rot, double phi, std::size_t k,
                          std::optional<double> hint = std::nullopt) {
  const double target = std::numbers::pi * (static_cast<double>(k) - 0.5) + phi;
  if (!(target > 0.0))
    throw DomainError("quantization target must be positive");
  if (!f.tail()) {
    const double sup = static_cast<double>(f.size()) * rot.theta();
    if (target >= sup)
      throw RangeError("target phase not reached by a finite product", target);
  }
  auto g = [&](double t) { return phase_on_ray(f, rot, t) - target; };

  constexpr double kOverflowGuard = 1e300;
  double start = hint && *hint > 0.0 ? *hint : (f.size() > 0 ? f.zero(1) : 1.0);
  double lo = 0.0;
  double hi = start;
  if (g(start) < 0.0) {
    lo = start;
    hi = 2.0 * start;
    while (g(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > kOverflowGuard)
        throw RangeError("bracket expansion overflowed", hi);
    }
  } else {
    lo = start / 2.0;
    while (g(lo) > 0.0) {
      hi = lo;
      lo /= 2.0;
      if (lo < std::numeric_limits<double>::min())
        throw RangeError("bracket contraction underflowed", lo);
    }
  }

  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 60; ++iter) {
    const double value = g(t);
    if (value == 0.0)
      return t;
    (value < 0.0 ? lo : hi) = t;
    double next = t - value / phase_derivative(f, rot, t);
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * t || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      break;
  }
  return t;
}

/// Asymptotic law E_j ~ A j^p of the sequence being iterated. The map
/// commutes with E -> cE, so the scale of a fixed point is set by the
/// asymptotics of the starting sequence; the tail keeps A and p from the
/// initial data and only its index shift follows the iterates.
struct AsymptoticLaw {
  double amplitude;
  double exponent;
};

inline std::size_t tail_window_for(const QuantizationProblem& problem, std::size_t n) {
  return problem.tail_window > 0 ? std::min(problem.tail_window, n)
                                 : std::max<std::size_t>(QuantizationProblem::kMinTailLevels, n / 4);
}

inline std::optional<AsymptoticLaw> asymptotic_law(const QuantizationProblem& problem, const std::vector<double>& initial) {
  const std::size_t n = initial.size();
  if (!problem.use_tail || n < QuantizationProblem::kMinTailLevels)
    return std::nullopt;
  if (problem.initial.mode == InitialSpec::Mode::power_law)
    return AsymptoticLaw{problem.initial.scale, problem.initial.exponent};
  const ZeroTail fitted = fit_tail(initial, tail_window_for(problem, n));
  return AsymptoticLaw{fitted.amplitude, fitted.exponent};
}

/// Product built from a level sequence as the scheme sees it.
inline EntireProduct scheme_product(const std::vector<double>& levels, const QuantizationProblem& problem,
                                    const std::optional<AsymptoticLaw>& law) {
  if (!law)
    return make_product(levels);
  return make_product(levels,
                      fit_tail_shift(levels, law->amplitude, law->exponent, tail_window_for(problem, levels.size())));
}

inline std::vector<double> voros_step(const std::vector<double>& levels, const QuantizationProblem& problem,
                                      const std::optional<AsymptoticLaw>& law) {
  const EntireProduct f = scheme_product(levels, problem, law);
  std::vector<double> next(levels.size());
  for (std::size_t k = 1; k <= levels.size(); ++k)
    next[k - 1] = solve_level(f, problem.rot, problem.rhs_offset(), k, levels[k - 1]);
  for (std::size_t i = 1; i < next.size(); ++i)
    if (!(next[i] > next[i - 1]))
      throw ValidationError("sweep produced a non-increasing sequence", i + 1);
  return next;
}

/// max_k |phase_on_ray(f, rot, E_k) - pi (k - 1/2) - phi| over stored zeros.
inline double quantization_residual(const EntireProduct& f, const RotationParams& rot, double phi) {
  double worst = 0.0;
  for (std::size_t k = 1; k <= f.size(); ++k) {
    const double target = std::numbers::pi * (static_cast<double>(k) - 0.5) + phi;
    worst = std::max(worst, std::abs(phase_on_ray(f, rot, f.zero(k)) - target));
  }
  return worst;
}

inline double max_relative_change(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(b[i] - a[i]) / std::abs(a[i]));
  return worst;
}

inline std::pair<EntireProduct, ConvergenceReport> run_scheme(const QuantizationProblem& problem) {
  problem.validate();
  ConvergenceReport report;
  report.tolerance = problem.tolerance;
  report.initial = problem.initial.describe();

  std::vector<double> levels = initial_sequence(problem);
  const auto law = asymptotic_law(problem, levels);
  while (report.iterations < problem.max_iterations) {
    std::vector<double> next = voros_step(levels, problem, law);
    if (problem.relaxation < 1.0)
      for (std::size_t i = 0; i < next.size(); ++i)
        next[i] = (1.0 - problem.relaxation) * levels[i] + problem.relaxation * next[i];
    const double change = max_relative_change(levels, next);
    levels = std::move(next);
    ++report.iterations;
    report.residual_history.push_back(change);
    if (change <= problem.tolerance) {
      report.converged = true;
      break;
    }
  }
  EntireProduct f = scheme_product(levels, problem, law);
  report.quantization_residual = quantization_residual(f, problem.rot, problem.rhs_offset());
  return {std::move(f), std::move(report)};
}

} // namespace voros
