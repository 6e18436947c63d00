#pragma once

// Stokes functions rebuilt from a quantized product f:
//
//   C(x) = (k f(w^2 x) + k^{-1} f(w^{-2} x)) / f(x),
//   D(x) = C(w^{-1} x) C(w x) - 1,
//
// with w = e^{i alpha} and k = e^{i phi}. Both are real entire functions
// when f solves the quantization condition.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "voros/errors.hpp"
#include "voros/product.hpp"
#include "voros/roots.hpp"
#include "voros/rotation.hpp"

namespace voros {

enum class SpectralKind { C, D };

/// How D is evaluated: as C(w^{-1}x) C(wx) - 1, directly from f by
/// eliminating C from the two functional equations, or by whichever of the
/// two has the smaller rounding-error estimate at x.
enum class DRoute { product_of_c, direct, conditioned };

inline const char* to_string(DRoute r) {
  switch (r) {
  case DRoute::product_of_c:
    return "product-of-C";
  case DRoute::direct:
    return "direct";
  case DRoute::conditioned:
    return "conditioned";
  }
  return "?";
}

namespace detail {

inline constexpr double kZeroGuard = 1e-12;

/// Stored zero within the guard radius of x, if any (1-based index).
inline std::optional<std::size_t> guarded_zero(const EntireProduct& f, cplx x) {
  const auto& zs = f.zeros();
  if (zs.empty())
    return std::nullopt;
  const auto it = std::lower_bound(zs.begin(), zs.end(), x.real());
  for (auto cand : {it, it == zs.begin() ? it : it - 1}) {
    if (cand == zs.end())
      continue;
    if (std::abs(x - *cand) <= kZeroGuard * *cand)
      return static_cast<std::size_t>(cand - zs.begin()) + 1;
  }
  return std::nullopt;
}

} // namespace detail

/// C at x. Within the guard radius of a stored zero E_j the ratio is
/// replaced, in limit mode, by the ratio of derivatives at E_j.
inline cplx stokes_C(const EntireProduct& f, const RotationParams& rot, cplx x, bool limit = false) {
  const cplx k = rot.phase_factor();
  const cplx w2 = rot.omega_pow(2.0);
  const cplx wm2 = rot.omega_pow(-2.0);
  if (auto j = detail::guarded_zero(f, x)) {
    if (!limit)
      throw PoleGuardError("C evaluated at stored zero " + std::to_string(*j) + " of f without limit mode");
    const double e = f.zero(*j);
    return (k * w2 * eval_derivative(f, w2 * e) + std::conj(k) * wm2 * eval_derivative(f, wm2 * e)) /
           eval_derivative(f, e);
  }
  const cplx base = log_eval(f, x);
  return k * std::exp(log_eval(f, w2 * x) - base) + std::conj(k) * std::exp(log_eval(f, wm2 * x) - base);
}

/// D at x together with a bound on its absolute rounding error: eps times
/// the largest quantity that cancels in the chosen route.
struct DValue {
  cplx value;
  double error;
};

inline DValue stokes_D_estimate(const EntireProduct& f, const RotationParams& rot, cplx x, DRoute route) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const cplx w = rot.omega();
  if (route == DRoute::conditioned) {
    const DValue a = stokes_D_estimate(f, rot, x, DRoute::product_of_c);
    const DValue b = stokes_D_estimate(f, rot, x, DRoute::direct);
    return a.error <= b.error ? a : b;
  }
  if (route == DRoute::product_of_c) {
    try {
      const cplx cc = stokes_C(f, rot, std::conj(w) * x) * stokes_C(f, rot, w * x);
      return {cc - 1.0, eps * std::max(1.0, std::abs(cc))};
    } catch (const PoleGuardError& e) {
      throw PoleGuardError(std::string("D via product-of-C route: ") + e.what() + "; try the direct route");
    }
  }
  if (detail::guarded_zero(f, w * x) || detail::guarded_zero(f, std::conj(w) * x))
    throw PoleGuardError("D via direct route: f(w^{+-1} x) vanishes; try the product-of-C route");
  const cplx k2 = rot.k_pow(2.0);
  const cplx a = log_eval(f, rot.omega_pow(-3.0) * x);
  const cplx b = log_eval(f, std::conj(w) * x);
  const cplx c = log_eval(f, w * x);
  const cplx d = log_eval(f, rot.omega_pow(3.0) * x);
  const cplx t1 = std::conj(k2) * std::exp(a - c);
  const cplx t2 = k2 * std::exp(d - b);
  const cplx t3 = std::exp(a + d - b - c);
  return {t1 + t2 + t3, eps * std::max({std::abs(t1), std::abs(t2), std::abs(t3)})};
}

inline cplx stokes_D(const EntireProduct& f, const RotationParams& rot, cplx x, DRoute route = DRoute::product_of_c) {
  return stokes_D_estimate(f, rot, x, route).value;
}

/// A C or D evaluator bound to its data.
struct SpectralFunction {
  EntireProduct base;
  RotationParams rot;
  SpectralKind kind = SpectralKind::C;
  DRoute route = DRoute::product_of_c;
  bool limit_mode = false;

  cplx operator()(cplx x) const {
    return kind == SpectralKind::C ? stokes_C(base, rot, x, limit_mode) : stokes_D(base, rot, x, route);
  }
};

/// Three-term identity between f, C and D. `unit_k` is the k = 1 form
///   f(w^{-3}x) = D(x) f(wx) - C(w^{-1}x) f(w^3 x);
/// `general_k` is
///   k^{-3/2} f(w^{-3}x) + C(w^{-1}x) k^{3/2} f(w^3 x) = D(x) k^{1/2} f(wx).
enum class ThreeTermIdentity { unit_k, general_k };

/// |LHS - RHS| / (1 + max |term|), with D from the better-conditioned route.
inline double identity_residual(const EntireProduct& f, const RotationParams& rot, cplx x, ThreeTermIdentity which) {
  const cplx fm3 = eval(f, rot.omega_pow(-3.0) * x);
  const cplx f3 = eval(f, rot.omega_pow(3.0) * x);
  const cplx f1 = eval(f, rot.omega() * x);
  const cplx c = stokes_C(f, rot, std::conj(rot.omega()) * x);
  const cplx d = stokes_D(f, rot, x, DRoute::conditioned);
  cplx t1 = fm3, t2 = c * f3, t3 = d * f1;
  if (which == ThreeTermIdentity::general_k) {
    t1 *= rot.k_pow(-1.5);
    t2 *= rot.k_pow(1.5);
    t3 *= rot.k_pow(0.5);
  }
  const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return std::abs(t1 + t2 - t3) / (1.0 + scale);
}

/// Points drawn uniformly from the disk |x| <= radius.
inline std::vector<cplx> disk_samples(double radius, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> out;
  out.reserve(count);
  while (out.size() < count) {
    const cplx x{u(gen), u(gen)};
    if (std::abs(x) <= 1.0)
      out.push_back(radius * x);
  }
  return out;
}

/// Worst value of a sampled quantity and where it occurred.
struct SampleStatistic {
  double worst = 0.0;
  cplx witness{};
  std::size_t accepted = 0;
  std::size_t tried = 0;
};

inline SampleStatistic identity_sample(const EntireProduct& f, const RotationParams& rot, ThreeTermIdentity which,
                                       double radius, std::size_t count, std::uint64_t seed) {
  SampleStatistic stat;
  for (cplx x : disk_samples(radius, count, seed)) {
    const double r = identity_residual(f, rot, x, which);
    ++stat.tried;
    ++stat.accepted;
    if (!(r <= stat.worst)) {
      stat.worst = r;
      stat.witness = x;
    }
  }
  return stat;
}

/// Relative difference between the product-of-C and direct D routes at
/// `count` random points of the disk where both routes are well conditioned,
/// i.e. both rounding bounds are below `conditioning` times |D|.
inline SampleStatistic route_agreement(const EntireProduct& f, const RotationParams& rot, double radius,
                                       std::size_t count, std::uint64_t seed, double conditioning = 1e-12) {
  SampleStatistic stat;
  const std::size_t max_tries = 50 * count;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (stat.accepted < count && stat.tried < max_tries) {
    const cplx x = radius * cplx{u(gen), u(gen)};
    if (std::abs(x) > radius)
      continue;
    ++stat.tried;
    const DValue a = stokes_D_estimate(f, rot, x, DRoute::product_of_c);
    const DValue b = stokes_D_estimate(f, rot, x, DRoute::direct);
    const double mag = std::abs(b.value);
    if (!(std::max(a.error, b.error) <= conditioning * mag))
      continue;
    ++stat.accepted;
    const double rel = std::abs(a.value - b.value) / mag;
    if (!(rel <= stat.worst)) {
      stat.worst = rel;
      stat.witness = x;
    }
  }
  return stat;
}

// ---------------------------------------------------------------------------
// Zero location

/// Real zeros of a real-on-the-axis spectral function on [a, b], from sign
/// changes on a uniform grid of `grid` cells refined to 1e-12 relative.
/// Sign changes at poles (C of an unquantized product) are discarded.
inline EigenvalueSet real_zeros(const SpectralFunction& fn, double a, double b, std::size_t grid) {
  if (!(a < b) || grid < 1)
    throw DomainError("real_zeros needs a < b and at least one grid cell");
  if (fn.kind == SpectralKind::C && !fn.limit_mode)
    for (double e : fn.base.zeros())
      if (e >= a && e <= b)
        throw PoleGuardError("interval contains stored zero " + std::to_string(e) +
                             " of f; evaluate C in limit mode or shrink the interval");

  const std::vector<double> xs = uniform_grid(a, b, grid);
  std::vector<double> values(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const cplx v = fn(xs[i]);
    if (std::abs(v.imag()) > 1e-6 * std::max(1.0, std::abs(v.real())))
      throw DomainError("function is not real on the real axis at x=" + std::to_string(xs[i]));
    values[i] = v.real();
  }

  EigenvalueSet set;
  set.method = Method::specfun;
  set.window = SearchWindow{Rect{a, b, 0.0, 0.0}, true};
  auto re = [&](double x) { return fn(x).real(); };
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double fa = values[i - 1], fb = values[i];
    double root;
    if (fa == 0.0)
      root = xs[i - 1];
    else if (fb != 0.0 && std::signbit(fa) != std::signbit(fb))
      root = refine_real_root(re, xs[i - 1], xs[i], fa, fb, 1e-12);
    else
      continue;
    const double h = 1e-6 * std::max(1.0, std::abs(root));
    const double vp = re(root + h), vm = re(root - h);
    // Moving away from a zero |value| grows; moving away from a pole it shrinks.
    if (!(std::abs(re(root + 2.0 * h)) + std::abs(re(root - 2.0 * h)) >= std::abs(vp) + std::abs(vm)))
      continue;
    const double slope = std::abs(vp - vm) / (2.0 * h);
    const bool multiple = slope * (xs[i] - xs[i - 1]) < 1e-6 * std::max(std::abs(fa), std::abs(fb));
    set.push(root, multiple);
  }
  if (values.back() == 0.0)
    set.push(xs.back());
  return set;
}

/// Zeros of fn inside `rect` by winding counts and quadrisection.
template <class F>
EigenvalueSet complex_zeros(F&& fn, const Rect& rect, int depth = 40, Method method = Method::specfun,
                            const WindingOptions& opt = {}) {
  const ComplexZeros found = find_complex_zeros(fn, rect, depth, opt);
  EigenvalueSet set;
  set.method = method;
  set.window = SearchWindow{rect, false};
  for (std::size_t i = 0; i < found.roots.size(); ++i)
    set.push(found.roots[i], found.multiple[i]);
  set.unresolved = found.unresolved;
  set.partial = !found.unresolved.empty();
  set.sort();
  return set;
}

// ---------------------------------------------------------------------------
// Proposition checks

struct ClauseResult {
  enum class Status { pass, fail, skipped };

  std::string name;
  Status status = Status::pass;
  /// Smallest slack to the clause's threshold (negative on failure).
  double margin = 0.0;
  std::optional<cplx> witness = std::nullopt;
  std::string detail = {};
};

inline const char* to_string(ClauseResult::Status s) {
  switch (s) {
  case ClauseResult::Status::pass:
    return "pass";
  case ClauseResult::Status::fail:
    return "fail";
  case ClauseResult::Status::skipped:
    return "skipped";
  }
  return "?";
}

/// Winding count over a rectangle compared against the zeros found inside it.
struct WindingAudit {
  std::string target;
  Rect rect;
  int expected = 0;
  int observed = 0;
  bool stable = false;
  bool passed() const { return stable && expected == observed; }
};

struct PropositionOptions {
  /// Search radius; 0 picks E_{N/2}.
  double window = 0.0;
  /// Grid cells per smallest gap E_2 - E_1 in the real scans.
  double cells_per_gap = 16.0;
  std::size_t modulus_radii = 6;
  std::size_t modulus_angles = 64;
  std::size_t positive_samples = 200;
};

struct PropositionReport {
  std::vector<ClauseResult> clauses;
  EigenvalueSet c_zeros;
  EigenvalueSet d_zeros;
  std::vector<WindingAudit> audits;
  double window = 0.0;

  bool passed() const {
    for (const auto& c : clauses)
      if (c.status == ClauseResult::Status::fail)
        return false;
    for (const auto& a : audits)
      if (!a.passed())
        return false;
    return true;
  }
};

namespace detail {

/// Default search radius: E_{N/2}, or E_N for very short lists.
inline double default_window(const EntireProduct& f) {
  if (f.size() == 0)
    throw DomainError("product has no stored zeros");
  return f.zero(std::max<std::size_t>(1, f.size() / 2));
}

/// A radius near `r` midway between consecutive stored zeros, so that a
/// contour through it stays away from them.
inline double mid_gap(const EntireProduct& f, double r) {
  const auto& zs = f.zeros();
  auto it = std::lower_bound(zs.begin(), zs.end(), r);
  if (it == zs.begin())
    return 0.5 * zs.front();
  if (it == zs.end())
    return r;
  return 0.5 * (*(it - 1) + *it);
}

inline double grid_step(const EntireProduct& f, double cells_per_gap) {
  if (f.size() >= 2)
    return (f.zero(2) - f.zero(1)) / cells_per_gap;
  return f.zero(1) / cells_per_gap;
}

/// Boundary sampling dense enough that the argument cannot turn by a full
/// period between samples: several samples per gap between consecutive zeros.
inline WindingOptions contour_sampling(const EntireProduct& f) {
  const double gap = f.size() >= 2 ? f.zero(2) - f.zero(1) : f.zero(1);
  WindingOptions opt;
  opt.edge_samples = 16;
  opt.max_spacing = gap / 6.0;
  opt.max_arg_step = std::numbers::pi / 8.0;
  opt.max_refine = 16;
  return opt;
}

} // namespace detail

/// Real zeros of C (or D) on [-window, 0) plus a winding audit over a box
/// that reaches from -window into the right half plane. The left edge is
/// placed between zeros and the right edge midway between stored zeros of f.
inline std::pair<EigenvalueSet, WindingAudit> negative_axis_zeros(const SpectralFunction& fn, double window,
                                                                   double step) {
  // The scan reaches one cell past -window so that a root just outside it
  // still keeps the left edge of the box away.
  const auto cells = static_cast<std::size_t>(std::ceil(window / step)) + 1;
  const EigenvalueSet scan = real_zeros(fn, -window - step, -0.0 - 1e-9 * window, cells);
  EigenvalueSet set = scan;
  set.window.rect.re_lo = -window;
  set.values.clear();
  set.real_flags.clear();
  set.multiple_flags.clear();
  std::vector<double> roots;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    roots.push_back(scan.values[i].real());
    if (scan.values[i].real() >= -window)
      set.push(scan.values[i], scan.multiple_flags[i]);
  }
  double left = -window;
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (std::abs(roots[i] - left) < 0.25 * step) {
      left = 0.5 * (roots[i] + (i + 1 < roots.size() ? roots[i + 1] : 0.0));
      break;
    }
  int expected = 0;
  for (double r : roots)
    expected += r > left ? 1 : 0;

  const RotationParams& rot = fn.rot;
  double right = detail::mid_gap(fn.base, 0.5 * window);
  double height = window;
  if (fn.kind == SpectralKind::D) {
    // D's removable singularities sit on the rays of angle +-alpha through the
    // stored zeros; let the right edge cross those rays midway between them.
    right = detail::mid_gap(fn.base, 0.5 * window) * std::cos(rot.alpha());
    height = std::max(window, 2.0 * right * std::tan(rot.alpha()));
  }
  WindingAudit audit;
  audit.target = fn.kind == SpectralKind::C ? "C" : "D";
  audit.rect = Rect{left, right, -height, 0.9137 * height};
  audit.expected = expected;
  const Winding w = winding_number(fn, audit.rect, detail::contour_sampling(fn.base));
  audit.observed = w.count;
  audit.stable = w.stable;
  return {std::move(set), audit};
}

/// Numerical check of the Proposition for a quantized product: the zeros of C,
/// and for alpha <= pi/3 those of D, are real and negative.
inline PropositionReport verify_proposition(const EntireProduct& f, const RotationParams& rot,
                                            const PropositionOptions& opt = {}) {
  PropositionReport report;
  const double window = opt.window > 0.0 ? opt.window : detail::default_window(f);
  report.window = window;
  const double step = detail::grid_step(f, opt.cells_per_gap);
  const cplx w = rot.omega();

  // (i) zeros of C are real and negative.
  SpectralFunction c_fn{f, rot, SpectralKind::C};
  {
    auto [set, audit] = negative_axis_zeros(c_fn, window, step);
    report.c_zeros = std::move(set);
    report.audits.push_back(audit);
    ClauseResult clause{"c_zeros_real_negative"};
    clause.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.c_zeros.size(); ++i) {
      const cplx z = report.c_zeros.values[i];
      const double slack = -z.real();
      if (slack < clause.margin) {
        clause.margin = slack;
        clause.witness = z;
      }
    }
    if (!audit.passed()) {
      clause.status = ClauseResult::Status::fail;
      clause.detail = "winding audit found " + std::to_string(audit.observed) + " zeros, real scan found " +
                      std::to_string(audit.expected);
    } else if (report.c_zeros.size() == 0) {
      clause.detail = "no zeros in window";
    }
    report.clauses.push_back(clause);
  }

  // (ii) |f(w^2 x)| = |f(w^{-2} x)| at the zeros of C.
  {
    ClauseResult clause{"modulus_balance_at_c_zeros"};
    double worst = 0.0;
    for (cplx z : report.c_zeros.values) {
      const double a = std::abs(eval(f, rot.omega_pow(2.0) * z));
      const double b = std::abs(eval(f, rot.omega_pow(-2.0) * z));
      const double rel = std::abs(a - b) / std::max(a, b);
      if (rel >= worst) {
        worst = rel;
        clause.witness = z;
      }
    }
    clause.margin = 1e-7 - worst;
    clause.status = worst <= 1e-7 ? ClauseResult::Status::pass : ClauseResult::Status::fail;
    report.clauses.push_back(clause);
  }

  // (iii) D zeros: real, negative, |C(w^{-1} t)| = 1 and |C(w^{-1} t) C(w t)| = 1.
  const bool d_applies = rot.alpha() <= std::numbers::pi / 3.0 + 1e-15;
  SpectralFunction d_fn{f, rot, SpectralKind::D, DRoute::conditioned};
  if (d_applies) {
    auto [set, audit] = negative_axis_zeros(d_fn, window, step);
    report.d_zeros = std::move(set);
    report.audits.push_back(audit);
    ClauseResult real_clause{"d_zeros_real_negative"};
    real_clause.margin = std::numeric_limits<double>::infinity();
    for (cplx z : report.d_zeros.values)
      if (-z.real() < real_clause.margin) {
        real_clause.margin = -z.real();
        real_clause.witness = z;
      }
    if (!audit.passed()) {
      real_clause.status = ClauseResult::Status::fail;
      real_clause.detail = "winding audit found " + std::to_string(audit.observed) + " zeros, real scan found " +
                           std::to_string(audit.expected);
    }
    report.clauses.push_back(real_clause);

    ClauseResult clause{"unit_modulus_at_d_zeros"};
    double worst = 0.0;
    for (cplx t : report.d_zeros.values) {
      const cplx cm = stokes_C(f, rot, std::conj(w) * t);
      const cplx cp = stokes_C(f, rot, w * t);
      const double dev = std::max(std::abs(std::abs(cm) - 1.0), std::abs(std::abs(cm * cp) - 1.0));
      if (dev >= worst) {
        worst = dev;
        clause.witness = t;
      }
    }
    clause.margin = 1e-6 - worst;
    clause.status = worst <= 1e-6 ? ClauseResult::Status::pass : ClauseResult::Status::fail;
    report.clauses.push_back(clause);
  } else {
    for (const char* name : {"d_zeros_real_negative", "unit_modulus_at_d_zeros"}) {
      ClauseResult clause{name};
      clause.status = ClauseResult::Status::skipped;
      clause.detail = "alpha outside (0,pi/3]";
      report.clauses.push_back(clause);
    }
  }

  // (iv) theta -> |f(r e^{i theta})| nondecreasing on (0, pi).
  {
    ClauseResult clause{"modulus_monotone_in_angle"};
    clause.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= opt.modulus_radii; ++i) {
      const double r = window * static_cast<double>(i) / static_cast<double>(opt.modulus_radii);
      double prev = modulus_profile(f, r, 0.0);
      for (std::size_t j = 1; j <= opt.modulus_angles; ++j) {
        const double theta = std::numbers::pi * static_cast<double>(j) / static_cast<double>(opt.modulus_angles);
        const double cur = modulus_profile(f, r, theta);
        const double slack = (cur - prev) / std::max(cur, prev);
        if (slack < clause.margin) {
          clause.margin = slack;
          clause.witness = std::polar(r, theta);
        }
        prev = cur;
      }
    }
    clause.status = clause.margin >= -1e-12 ? ClauseResult::Status::pass : ClauseResult::Status::fail;
    report.clauses.push_back(clause);
  }

  // (v) D(x) + 1 > C(0)^2 for x > 0; C(0)^2 = 4 when k = 1.
  {
    ClauseResult clause{"d_plus_one_exceeds_c0_squared"};
    const double bound = std::norm(rot.phase_factor() + std::conj(rot.phase_factor()));
    clause.detail = "bound " + std::to_string(bound);
    clause.margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= opt.positive_samples; ++i) {
      const double x = window * static_cast<double>(i) / static_cast<double>(opt.positive_samples);
      const double value = stokes_D(f, rot, x).real() + 1.0;
      if (value - bound < clause.margin) {
        clause.margin = value - bound;
        clause.witness = x;
      }
    }
    clause.status = clause.margin > 0.0 ? ClauseResult::Status::pass : ClauseResult::Status::fail;
    report.clauses.push_back(clause);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Witness with zeros on the positive ray and 1-points on the rays of angle +-alpha

struct RayClassification {
  cplx point;
  int ray = 0;
  double deviation = 0.0;
};

/// Nearest of the rays arg = j alpha, j in {-1, 0, 1}.
inline RayClassification classify_ray(cplx point, double alpha) {
  RayClassification best{point, 0, std::numeric_limits<double>::infinity()};
  const double arg = std::arg(point);
  for (int j = -1; j <= 1; ++j) {
    const double dev = std::abs(arg - j * alpha);
    if (dev < best.deviation) {
      best.ray = j;
      best.deviation = dev;
    }
  }
  return best;
}

/// g(x) = 1 - C(-w x) C(-w^{-1} x). Its zeros are the D-zeros reflected onto
/// the positive ray; its 1-points are the C-zeros reflected and rotated onto
/// the rays of angle +-alpha. Since g(x) = -D(-x), g is evaluated through the
/// better-conditioned D route: in the right half plane C(-w x) C(-w^{-1} x)
/// is within rounding of 1 and the subtraction would lose every digit.
struct Theorem1Witness {
  EntireProduct base;
  RotationParams rot;
  EigenvalueSet zeros;
  EigenvalueSet one_points;
  std::vector<RayClassification> zero_rays;
  std::vector<RayClassification> one_point_rays;

  cplx operator()(cplx x) const { return -stokes_D(base, rot, -x, DRoute::conditioned); }

  /// g(x) - 1 = -C(-w x) C(-w^{-1} x).
  cplx minus_one(cplx x) const {
    const cplx w = rot.omega();
    return -stokes_C(base, rot, -w * x) * stokes_C(base, rot, -std::conj(w) * x);
  }
};

/// Builds the witness and locates its zeros and 1-points in the right-half
/// box [window * 1e-3, window] x [-window, window]; g is free of removable
/// singularities there.
inline Theorem1Witness theorem1_witness(const EntireProduct& f, const RotationParams& rot, double window = 0.0,
                                        int depth = 40) {
  if (!(rot.alpha() <= std::numbers::pi / 3.0 + 1e-15))
    throw DomainError("witness construction requires alpha in (0, pi/3]");
  Theorem1Witness wit{f, rot, {}, {}, {}, {}};
  if (window <= 0.0)
    window = detail::default_window(f);
  const Rect rect{1e-3 * window, window, -0.9731 * window, 1.0119 * window};
  const WindingOptions opt = detail::contour_sampling(f);
  wit.zeros = complex_zeros([&](cplx x) { return wit(x); }, rect, depth, Method::specfun, opt);
  wit.one_points = complex_zeros([&](cplx x) { return wit.minus_one(x); }, rect, depth, Method::specfun, opt);
  for (cplx z : wit.zeros.values)
    wit.zero_rays.push_back(classify_ray(z, rot.alpha()));
  for (cplx z : wit.one_points.values)
    wit.one_point_rays.push_back(classify_ray(z, rot.alpha()));
  return wit;
}

} // namespace voros
