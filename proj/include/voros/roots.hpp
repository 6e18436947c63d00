#pragma once

// Zero location for scalar functions: sign-change scans on the real line and
// argument-principle quadrisection in rectangles of the complex plane.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "voros/errors.hpp"
#include "voros/rotation.hpp"

namespace voros {

/// Axis-aligned rectangle [re_lo, re_hi] x [im_lo, im_hi].
struct Rect {
  double re_lo = 0.0;
  double re_hi = 0.0;
  double im_lo = 0.0;
  double im_hi = 0.0;

  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
  cplx center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= re_lo - slack && z.real() <= re_hi + slack && z.imag() >= im_lo - slack &&
           z.imag() <= im_hi + slack;
  }
};

/// Where a set of zeros was searched: a real interval or a rectangle.
struct SearchWindow {
  Rect rect;
  bool real_axis = true;
};

enum class Method { scheme, specfun, oracle };

inline const char* to_string(Method m) {
  switch (m) {
  case Method::scheme:
    return "scheme";
  case Method::specfun:
    return "specfun";
  case Method::oracle:
    return "oracle";
  }
  return "?";
}

/// Relative reality tolerance: |Im z| <= tol * max(1, |Re z|).
inline constexpr double kRealityTolerance = 1e-6;

inline bool is_real(cplx z, double tol = kRealityTolerance) {
  return std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z.real()));
}

/// Located zeros or eigenvalues, sorted by real part.
struct EigenvalueSet {
  std::vector<cplx> values;
  Method method = Method::specfun;
  std::vector<bool> real_flags;
  SearchWindow window;
  double reality_tolerance = kRealityTolerance;
  /// Search stopped before the requested count, or some boxes did not resolve.
  bool partial = false;
  /// Zeros where the derivative also vanished within tolerance (multiplicity not resolved).
  std::vector<bool> multiple_flags;
  std::vector<Rect> unresolved;

  std::size_t size() const { return values.size(); }
  bool all_real() const { return std::all_of(real_flags.begin(), real_flags.end(), [](bool b) { return b; }); }

  void push(cplx v, bool multiple = false) {
    values.push_back(v);
    real_flags.push_back(is_real(v, reality_tolerance));
    multiple_flags.push_back(multiple);
  }

  void sort() {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (values[a].real() != values[b].real())
        return values[a].real() < values[b].real();
      return values[a].imag() < values[b].imag();
    });
    EigenvalueSet sorted = *this;
    for (std::size_t i = 0; i < order.size(); ++i) {
      sorted.values[i] = values[order[i]];
      sorted.real_flags[i] = real_flags[order[i]];
      sorted.multiple_flags[i] = multiple_flags[order[i]];
    }
    *this = std::move(sorted);
  }
};

// ---------------------------------------------------------------------------
// Real line

/// Refine a sign change of `fn` on [a, b] to `rel_tol` relative (TOMS 748).
template <class F>
double refine_real_root(F&& fn, double a, double b, double fa, double fb, double rel_tol = 1e-12) {
  if (fa == 0.0)
    return a;
  if (fb == 0.0)
    return b;
  auto tol = [rel_tol](double lo, double hi) {
    return std::abs(hi - lo) <= rel_tol * std::max({std::abs(lo), std::abs(hi), 1e-300});
  };
  std::uintmax_t max_iter = 200;
  auto [lo, hi] = boost::math::tools::toms748_solve(fn, a, b, fa, fb, tol, max_iter);
  return 0.5 * (lo + hi);
}

/// Sign changes of a real function sampled at the points of `grid`
/// (increasing), each refined to `rel_tol` relative.
template <class F>
std::vector<double> real_roots_on_grid(F&& fn, const std::vector<double>& grid, double rel_tol = 1e-12) {
  std::vector<double> roots;
  if (grid.size() < 2)
    return roots;
  double a = grid.front();
  double fa = fn(a);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double b = grid[i];
    const double fb = fn(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fb != 0.0 && std::signbit(fa) != std::signbit(fb)) {
      roots.push_back(refine_real_root(fn, a, b, fa, fb, rel_tol));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0)
    roots.push_back(a);
  return roots;
}

inline std::vector<double> uniform_grid(double a, double b, std::size_t intervals) {
  std::vector<double> g(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(intervals);
  g.back() = b;
  return g;
}

// ---------------------------------------------------------------------------
// Complex plane

struct WindingOptions {
  /// Minimum initial samples per edge.
  std::size_t edge_samples = 24;
  /// If positive, an upper bound on the initial spacing between samples.
  double max_spacing = 0.0;
  /// Largest accepted argument increment between neighbouring samples.
  double max_arg_step = std::numbers::pi / 5.0;
  /// Bisection depth limit per initial segment.
  int max_refine = 24;
};

/// Outcome of a boundary argument accumulation.
struct Winding {
  int count = 0;
  double raw = 0.0;  // total argument change / 2 pi
  bool stable = false;
};

namespace detail {

template <class F>
double accumulate_segment(F& fn, cplx a, cplx b, cplx fa, cplx fb, const WindingOptions& opt, int depth,
                          bool& ok) {
  if (!ok)
    return 0.0;
  if (!(std::isfinite(fa.real()) && std::isfinite(fa.imag()) && std::isfinite(fb.real()) &&
        std::isfinite(fb.imag())) ||
      fa == 0.0 || fb == 0.0) {
    ok = false;
    return 0.0;
  }
  const double d = std::arg(fb / fa);
  if (std::abs(d) <= opt.max_arg_step)
    return d;
  if (depth >= opt.max_refine) {
    ok = false;
    return d;
  }
  const cplx m = 0.5 * (a + b);
  const cplx fm = fn(m);
  return accumulate_segment(fn, a, m, fa, fm, opt, depth + 1, ok) +
         accumulate_segment(fn, m, b, fm, fb, opt, depth + 1, ok);
}

} // namespace detail

/// Number of zeros (minus poles) of `fn` inside `r`, by continuous argument
/// accumulation along the positively oriented boundary.
template <class F>
Winding winding_number(F&& fn, const Rect& r, const WindingOptions& opt = {}) {
  const cplx corners[5] = {{r.re_lo, r.im_lo}, {r.re_hi, r.im_lo}, {r.re_hi, r.im_hi}, {r.re_lo, r.im_hi},
                           {r.re_lo, r.im_lo}};
  bool ok = true;
  double total = 0.0;
  cplx f_start = fn(corners[0]);
  cplx fa = f_start;
  for (int e = 0; e < 4; ++e) {
    const cplx p = corners[e];
    const cplx q = corners[e + 1];
    std::size_t samples = opt.edge_samples;
    if (opt.max_spacing > 0.0)
      samples = std::max(samples, static_cast<std::size_t>(std::ceil(std::abs(q - p) / opt.max_spacing)));
    cplx a = p;
    for (std::size_t i = 1; i <= samples; ++i) {
      const cplx b = (i == samples) ? q : p + (q - p) * (static_cast<double>(i) / samples);
      const cplx fb = (e == 3 && i == samples) ? f_start : fn(b);
      total += detail::accumulate_segment(fn, a, b, fa, fb, opt, 0, ok);
      a = b;
      fa = fb;
    }
  }
  Winding w;
  w.raw = total / (2.0 * std::numbers::pi);
  w.count = static_cast<int>(std::lround(w.raw));
  w.stable = ok && std::abs(w.raw - w.count) < 0.05;
  return w;
}

/// Newton iteration with a central-difference derivative. Converges when the
/// step falls below 1e-14 relative; if evaluation noise stalls it above that,
/// the iterate with the smallest |fn| is returned provided the last step was
/// below 1e-9 relative. Returns nullopt on divergence or non-finite values.
template <class F>
std::optional<cplx> newton_polish(F&& fn, cplx z, double scale, int max_iter = 60) {
  cplx best = z;
  double best_abs = std::numeric_limits<double>::infinity();
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const double h = 1e-6 * std::max(scale, std::abs(z) * 1e-3);
    const cplx fz = fn(z);
    if (fz == 0.0)
      return z;
    if (!std::isfinite(std::abs(fz)))
      return std::nullopt;
    if (std::abs(fz) < best_abs) {
      best_abs = std::abs(fz);
      best = z;
    }
    const cplx d = (fn(z + h) - fn(z - h)) / (2.0 * h);
    if (d == 0.0 || !std::isfinite(std::abs(d)))
      return std::nullopt;
    const cplx step = fz / d;
    z -= step;
    if (!std::isfinite(std::abs(z)))
      return std::nullopt;
    last_step = std::abs(step);
    if (last_step <= 1e-14 * std::max(1.0, std::abs(z)))
      return z;
  }
  if (last_step <= 1e-9 * std::max(1.0, std::abs(best)))
    return best;
  return std::nullopt;
}

struct ComplexZeros {
  std::vector<cplx> roots;
  std::vector<bool> multiple;
  std::vector<Rect> unresolved;
};

namespace detail {

inline constexpr double kSplitFractions[] = {0.5137, 0.4713, 0.5419, 0.4591, 0.5853};

template <class F>
void quadrisect(F& fn, const Rect& r, int count, int depth, int max_depth, const WindingOptions& opt,
                double scale, ComplexZeros& out) {
  if (count <= 0)
    return;
  if (count == 1) {
    const double slack = 1e-6 * std::max(r.width(), r.height());
    if (auto z = newton_polish(fn, r.center(), std::max(r.width(), r.height())); z && r.contains(*z, slack)) {
      out.roots.push_back(*z);
      out.multiple.push_back(false);
      return;
    }
  }
  const double size = std::max(r.width(), r.height());
  if (depth >= max_depth || size < 1e-11 * scale) {
    if (size < 1e-8 * scale) {
      // Cluster smaller than the resolution: report the center with its multiplicity.
      for (int i = 0; i < count; ++i) {
        out.roots.push_back(r.center());
        out.multiple.push_back(count > 1);
      }
    } else {
      out.unresolved.push_back(r);
    }
    return;
  }
  for (double frac : kSplitFractions) {
    const double xs = r.re_lo + frac * r.width();
    const double ys = r.im_lo + (1.0 - frac) * r.height();
    const Rect kids[4] = {{r.re_lo, xs, r.im_lo, ys}, {xs, r.re_hi, r.im_lo, ys}, {r.re_lo, xs, ys, r.im_hi},
                          {xs, r.re_hi, ys, r.im_hi}};
    Winding w[4];
    bool good = true;
    int sum = 0;
    for (int i = 0; i < 4 && good; ++i) {
      w[i] = winding_number(fn, kids[i], opt);
      good = w[i].stable && w[i].count >= 0;
      sum += w[i].count;
    }
    if (!good || sum != count)
      continue;
    for (int i = 0; i < 4; ++i)
      quadrisect(fn, kids[i], w[i].count, depth + 1, max_depth, opt, scale, out);
    return;
  }
  out.unresolved.push_back(r);
}

} // namespace detail

/// All zeros of an analytic `fn` inside `rect`: winding count, recursive
/// quadrisection until each box holds at most one zero, Newton polish.
/// A boundary that passes through a zero is nudged outward.
template <class F>
ComplexZeros find_complex_zeros(F&& fn, Rect rect, int max_depth = 40, const WindingOptions& opt = {}) {
  ComplexZeros out;
  const double scale = std::max({std::abs(rect.re_lo), std::abs(rect.re_hi), std::abs(rect.im_lo),
                                 std::abs(rect.im_hi), rect.width(), rect.height()});
  Winding w = winding_number(fn, rect, opt);
  for (int nudge = 1; nudge <= 4 && !w.stable; ++nudge) {
    const double d = 1e-3 * nudge * std::max(rect.width(), rect.height());
    rect = {rect.re_lo - d, rect.re_hi + 0.7 * d, rect.im_lo - 0.9 * d, rect.im_hi + 1.1 * d};
    w = winding_number(fn, rect, opt);
  }
  if (!w.stable || w.count < 0) {
    out.unresolved.push_back(rect);
    return out;
  }
  detail::quadrisect(fn, rect, w.count, 0, max_depth, opt, scale, out);
  return out;
}

} // namespace voros
