#pragma once

// End-to-end checks on a quantized spectrum: the Proposition clauses,
// sampled functional identities, the Theorem 1 witness, and comparison with
// the ODE oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "voros/errors.hpp"
#include "voros/io.hpp"
#include "voros/ode_oracle.hpp"
#include "voros/product.hpp"
#include "voros/roots.hpp"
#include "voros/rotation.hpp"
#include "voros/specfun.hpp"

namespace voros {

inline constexpr double kIdentityTolerance = 1e-8;
inline constexpr double kRouteTolerance = 1e-8;
inline constexpr double kConstantTolerance = 1e-12;
inline constexpr double kRayTolerance = 1e-6;

namespace detail {

inline ClauseResult bound_clause(std::string name, double worst, double tol, std::optional<cplx> witness = {}) {
  ClauseResult c{std::move(name)};
  c.margin = tol - worst;
  c.status = worst <= tol ? ClauseResult::Status::pass : ClauseResult::Status::fail;
  c.witness = witness;
  return c;
}

inline ClauseResult skipped_clause(std::string name, std::string reason) {
  ClauseResult c{std::move(name)};
  c.status = ClauseResult::Status::skipped;
  c.detail = std::move(reason);
  return c;
}

/// Points classified onto one of `rays` within kRayTolerance; passes when
/// every point does and at least `required` were found.
inline ClauseResult ray_clause(std::string name, const std::vector<RayClassification>& points,
                               std::initializer_list<int> rays, std::size_t required) {
  ClauseResult c{std::move(name)};
  std::size_t good = 0;
  double worst = 0.0;
  bool stray = false;
  for (const auto& p : points) {
    const bool on_ray = std::find(rays.begin(), rays.end(), p.ray) != rays.end();
    if (on_ray && p.deviation < kRayTolerance)
      ++good;
    else
      stray = true;
    if (!on_ray || p.deviation >= worst) {
      worst = on_ray ? p.deviation : std::numeric_limits<double>::infinity();
      c.witness = p.point;
    }
  }
  c.margin = kRayTolerance - worst;
  c.detail = std::to_string(good) + " of " + std::to_string(points.size()) + " on the expected rays, " +
             std::to_string(required) + " required";
  c.status = !stray && good >= required ? ClauseResult::Status::pass : ClauseResult::Status::fail;
  return c;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Theorem 1 witness

/// A radius past E_j, j = ceil(points/2) + 1, a quarter of the way to E_{j+1}.
/// The D-zeros interlace the stored zeros twice over and the C-zeros once,
/// each C-zero giving two 1-points, so `points` of each lie inside.
inline double witness_window(const EntireProduct& f, std::size_t points) {
  if (f.size() == 0)
    throw DomainError("product has no stored zeros");
  if (f.size() == 1)
    return f.zero(1);
  const std::size_t j = std::min((points + 1) / 2 + 1, f.size() - 1);
  return f.zero(j) + 0.25 * (f.zero(j + 1) - f.zero(j));
}

struct WitnessSummary {
  Theorem1Witness witness;
  double window = 0.0;
  std::size_t required = 0;
  ClauseResult zeros_clause;
  ClauseResult one_points_clause;

  bool passed() const {
    return zeros_clause.status == ClauseResult::Status::pass && one_points_clause.status == ClauseResult::Status::pass;
  }
  bool empty() const { return witness.zeros.size() == 0 && witness.one_points.size() == 0; }
};

/// Locates the witness zeros and 1-points within `window` (0 picks
/// witness_window(f, points)) and checks their rays.
inline WitnessSummary witness_summary(const EntireProduct& f, const RotationParams& rot, std::size_t points,
                                      double window = 0.0) {
  if (window <= 0.0)
    window = witness_window(f, points);
  WitnessSummary s{theorem1_witness(f, rot, window), window, points, {}, {}};
  s.zeros_clause = detail::ray_clause("witness_zeros_on_ray_0", s.witness.zero_rays, {0}, points);
  s.one_points_clause = detail::ray_clause("witness_one_points_on_rays_pm1", s.witness.one_point_rays, {-1, 1}, points);
  return s;
}

// ---------------------------------------------------------------------------
// Verification report

struct VerifyOptions {
  /// Proposition search radius; 0 picks E_{N/2}.
  double window = 0.0;
  /// Witness search radius; 0 picks witness_window(f, witness_points).
  double witness_window = 0.0;
  std::size_t witness_points = 5;
  /// Random points for the identity and route checks, drawn from |x| <= E_8.
  std::size_t samples = 100;
  std::uint64_t seed = 1;
};

struct ReportEntry {
  std::string section;
  ClauseResult clause;
};

struct VerificationReport {
  std::vector<ReportEntry> entries;
  PropositionReport proposition;
  std::optional<WitnessSummary> witness;
  double sample_radius = 0.0;
  SampleStatistic identity;
  std::optional<SampleStatistic> identity_unit;
  SampleStatistic routes;

  /// Pass iff every non-skipped entry passes.
  bool passed() const {
    return std::none_of(entries.begin(), entries.end(),
                        [](const ReportEntry& e) { return e.clause.status == ClauseResult::Status::fail; });
  }
};

inline VerificationReport verify_spectrum(const EntireProduct& f, const RotationParams& rot,
                                          const VerifyOptions& opt = {}) {
  VerificationReport r;
  PropositionOptions popt;
  popt.window = opt.window;
  r.proposition = verify_proposition(f, rot, popt);
  for (const auto& c : r.proposition.clauses)
    r.entries.push_back({"proposition", c});

  const cplx k = rot.phase_factor();
  const double c0_expected = 2.0 * std::cos(rot.phase_offset());
  const double c0_error = std::abs(stokes_C(f, rot, 0.0) - c0_expected);
  r.entries.push_back({"constants", detail::bound_clause("c_at_zero_equals_k_plus_inverse", c0_error, kConstantTolerance)});
  const double d0_error = std::abs(stokes_D(f, rot, 0.0) - (c0_expected * c0_expected - 1.0));
  r.entries.push_back({"constants", detail::bound_clause("d_at_zero_equals_c0_squared_minus_one", d0_error, kConstantTolerance)});

  r.sample_radius = f.zero(std::min<std::size_t>(8, f.size()));
  r.identity = identity_sample(f, rot, ThreeTermIdentity::general_k, r.sample_radius, opt.samples, opt.seed);
  r.entries.push_back({"identities", detail::bound_clause("three_term_identity_general_k", r.identity.worst,
                                                          kIdentityTolerance, r.identity.witness)});
  if (std::abs(k - 1.0) <= kConstantTolerance) {
    r.identity_unit = identity_sample(f, rot, ThreeTermIdentity::unit_k, r.sample_radius, opt.samples, opt.seed + 1);
    r.entries.push_back({"identities", detail::bound_clause("three_term_identity_unit_k", r.identity_unit->worst,
                                                            kIdentityTolerance, r.identity_unit->witness)});
  } else {
    r.entries.push_back({"identities", detail::skipped_clause("three_term_identity_unit_k", "phase factor k != 1")});
  }
  r.routes = route_agreement(f, rot, r.sample_radius, opt.samples, opt.seed + 2);
  ClauseResult routes = detail::bound_clause("d_route_agreement", r.routes.worst, kRouteTolerance, r.routes.witness);
  routes.detail = std::to_string(r.routes.accepted) + " well-conditioned points of " + std::to_string(r.routes.tried);
  if (r.routes.accepted < opt.samples)
    routes.status = ClauseResult::Status::fail;
  r.entries.push_back({"identities", routes});

  if (rot.alpha() <= std::numbers::pi / 3.0 + 1e-15) {
    r.witness = witness_summary(f, rot, opt.witness_points, opt.witness_window);
    r.entries.push_back({"witness", r.witness->zeros_clause});
    r.entries.push_back({"witness", r.witness->one_points_clause});
  } else {
    for (const char* name : {"witness_zeros_on_ray_0", "witness_one_points_on_rays_pm1"})
      r.entries.push_back({"witness", detail::skipped_clause(name, "alpha outside (0,pi/3]")});
  }
  return r;
}

inline json to_json(const ClauseResult& c) {
  json j{{"name", c.name}, {"status", to_string(c.status)}, {"margin", margin_json(c.margin)}};
  j["witness"] = c.witness ? complex_json(*c.witness) : json(nullptr);
  if (!c.detail.empty())
    j["detail"] = c.detail;
  return j;
}

inline json to_json(const std::vector<RayClassification>& rays) {
  json out = json::array();
  for (const auto& r : rays)
    out.push_back(json{{"re", r.point.real()}, {"im", r.point.imag()}, {"ray", r.ray}, {"deviation", r.deviation}});
  return out;
}

inline json to_json(const VerificationReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["verdict"] = r.passed() ? "pass" : "fail";
  json clauses = json::array();
  for (const auto& e : r.entries) {
    json c = to_json(e.clause);
    c["section"] = e.section;
    clauses.push_back(c);
  }
  j["clauses"] = clauses;
  j["window"] = r.proposition.window;
  j["c_zeros"] = to_json(r.proposition.c_zeros);
  j["d_zeros"] = to_json(r.proposition.d_zeros);
  json audits = json::array();
  for (const auto& a : r.proposition.audits)
    audits.push_back(json{{"target", a.target},
                          {"rect", {a.rect.re_lo, a.rect.re_hi, a.rect.im_lo, a.rect.im_hi}},
                          {"expected", a.expected},
                          {"observed", a.observed},
                          {"stable", a.stable},
                          {"passed", a.passed()}});
  j["audits"] = audits;
  json ids{{"radius", r.sample_radius},
           {"general_k", {{"max_residual", r.identity.worst}, {"samples", r.identity.accepted}}},
           {"route_agreement",
            {{"max_relative_difference", r.routes.worst}, {"accepted", r.routes.accepted}, {"tried", r.routes.tried}}}};
  if (r.identity_unit)
    ids["unit_k"] = {{"max_residual", r.identity_unit->worst}, {"samples", r.identity_unit->accepted}};
  j["identities"] = ids;
  if (r.witness)
    j["witness"] = json{{"window", r.witness->window},
                        {"zeros", to_json(r.witness->witness.zero_rays)},
                        {"one_points", to_json(r.witness->witness.one_point_rays)}};
  else
    j["witness"] = nullptr;
  j["sign_convention"] = kSignConventionNote;
  return j;
}

// ---------------------------------------------------------------------------
// Comparison with the ODE oracle

struct CrosscheckRow {
  std::string quantity;
  std::size_t index = 0;
  double scheme = 0.0;
  double oracle = 0.0;
  double relative_delta = 0.0;
};

struct CrosscheckReport {
  std::vector<CrosscheckRow> rows;
  double rtol = 0.0;
  double window = 0.0;
  /// Fewer values than requested were available on one side.
  bool partial = false;
  std::vector<std::string> notes;

  bool within_tolerance() const {
    return std::all_of(rows.begin(), rows.end(), [&](const CrosscheckRow& r) { return r.relative_delta <= rtol; });
  }
};

/// Checks that a spectrum at angle alpha belongs to the oscillator with exponent m.
inline void require_consistent_exponent(double alpha, double m) {
  if (!(std::abs(alpha - RotationParams::alpha_for_exponent(m)) <= 1e-12))
    throw DomainError("alpha=" + format_double(alpha) + " is not 2 pi/(m+2) for m=" + format_double(m));
}

namespace detail {

inline void compare(CrosscheckReport& report, const std::string& quantity, const std::vector<double>& scheme,
                    const EigenvalueSet& oracle, std::size_t count) {
  const std::size_t n = std::min(scheme.size(), oracle.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double o = oracle.values[i].real();
    report.rows.push_back({quantity, i + 1, scheme[i], o, std::abs(scheme[i] - o) / std::abs(o)});
  }
  if (n < count) {
    report.partial = true;
    report.notes.push_back(quantity + ": compared " + std::to_string(n) + " of " + std::to_string(count));
  }
}

/// Negative real zeros of C or D inside [-window, 0), mapped to the paper's
/// convention and sorted increasingly.
inline std::vector<double> paper_eigenvalues(const SpectralFunction& fn, const ODEProblem& prob, double window,
                                             std::size_t count) {
  const double step = grid_step(fn.base, 16.0);
  const auto cells = static_cast<std::size_t>(std::ceil(window / step));
  const EigenvalueSet set = real_zeros(fn, -window, -1e-9 * window, cells);
  std::vector<double> out;
  for (cplx v : set.values)
    out.push_back(convention_map(prob, v, MapDirection::internal_to_paper).real());
  std::sort(out.begin(), out.end());
  if (out.size() > count)
    out.resize(count);
  return out;
}

} // namespace detail

/// Compares (a) the stored levels with the half-line Dirichlet spectrum,
/// (b) the D-zeros with the l = 2 eigenvalues and (c) the C-zeros with the
/// l = 1 eigenvalues, `count` of each. The scheme side searches up to
/// `window` (0 picks a radius just past E_{count+1}, capped at E_{N/2}).
inline CrosscheckReport crosscheck(const EntireProduct& f, const RotationParams& rot, double m, std::size_t count,
                                   double rtol, double window = 0.0, const OracleOptions& oopt = {}) {
  if (count < 1)
    throw DomainError("count must be >= 1");
  require_consistent_exponent(rot.alpha(), m);
  const ODEProblem prob = ODEProblem::make(m, 1);
  CrosscheckReport report;
  report.rtol = rtol;
  if (window <= 0.0) {
    const std::size_t cap = std::max<std::size_t>(1, f.size() / 2);
    window = count + 1 <= cap ? detail::mid_gap(f, f.zero(count + 1)) : detail::default_window(f);
  }
  report.window = window;

  std::vector<double> levels(f.zeros().begin(), f.zeros().begin() + std::min(count, f.size()));
  detail::compare(report, "levels", levels, halfline_dirichlet_spectrum(prob, levels.size(), 1e4, oopt), count);

  const auto d = detail::paper_eigenvalues({f, rot, SpectralKind::D, DRoute::conditioned}, prob, window, count);
  if (!d.empty())
    detail::compare(report, "d_zeros", d, pt_eigenvalues(prob.with_ell(2), d.size(), 1e4, oopt), count);
  else
    detail::compare(report, "d_zeros", d, EigenvalueSet{}, count);

  const auto c = detail::paper_eigenvalues({f, rot, SpectralKind::C}, prob, window, count);
  if (!c.empty())
    detail::compare(report, "c_zeros", c, pt_eigenvalues(prob.with_ell(1), c.size(), 1e4, oopt), count);
  else
    detail::compare(report, "c_zeros", c, EigenvalueSet{}, count);
  return report;
}

inline json to_json(const CrosscheckReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"quantity", row.quantity},
                        {"index", row.index},
                        {"scheme", row.scheme},
                        {"oracle", row.oracle},
                        {"relative_delta", row.relative_delta}});
  return json{{"schema_version", kSchemaVersion},
              {"rtol", r.rtol},
              {"window", r.window},
              {"rows", rows},
              {"partial", r.partial},
              {"notes", r.notes},
              {"within_tolerance", r.within_tolerance()},
              {"sign_convention", kSignConventionNote}};
}

} // namespace voros
