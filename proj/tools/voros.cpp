// voros: quantize spectra, verify them, and compare with the ODE oracle.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "voros/errors.hpp"
#include "voros/io.hpp"
#include "voros/ode_oracle.hpp"
#include "voros/pipeline.hpp"
#include "voros/quantizer.hpp"
#include "voros/specfun.hpp"

namespace {

using namespace voros;

enum Exit : int {
  kPass = 0,
  kTolerance = 1,
  kNoConvergence = 2,
  kPartial = 3,
  kUsage = 64,
  kDomain = 65,
  kMalformed = 66,
  kNumeric = 70,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g_command_line;

Provenance provenance(json parameters) { return {g_command_line, utc_timestamp(), std::move(parameters)}; }

// ---------------------------------------------------------------------------
// quantize

struct QuantizeArgs {
  std::optional<double> m;
  std::optional<double> alpha;
  std::size_t levels = 64;
  double tol = 1e-10;
  std::size_t max_iter = 200;
  std::string mode;
  std::string out;
  std::optional<double> init_scale;
  std::optional<double> init_exponent;
  double relaxation = 1.0;
  std::size_t tail_window = 0;
  bool no_tail = false;
};

int run_quantize(const QuantizeArgs& a) {
  if (a.m.has_value() == a.alpha.has_value())
    throw UsageError("exactly one of --m and --alpha is required");
  const double alpha = a.m ? RotationParams::alpha_for_exponent(*a.m) : *a.alpha;
  if (!(alpha > 0.0 && alpha < std::numbers::pi / 2))
    throw DomainError("alpha=" + format_double(alpha) + " outside (0, pi/2)");
  const std::string mode = !a.mode.empty() ? a.mode : (a.m ? "ode" : "voros");
  const double offset = mode == "ode" ? alpha / 2.0 : 0.0;

  QuantizationProblem q = QuantizationProblem::scheme(alpha, a.levels, offset);
  q.tolerance = a.tol;
  q.max_iterations = a.max_iter;
  q.relaxation = a.relaxation;
  q.use_tail = !a.no_tail;
  q.tail_window = a.tail_window;
  if (a.init_scale || a.init_exponent)
    q.initial = InitialSpec::power_law(a.init_scale.value_or(q.initial.scale),
                                       a.init_exponent.value_or(q.initial.exponent));
  if (!q.initial.rhs_compatible())
    throw DomainError("initial power law must have exponent > 1");

  auto [f, report] = run_scheme(q);

  SpectrumFile s;
  s.alpha = alpha;
  s.phase_offset = offset;
  if (a.m)
    s.m = *a.m;
  else if (mode == "ode")
    s.m = RotationParams::exponent_for_alpha(alpha);
  s.levels = f.zeros();
  s.tail = f.tail();
  s.residual = report.quantization_residual;
  s.iterations = report.iterations;
  s.converged = report.converged;
  s.provenance = provenance(json{{"mode", mode},
                                 {"levels", a.levels},
                                 {"tolerance", a.tol},
                                 {"max_iterations", a.max_iter},
                                 {"relaxation", a.relaxation},
                                 {"tail", q.use_tail},
                                 {"tail_window", tail_window_for(q, a.levels)},
                                 {"initial", report.initial},
                                 {"residual_history", report.residual_history}});
  save_spectrum(a.out, s);

  std::cout << "alpha " << format_double(alpha) << ", phase offset " << format_double(offset) << ", " << a.levels
            << " levels\n"
            << (report.converged ? "converged" : "not converged") << " after " << report.iterations
            << " sweeps, last change "
            << (report.residual_history.empty() ? 0.0 : report.residual_history.back())
            << ", quantization residual " << report.quantization_residual << '\n'
            << "wrote " << a.out << '\n';
  return report.converged ? kPass : kNoConvergence;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string in;
  double window = 0.0;
  double witness_window = 0.0;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::string report;
};

int run_verify(const VerifyArgs& a) {
  const SpectrumFile s = load_spectrum(a.in);
  VerifyOptions opt;
  opt.window = a.window;
  opt.witness_window = a.witness_window;
  opt.samples = a.samples;
  opt.seed = a.seed;
  const VerificationReport r = verify_spectrum(s.product(), s.rotation(), opt);

  for (const auto& e : r.entries) {
    std::cout << std::left << std::setw(8) << to_string(e.clause.status) << std::setw(12) << e.section
              << std::setw(40) << e.clause.name;
    if (e.clause.status != ClauseResult::Status::skipped)
      std::cout << " margin " << e.clause.margin;
    if (!e.clause.detail.empty())
      std::cout << "  (" << e.clause.detail << ")";
    std::cout << '\n';
  }
  std::cout << "C zeros " << r.proposition.c_zeros.size() << ", D zeros " << r.proposition.d_zeros.size()
            << " in window " << r.proposition.window << '\n'
            << "verdict: " << (r.passed() ? "pass" : "fail") << '\n';

  if (!a.report.empty()) {
    json j = to_json(r);
    j["input"] = {{"path", a.in}, {"alpha", s.alpha}, {"phase_offset", s.phase_offset}, {"levels", s.levels.size()}};
    j["provenance"] = to_json(provenance(json{{"window", a.window},
                                              {"witness_window", a.witness_window},
                                              {"samples", a.samples},
                                              {"seed", a.seed},
                                              {"input_provenance", to_json(s.provenance)}}));
    write_json(a.report, j);
  }
  return r.passed() ? kPass : kTolerance;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
  double m = 4.0;
  int ell = 1;
  std::optional<std::size_t> count;
  std::optional<double> lambda;
  double lambda_im = 0.0;
  std::string what = "spectrum";
  std::vector<double> rect;
  double limit = 1e4;
  bool internal = false;
};

int run_oracle(const OracleArgs& a) {
  const ODEProblem prob = ODEProblem::make(a.m, a.ell);
  const auto out_map = [&](cplx paper) {
    return a.internal ? convention_map(prob, paper, MapDirection::paper_to_internal) : paper;
  };

  if (a.what == "spectrum" || a.what == "halfline" || a.what == "complex") {
    if (a.lambda)
      throw UsageError("--lambda applies to --what C0|D0|f");
    EigenvalueSet set;
    if (a.what == "complex") {
      if (a.rect.size() != 4)
        throw UsageError("--what complex needs --rect re_lo re_hi im_lo im_hi");
      set = pt_eigenvalues_complex(prob, Rect{a.rect[0], a.rect[1], a.rect[2], a.rect[3]});
    } else {
      const std::size_t count = a.count.value_or(5);
      if (count < 1)
        throw UsageError("--count must be at least 1");
      if (a.what == "spectrum") {
        set = pt_eigenvalues(prob, count, a.limit);
      } else {
        // Half-line zeros are positive internally, negative in the paper's convention.
        set = halfline_dirichlet_spectrum(prob, count, a.limit);
        for (cplx& v : set.values)
          v = convention_map(prob, v, MapDirection::internal_to_paper);
      }
    }
    // Keep the oracle's level order; the sign map would reverse a sort.
    for (cplx& v : set.values)
      v = out_map(v);
    write_csv(std::cout, set);
    if (set.partial) {
      std::cerr << "warning: search window exhausted or unresolved boxes; result is partial\n";
      return kPartial;
    }
    return kPass;
  }

  if (!a.lambda)
    throw UsageError("--what " + a.what + " needs --lambda");
  if (a.count)
    throw UsageError("--count applies to --what spectrum|halfline");
  const cplx given{*a.lambda, a.lambda_im};
  const cplx paper = a.internal ? convention_map(prob, given, MapDirection::internal_to_paper) : given;
  cplx value;
  if (a.what == "C0")
    value = stokes_C0(prob, paper);
  else if (a.what == "D0")
    value = stokes_D0(prob, paper);
  else if (a.what == "f")
    value = determinant_f(prob, convention_map(prob, paper, MapDirection::paper_to_internal));
  else
    throw UsageError("unknown --what '" + a.what + "'");
  std::cout << "re,im\n" << format_double(value.real()) << ',' << format_double(value.imag()) << '\n';
  return kPass;
}

// ---------------------------------------------------------------------------
// crosscheck

struct CrosscheckArgs {
  std::string in;
  std::optional<double> m;
  std::size_t count = 8;
  double rtol = 1e-5;
  double window = 0.0;
  std::string report;
};

int run_crosscheck(const CrosscheckArgs& a) {
  const SpectrumFile s = load_spectrum(a.in);
  if (!a.m && !s.m)
    throw UsageError("--m is required when the spectrum file records no exponent");
  const double m = a.m.value_or(s.m.value_or(0.0));
  if (a.m && s.m && std::abs(*a.m - *s.m) > 1e-12)
    throw DomainError("--m differs from the exponent recorded in the file");
  const CrosscheckReport r = crosscheck(s.product(), s.rotation(), m, a.count, a.rtol, a.window);

  std::cout << "quantity,index,scheme,oracle,relative_delta\n";
  for (const auto& row : r.rows)
    std::cout << row.quantity << ',' << row.index << ',' << format_double(row.scheme) << ','
              << format_double(row.oracle) << ',' << row.relative_delta << '\n';
  for (const auto& note : r.notes)
    std::cerr << "partial: " << note << '\n';
  if (!a.report.empty()) {
    json j = to_json(r);
    j["input"] = a.in;
    j["provenance"] = to_json(provenance(json{{"m", m}, {"count", a.count}, {"rtol", a.rtol}, {"window", r.window}}));
    write_json(a.report, j);
  }
  if (!r.within_tolerance()) {
    std::cerr << "relative delta above rtol " << a.rtol << '\n';
    return kTolerance;
  }
  return r.partial ? kPartial : kPass;
}

// ---------------------------------------------------------------------------
// theorem1

struct Theorem1Args {
  std::string in;
  std::optional<double> alpha;
  std::size_t points = 5;
  double window = 0.0;
  std::string out_csv;
};

void write_ray_rows(std::ostream& os, const std::vector<RayClassification>& rays, const char* kind,
                    std::size_t& index) {
  for (const auto& r : rays)
    os << ++index << ',' << format_double(r.point.real()) << ',' << format_double(r.point.imag()) << ",specfun,"
       << kind << ',' << r.ray << ',' << r.deviation << '\n';
}

int run_theorem1(const Theorem1Args& a) {
  if (a.alpha && !(*a.alpha > 0.0 && *a.alpha <= std::numbers::pi / 3.0 + 1e-15))
    throw DomainError("alpha outside (0, pi/3]");
  if (a.in.empty())
    throw UsageError("--in is required");
  const SpectrumFile s = load_spectrum(a.in);
  if (a.alpha && std::abs(*a.alpha - s.alpha) > 1e-12)
    throw DomainError("--alpha differs from the spectrum file");
  if (!(s.alpha <= std::numbers::pi / 3.0 + 1e-15))
    throw DomainError("alpha outside (0, pi/3]");

  const WitnessSummary w = witness_summary(s.product(), s.rotation(), a.points, a.window);

  std::ofstream file;
  if (!a.out_csv.empty()) {
    file.open(a.out_csv);
    if (!file)
      throw Error("cannot write '" + a.out_csv + "'");
  }
  std::ostream& os = a.out_csv.empty() ? std::cout : file;
  os << kCsvHeader << ",kind,ray,deviation\n";
  std::size_t index = 0;
  write_ray_rows(os, w.witness.zero_rays, "zero", index);
  write_ray_rows(os, w.witness.one_point_rays, "one_point", index);

  std::cerr << "window " << w.window << ": " << w.zeros_clause.detail << " (zeros); " << w.one_points_clause.detail
            << " (1-points)\n";
  if (w.empty()) {
    std::cerr << "warning: no witness zeros or 1-points in the window\n";
    return kPartial;
  }
  if (w.passed())
    return kPass;
  const auto stray = [](const std::vector<RayClassification>& rays, std::initializer_list<int> ok) {
    for (const auto& r : rays)
      if (std::find(ok.begin(), ok.end(), r.ray) == ok.end() || r.deviation >= kRayTolerance)
        return true;
    return false;
  };
  if (stray(w.witness.zero_rays, {0}) || stray(w.witness.one_point_rays, {-1, 1}))
    return kTolerance;
  std::cerr << "warning: fewer than " << a.points << " points located; widen --window\n";
  return kPartial;
}

} // namespace

int main(int argc, char** argv) {
  g_command_line = join_command_line(argc, argv);

  CLI::App app{"Exact quantization spectra, Stokes functions and ODE cross-checks"};
  app.require_subcommand(1);
  std::function<int()> action;

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "Run the quantization scheme and write a spectrum file");
  auto* m_opt = quantize->add_option("--m", qa.m, "Oscillator exponent; alpha = 2 pi/(m+2)");
  auto* alpha_opt = quantize->add_option("--alpha", qa.alpha, "Rotation angle in (0, pi/2)");
  m_opt->excludes(alpha_opt);
  quantize->add_option("--levels", qa.levels, "Number of stored levels")->capture_default_str();
  quantize->add_option("--tol", qa.tol, "Relative change that ends the iteration")->capture_default_str();
  quantize->add_option("--max-iter", qa.max_iter, "Sweep limit")->capture_default_str();
  quantize->add_option("--mode", qa.mode, "voros (offset 0) or ode (offset alpha/2)")
      ->check(CLI::IsMember({"voros", "ode"}));
  quantize->add_option("--out", qa.out, "Spectrum file to write")->required();
  quantize->add_option("--init-scale", qa.init_scale, "Initial power-law scale c in c (k-1/2)^p");
  quantize->add_option("--init-exponent", qa.init_exponent, "Initial power-law exponent p");
  quantize->add_option("--relaxation", qa.relaxation, "Damping factor in (0, 1]")->capture_default_str();
  quantize->add_option("--tail-window", qa.tail_window, "Trailing levels used for the tail (0: automatic)");
  quantize->add_flag("--no-tail", qa.no_tail, "Truncate the product at the stored levels");
  quantize->callback([&] { action = [&] { return run_quantize(qa); }; });

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check the Proposition, identities and witness on a spectrum file");
  verify->add_option("--in", va.in, "Spectrum file")->required();
  verify->add_option("--window", va.window, "Search radius (0: E_{N/2})");
  verify->add_option("--witness-window", va.witness_window, "Witness search radius (0: automatic)");
  verify->add_option("--samples", va.samples, "Random points for the identity checks")->capture_default_str();
  verify->add_option("--seed", va.seed, "Seed for the random points")->capture_default_str();
  verify->add_option("--report", va.report, "Write the JSON report here");
  verify->callback([&] { action = [&] { return run_verify(va); }; });

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Evaluate the ODE shooting oracle");
  oracle->add_option("--m", oa.m, "Oscillator exponent, >= 2")->capture_default_str();
  oracle->add_option("--ell", oa.ell, "Boundary index l")->check(CLI::IsMember({1, 2}))->capture_default_str();
  auto* count_opt = oracle->add_option("--count", oa.count, "Number of eigenvalues");
  auto* lambda_opt = oracle->add_option("--lambda", oa.lambda, "Evaluation point (real part)");
  count_opt->excludes(lambda_opt);
  oracle->add_option("--lambda-im", oa.lambda_im, "Evaluation point (imaginary part)");
  oracle->add_option("--what", oa.what, "spectrum, halfline, complex, C0, D0 or f")
      ->check(CLI::IsMember({"spectrum", "halfline", "complex", "C0", "D0", "f"}))
      ->capture_default_str();
  oracle->add_option("--rect", oa.rect, "Search rectangle for --what complex: re_lo re_hi im_lo im_hi")
      ->expected(4);
  oracle->add_option("--limit", oa.limit, "Upper end of the real eigenvalue scan")->capture_default_str();
  oracle->add_flag("--internal", oa.internal, "Use the internal variable s = -lambda for input and output");
  oracle->callback([&] { action = [&] { return run_oracle(oa); }; });

  CrosscheckArgs ca;
  auto* cross = app.add_subcommand("crosscheck", "Compare a spectrum file with the ODE oracle");
  cross->add_option("--in", ca.in, "Spectrum file")->required();
  cross->add_option("--m", ca.m, "Oscillator exponent (defaults to the one in the file)");
  cross->add_option("--count", ca.count, "Values compared per quantity")->capture_default_str();
  cross->add_option("--rtol", ca.rtol, "Relative tolerance")->capture_default_str();
  cross->add_option("--window", ca.window, "Scheme-side search radius (0: automatic)");
  cross->add_option("--report", ca.report, "Write the JSON report here");
  cross->callback([&] { action = [&] { return run_crosscheck(ca); }; });

  Theorem1Args ta;
  auto* thm = app.add_subcommand("theorem1", "Locate the witness zeros and 1-points and classify their rays");
  thm->add_option("--in", ta.in, "Spectrum file");
  thm->add_option("--alpha", ta.alpha, "Expected rotation angle, in (0, pi/3]");
  thm->add_option("--points", ta.points, "Points required on each ray family")->capture_default_str();
  thm->add_option("--window", ta.window, "Search radius (0: automatic)");
  thm->add_option("--out-csv", ta.out_csv, "CSV destination (default stdout)");
  thm->callback([&] { action = [&] { return run_theorem1(ta); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "malformed input: " << e.what() << '\n';
    return kMalformed;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const voros::Error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
}
