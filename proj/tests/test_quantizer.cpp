#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "voros/ode_oracle.hpp"
#include "voros/quantizer.hpp"

using namespace voros;
using std::numbers::pi;

namespace {

struct QuarticRun {
  QuantizationProblem problem = QuantizationProblem::ode(4.0, 64);
  EntireProduct f;
  ConvergenceReport report;
};

const QuarticRun& quartic() {
  static const QuarticRun run = [] {
    QuarticRun r;
    auto [f, rep] = run_scheme(r.problem);
    r.f = std::move(f);
    r.report = std::move(rep);
    return r;
  }();
  return run;
}

} // namespace

TEST(InitialSequence, PowerLaw) {
  QuantizationProblem q;
  q.level_count = 3;
  q.initial = InitialSpec::power_law(1.0, 4.0 / 3.0);
  const auto seq = initial_sequence(q);
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_DOUBLE_EQ(seq[0], std::pow(0.5, 4.0 / 3.0));
  EXPECT_DOUBLE_EQ(seq[1], std::pow(1.5, 4.0 / 3.0));
  EXPECT_DOUBLE_EQ(seq[2], std::pow(2.5, 4.0 / 3.0));
}

TEST(InitialSequence, ExplicitListPassesThrough) {
  QuantizationProblem q;
  q.level_count = 3;
  q.initial = InitialSpec::explicit_list({3.0, 7.0, 11.0});
  EXPECT_EQ(initial_sequence(q), (std::vector<double>{3.0, 7.0, 11.0}));
}

TEST(InitialSequence, RejectsBadExplicitLists) {
  QuantizationProblem q;
  q.level_count = 2;
  q.initial = InitialSpec::explicit_list({3.0, 2.0});
  EXPECT_THROW(initial_sequence(q), ValidationError);
  q.initial = InitialSpec::explicit_list({3.0, 4.0, 5.0});
  EXPECT_THROW(initial_sequence(q), ValidationError);
  q.initial = InitialSpec::explicit_list({-1.0, 4.0});
  EXPECT_THROW(initial_sequence(q), ValidationError);
}

TEST(InitialSpec, WeylDefaultsForQuartic) {
  const InitialSpec s = InitialSpec::weyl(pi / 3);
  EXPECT_NEAR(s.exponent, 4.0 / 3.0, 1e-14);
  EXPECT_TRUE(s.rhs_compatible());
  EXPECT_FALSE(InitialSpec::power_law(1.0, 0.8).rhs_compatible());
}

TEST(SolveLevel, SingleZeroAtSixtyDegreeRotation) {
  const EntireProduct one = make_product({1.0});
  EXPECT_NEAR(solve_level(one, RotationParams::from_alpha(pi / 6), 0.0, 1), 2.0, 1e-14);
}

TEST(SolveLevel, FixedPointMapsToItself) {
  // With phi = -alpha a single zero satisfies its own condition for any E.
  const double alpha = 0.5;
  const auto rot = RotationParams::from_alpha(alpha, -alpha);
  const EntireProduct f = make_product({2.7});
  EXPECT_NEAR(solve_level(f, rot, -alpha, 1), 2.7, 1e-13);
  EXPECT_LT(quantization_residual(f, rot, -alpha), 1e-15);
}

TEST(SolveLevel, UnreachableTargetIsRangeError) {
  EXPECT_THROW(solve_level(make_product({1.0}), RotationParams::from_alpha(pi / 6), 0.0, 2), RangeError);
}

TEST(SolveLevel, NonPositiveTargetIsDomainError) {
  EXPECT_THROW(solve_level(make_product({1.0}), RotationParams::from_alpha(pi / 6), -pi / 2, 1), DomainError);
}

TEST(VorosStep, SingleLevel) {
  QuantizationProblem q = QuantizationProblem::scheme(pi / 6, 1);
  q.use_tail = false;
  const auto next = voros_step({1.0}, q, std::nullopt);
  ASSERT_EQ(next.size(), 1u);
  EXPECT_NEAR(next[0], 2.0, 1e-14);
}

TEST(QuantizationResidual, SingleFactorArithmetic) {
  const double phase = std::arg(1.0 - std::polar(1.0, -pi / 3));
  const double want = std::abs(phase - pi / 2);
  EXPECT_NEAR(quantization_residual(make_product({1.0}), RotationParams::from_alpha(pi / 6), 0.0), want, 1e-15);
  EXPECT_NEAR(want, pi / 6, 1e-15);
}

TEST(RunScheme, NonConvergenceIsReportedNotThrown) {
  QuantizationProblem q = QuantizationProblem::ode(4.0, 16);
  q.max_iterations = 2;
  auto [f, rep] = run_scheme(q);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 2u);
  EXPECT_EQ(rep.residual_history.size(), 2u);
  EXPECT_GT(rep.residual_history.back(), q.tolerance);
}

TEST(RunScheme, ValidatesProblem) {
  QuantizationProblem q = QuantizationProblem::ode(4.0, 8);
  q.tolerance = 0.0;
  EXPECT_THROW(run_scheme(q), DomainError);
  q.tolerance = 1e-10;
  q.relaxation = 1.5;
  EXPECT_THROW(run_scheme(q), DomainError);
  EXPECT_THROW(QuantizationProblem::scheme(pi / 2, 8), DomainError);
}

TEST(RunScheme, QuarticConvergesWithSmallResidual) {
  const auto& r = quartic();
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, 200u);
  EXPECT_EQ(r.report.residual_history.size(), r.report.iterations);
  EXPECT_LE(r.report.residual_history.back(), r.problem.tolerance);
  EXPECT_LE(r.report.quantization_residual, 10 * r.problem.tolerance);
  const auto& zs = r.f.zeros();
  for (std::size_t i = 1; i < zs.size(); ++i)
    EXPECT_GT(zs[i], zs[i - 1]);
}

TEST(RunScheme, FirstSweepMovesEveryLevel) {
  const auto& r = quartic();
  const auto start = initial_sequence(r.problem);
  const auto law = asymptotic_law(r.problem, start);
  const auto next = voros_step(start, r.problem, law);
  for (std::size_t i = 0; i < start.size(); ++i) {
    EXPECT_TRUE(std::isfinite(next[i]));
    EXPECT_NE(next[i], start[i]);
  }
  EXPECT_GT(r.report.residual_history.front(), 0.0);
}

TEST(RunScheme, ConvergedLevelsAreAFixedPoint) {
  const auto& r = quartic();
  const auto& zs = r.f.zeros();
  for (std::size_t k = 1; k <= zs.size(); ++k)
    EXPECT_NEAR(solve_level(r.f, r.problem.rot, r.problem.rhs_offset(), k), zs[k - 1], 1e-9 * zs[k - 1]);
  const auto law = asymptotic_law(r.problem, initial_sequence(r.problem));
  const auto again = voros_step(zs, r.problem, law);
  EXPECT_LE(max_relative_change(zs, again), 10 * r.problem.tolerance);
}

TEST(RunScheme, ConvergedProductSatisfiesTwoTermEquation) {
  const auto& r = quartic();
  const auto& rot = r.problem.rot;
  const cplx k = rot.phase_factor();
  auto g = [&](double x) {
    return k * eval(r.f, rot.omega_pow(2.0) * x) + std::conj(k) * eval(r.f, rot.omega_pow(-2.0) * x);
  };
  for (std::size_t j = 1; j < r.f.size() / 2; ++j) {
    const double mid = 0.5 * (r.f.zero(j) + r.f.zero(j + 1));
    EXPECT_LT(std::abs(g(r.f.zero(j))), 1e-7 * std::abs(g(mid))) << j;
  }
}

TEST(RunScheme, QuarticLevelsMatchHalfLineOracle) {
  const auto& r = quartic();
  const auto oracle = halfline_dirichlet_spectrum(ODEProblem::make(4.0), 10);
  ASSERT_EQ(oracle.size(), 10u);
  for (std::size_t k = 1; k <= 10; ++k) {
    const double o = oracle.values[k - 1].real();
    EXPECT_NEAR(r.f.zero(k), o, 1e-5 * o) << k;
  }
}

TEST(RunScheme, CubicAngleConverges) {
  const double alpha = 2 * pi / 5;
  auto [f, rep] = run_scheme(QuantizationProblem::scheme(alpha, 48, alpha / 2));
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.quantization_residual, 1e-9);
}

TEST(RunScheme, RelaxationReachesTheSameFixedPoint) {
  QuantizationProblem q = QuantizationProblem::ode(4.0, 16);
  auto [plain, a] = run_scheme(q);
  q.relaxation = 0.6;
  auto [damped, b] = run_scheme(q);
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_LT(max_relative_change(plain.zeros(), damped.zeros()), 1e-8);
}

TEST(RunScheme, ExplicitInitialListUsesFittedLaw) {
  QuantizationProblem q = QuantizationProblem::ode(4.0, 32);
  std::vector<double> start;
  for (int k = 1; k <= 32; ++k)
    start.push_back(q.initial.scale * std::pow(k - 0.5, q.initial.exponent));
  q.initial = InitialSpec::explicit_list(start);
  auto [f, rep] = run_scheme(q);
  EXPECT_TRUE(rep.converged);
  const auto& zs = f.zeros();
  for (std::size_t i = 1; i < zs.size(); ++i)
    EXPECT_GT(zs[i], zs[i - 1]);
}
