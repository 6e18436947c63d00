#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "voros/ode_oracle.hpp"
#include "voros/pipeline.hpp"
#include "voros/quantizer.hpp"
#include "voros/specfun.hpp"

using namespace voros;
using std::numbers::pi;

namespace {

struct Converged {
  RotationParams rot;
  EntireProduct f;
};

Converged converge(QuantizationProblem q) {
  auto [f, rep] = run_scheme(q);
  if (!rep.converged)
    throw std::runtime_error("scheme did not converge");
  return {q.rot, std::move(f)};
}

// m = 4: alpha = pi/3, k = omega^{1/2}.
const Converged& quartic() {
  static const Converged c = converge(QuantizationProblem::ode(4.0, 64));
  return c;
}

// alpha = pi/3 with k = 1.
const Converged& unit_k() {
  static const Converged c = converge(QuantizationProblem::scheme(pi / 3, 64, 0.0));
  return c;
}

cplx naive_product(const std::vector<double>& zeros, cplx x) {
  cplx p = 1.0;
  for (double e : zeros)
    p *= 1.0 - x / e;
  return p;
}

} // namespace

TEST(StokesC, ValueAtOriginIsKPlusInverse) {
  const EntireProduct f = make_product({1.0, 2.0, 5.0});
  EXPECT_NEAR(std::abs(stokes_C(f, RotationParams::from_alpha(0.9), 0.0) - 2.0), 0.0, 1e-12);
  const auto& q = quartic();
  EXPECT_NEAR(std::abs(stokes_C(q.f, q.rot, 0.0) - std::sqrt(3.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(stokes_C(q.f, q.rot, 0.0) - 2.0 * std::cos(q.rot.alpha() / 2)), 0.0, 1e-12);
}

TEST(StokesD, ValueAtOrigin) {
  const auto& u = unit_k();
  EXPECT_NEAR(std::abs(stokes_D(u.f, u.rot, 0.0) - 3.0), 0.0, 1e-12);
  const auto& q = quartic();
  EXPECT_NEAR(std::abs(stokes_D(q.f, q.rot, 0.0) - 2.0), 0.0, 1e-12);
}

TEST(StokesC, PoleGuardAtStoredZero) {
  const auto& q = quartic();
  EXPECT_THROW(stokes_C(q.f, q.rot, q.f.zero(3)), PoleGuardError);
}

TEST(StokesC, LimitModeIsContinuousAtStoredZero) {
  const auto& q = quartic();
  for (std::size_t j : {1u, 5u, 20u}) {
    const double e = q.f.zero(j);
    const cplx at = stokes_C(q.f, q.rot, e, true);
    // The symmetric mean cancels the linear term.
    const cplx mean = 0.5 * (stokes_C(q.f, q.rot, e * (1.0 - 1e-6)) + stokes_C(q.f, q.rot, e * (1.0 + 1e-6)));
    EXPECT_LT(std::abs(at - mean), 1e-7 * std::abs(at)) << j;
  }
}

TEST(StokesD, DirectRouteGuardNamesTheRoute) {
  const auto& q = quartic();
  const cplx x = std::conj(q.rot.omega()) * q.f.zero(2);
  try {
    stokes_D(q.f, q.rot, x, DRoute::direct);
    FAIL() << "expected PoleGuardError";
  } catch (const PoleGuardError& e) {
    EXPECT_NE(std::string(e.what()).find("direct"), std::string::npos);
  }
}

TEST(StokesD, ConjugateSymmetry) {
  const auto& q = quartic();
  for (cplx x : {cplx(2.0, 3.0), cplx(-7.0, 1.5), cplx(15.0, -20.0)}) {
    EXPECT_LT(std::abs(stokes_C(q.f, q.rot, std::conj(x)) - std::conj(stokes_C(q.f, q.rot, x))),
              1e-12 * std::max(1.0, std::abs(stokes_C(q.f, q.rot, x))));
    const cplx d = stokes_D(q.f, q.rot, x, DRoute::conditioned);
    EXPECT_LT(std::abs(stokes_D(q.f, q.rot, std::conj(x), DRoute::conditioned) - std::conj(d)),
              1e-10 * std::max(1.0, std::abs(d)));
  }
}

TEST(StokesD, PositiveAxisExceedsFourForUnitK) {
  const auto& u = unit_k();
  for (int i = 1; i <= 100; ++i) {
    const double x = 0.5 * i;
    EXPECT_GT(stokes_D(u.f, u.rot, x).real() + 1.0, 4.0) << x;
  }
}

TEST(StokesD, RoutesAgreeOnWellConditionedPoints) {
  const auto& q = quartic();
  const SampleStatistic s = route_agreement(q.f, q.rot, q.f.zero(5), 100, 7);
  EXPECT_EQ(s.accepted, 100u);
  EXPECT_LT(s.worst, 1e-8);
}

TEST(IdentityResidual, FiniteProductSatisfiesBothForms) {
  const EntireProduct f = make_product({1.0, 2.0, 5.0});
  const auto unit = RotationParams::from_alpha(0.8);
  const auto general = RotationParams::from_alpha(0.8, 0.3);
  for (cplx x : disk_samples(6.0, 40, 3)) {
    EXPECT_LT(identity_residual(f, unit, x, ThreeTermIdentity::unit_k), 1e-9) << x;
    EXPECT_LT(identity_residual(f, general, x, ThreeTermIdentity::general_k), 1e-9) << x;
  }
  EXPECT_LT(identity_residual(f, general, 0.0, ThreeTermIdentity::general_k), 1e-12);
  EXPECT_LT(identity_residual(f, unit, 0.0, ThreeTermIdentity::unit_k), 1e-12);
}

TEST(IdentityResidual, ConvergedQuarticOnDiskOfRadiusE8) {
  const auto& q = quartic();
  const SampleStatistic s = identity_sample(q.f, q.rot, ThreeTermIdentity::general_k, q.f.zero(8), 100, 11);
  EXPECT_EQ(s.accepted, 100u);
  EXPECT_LT(s.worst, 1e-8);
}

TEST(RealZeros, QuarticZerosOfCAndDAreNegative) {
  const auto& q = quartic();
  const double w = q.f.zero(16);
  const auto c = real_zeros({q.f, q.rot, SpectralKind::C}, -w, -1e-9, 4000);
  const auto d = real_zeros({q.f, q.rot, SpectralKind::D, DRoute::conditioned}, -w, -1e-9, 4000);
  ASSERT_GT(c.size(), 5u);
  ASSERT_GT(d.size(), 10u);
  for (cplx v : c.values)
    EXPECT_LT(v.real(), 0.0);
  for (cplx v : d.values)
    EXPECT_LT(v.real(), 0.0);
}

TEST(RealZeros, SmallestCZeroIsFirstOddParityEigenvalue) {
  const auto& q = quartic();
  const auto c = real_zeros({q.f, q.rot, SpectralKind::C}, -q.f.zero(2), -1e-9, 400);
  ASSERT_GE(c.size(), 1u);
  const double smallest = c.values.back().real();
  const auto oracle = pt_eigenvalues(ODEProblem::make(4.0, 1), 1);
  ASSERT_EQ(oracle.size(), 1u);
  EXPECT_NEAR(-smallest, oracle.values[0].real(), 1e-5 * oracle.values[0].real());
}

TEST(RealZeros, SyntheticProductMatchesGridOracle) {
  const std::vector<double> zs{1.0, 4.0, 9.0};
  const EntireProduct f = make_product(zs);
  for (double alpha : {1.4, pi / 3}) {
    const auto rot = RotationParams::from_alpha(alpha);
    // For real x and k = 1 the zeros of C on (0, 20) are the sign changes of
    // 2 Re f(w^2 x); the zeros of f are poles, not zeros.
    std::vector<double> expected;
    double prev = 1.0;
    for (int i = 1; i <= 200000; ++i) {
      const double x = 1e-4 * i;
      const double n = std::real(naive_product(zs, rot.omega_pow(2.0) * x));
      if (std::signbit(n) != std::signbit(prev))
        expected.push_back(x);
      prev = n;
    }
    const auto set = real_zeros({f, rot, SpectralKind::C, DRoute::product_of_c, true}, 1e-9, 20.0, 2000);
    ASSERT_EQ(set.size(), expected.size()) << alpha << " got " << (set.size() ? set.values[0].real() : 0.0);
    for (std::size_t i = 0; i < expected.size(); ++i)
      EXPECT_NEAR(set.values[i].real(), expected[i], 2e-4);
    if (alpha == 1.4) {
      EXPECT_EQ(set.size(), 0u);
    }
  }
}

TEST(RealZeros, IntervalThroughStoredZeroNeedsLimitMode) {
  const EntireProduct f = make_product({1.0, 4.0, 9.0});
  EXPECT_THROW(real_zeros({f, RotationParams::from_alpha(1.0), SpectralKind::C}, 0.5, 20.0, 100), PoleGuardError);
}

TEST(VerifyProposition, QuarticPassesAllClauses) {
  const auto& q = quartic();
  const PropositionReport r = verify_proposition(q.f, q.rot);
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.clauses.size(), 6u);
  for (const auto& c : r.clauses)
    EXPECT_EQ(c.status, ClauseResult::Status::pass) << c.name << ": " << c.detail;
  for (const auto& a : r.audits) {
    EXPECT_TRUE(a.stable) << a.target;
    EXPECT_EQ(a.observed, a.expected) << a.target;
  }
  EXPECT_TRUE(r.c_zeros.all_real());
  EXPECT_TRUE(r.d_zeros.all_real());
}

TEST(VerifyProposition, CubicAngleSkipsDClauses) {
  const double alpha = 2 * pi / 5;
  const Converged c = converge(QuantizationProblem::scheme(alpha, 48, alpha / 2));
  const PropositionReport r = verify_proposition(c.f, c.rot);
  for (const auto& clause : r.clauses) {
    if (clause.name == "d_zeros_real_negative" || clause.name == "unit_modulus_at_d_zeros") {
      EXPECT_EQ(clause.status, ClauseResult::Status::skipped);
      EXPECT_EQ(clause.detail, "alpha outside (0,pi/3]");
    } else {
      EXPECT_EQ(clause.status, ClauseResult::Status::pass) << clause.name;
    }
  }
}

TEST(VerifyProposition, ToyProductReportsMargins) {
  const EntireProduct f = make_product({1.0, 2.5, 4.0});
  const PropositionReport r = verify_proposition(f, RotationParams::from_alpha(pi / 3), PropositionOptions{3.5});
  ASSERT_EQ(r.clauses.size(), 6u);
  for (const auto& c : r.clauses) {
    if (c.name == "modulus_balance_at_c_zeros" || c.name == "modulus_monotone_in_angle" ||
        c.name == "d_plus_one_exceeds_c0_squared") {
      EXPECT_TRUE(std::isfinite(c.margin)) << c.name;
    }
  }
}

TEST(Witness, ValueAtOriginForUnitK) {
  const auto& u = unit_k();
  const Theorem1Witness w{u.f, u.rot, {}, {}, {}, {}};
  EXPECT_NEAR(std::abs(w(0.0) - (-3.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w.minus_one(0.0) + 1.0 - (-3.0)), 0.0, 1e-12);
}

TEST(Witness, QuarticZerosAndOnePointsLieOnTheRays) {
  const auto& q = quartic();
  const Theorem1Witness w = theorem1_witness(q.f, q.rot, witness_window(q.f, 5));
  std::size_t on_zero_ray = 0, on_side_rays = 0;
  for (const auto& r : w.zero_rays) {
    EXPECT_EQ(r.ray, 0);
    EXPECT_LT(r.deviation, 1e-6);
    on_zero_ray += r.ray == 0 && r.deviation < 1e-6;
  }
  for (const auto& r : w.one_point_rays) {
    EXPECT_EQ(std::abs(r.ray), 1);
    EXPECT_LT(r.deviation, 1e-6);
    on_side_rays += std::abs(r.ray) == 1 && r.deviation < 1e-6;
  }
  EXPECT_GE(on_zero_ray, 5u);
  EXPECT_GE(on_side_rays, 5u);
}

TEST(Witness, RejectsAngleAboveSixtyDegrees) {
  const EntireProduct f = make_product({1.0, 2.0});
  EXPECT_THROW(theorem1_witness(f, RotationParams::from_alpha(0.4 * pi)), DomainError);
}

TEST(ClassifyRay, PicksNearestRay) {
  const double a = pi / 3;
  const auto r0 = classify_ray(cplx(5.0, 1e-9), a);
  EXPECT_EQ(r0.ray, 0);
  EXPECT_NEAR(r0.deviation, 2e-10, 1e-15);
  EXPECT_EQ(classify_ray(std::polar(2.0, a), a).ray, 1);
  EXPECT_EQ(classify_ray(std::polar(2.0, -a + 0.01), a).ray, -1);
}
