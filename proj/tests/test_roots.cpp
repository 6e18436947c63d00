#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "voros/roots.hpp"
#include "voros/specfun.hpp"

using namespace voros;
using std::numbers::pi;

TEST(RealRoots, SignChangesOfSine) {
  const auto roots = real_roots_on_grid([](double x) { return std::sin(x); }, uniform_grid(0.5, 10.0, 97));
  ASSERT_EQ(roots.size(), 3u);
  for (int k = 1; k <= 3; ++k)
    EXPECT_NEAR(roots[k - 1], k * pi, 1e-11 * k * pi);
}

TEST(RealRoots, RefineMeetsRelativeTolerance) {
  auto fn = [](double x) { return x * x - 2.0; };
  const double r = refine_real_root(fn, 1.0, 2.0, fn(1.0), fn(2.0), 1e-14);
  EXPECT_NEAR(r, std::sqrt(2.0), 4e-14);
}

TEST(Winding, CountsPolynomialZeros) {
  auto fn = [](cplx z) { return (z - cplx(0.3, 0.2)) * (z + cplx(0.5, -0.1)) * (z - cplx(2.0, 2.0)); };
  const Winding w = winding_number(fn, Rect{-1.0, 1.0, -1.0, 1.0});
  EXPECT_TRUE(w.stable);
  EXPECT_EQ(w.count, 2);
  EXPECT_NEAR(w.raw, 2.0, 1e-9);
}

TEST(Winding, PoleCountsNegative) {
  const Winding w = winding_number([](cplx z) { return 1.0 / (z - 0.25); }, Rect{-1.0, 1.0, -1.0, 1.0});
  EXPECT_TRUE(w.stable);
  EXPECT_EQ(w.count, -1);
}

TEST(ComplexZeros, LinearProxy) {
  const auto set = complex_zeros([](cplx z) { return z - cplx(2.0, 1.0); }, Rect{0.0, 4.0, 0.0, 2.0});
  ASSERT_EQ(set.size(), 1u);
  EXPECT_LT(std::abs(set.values[0] - cplx(2.0, 1.0)), 1e-12);
  EXPECT_FALSE(set.partial);
}

TEST(ComplexZeros, QuadraticProxyWithRootsAtPlusMinusI) {
  const auto set = complex_zeros([](cplx z) { return z * z + 1.0; }, Rect{-1.0, 1.0, -2.0, 2.0});
  ASSERT_EQ(set.size(), 2u);
  EXPECT_LT(std::abs(set.values[0] - cplx(0.0, -1.0)), 1e-12);
  EXPECT_LT(std::abs(set.values[1] - cplx(0.0, 1.0)), 1e-12);
  EXPECT_FALSE(set.real_flags[0]);
}

TEST(ComplexZeros, ClusterOfFiveRoots) {
  const std::vector<cplx> roots{{0.1, 0.1}, {0.15, 0.1}, {-0.7, 0.4}, {0.5, -0.8}, {1.2, 0.0}};
  auto fn = [&](cplx z) {
    cplx p = 1.0;
    for (cplx r : roots)
      p *= z - r;
    return p;
  };
  const auto set = complex_zeros(fn, Rect{-1.3, 1.7, -1.1, 1.4});
  ASSERT_EQ(set.size(), roots.size());
  for (cplx r : roots) {
    double best = 1e300;
    for (cplx v : set.values)
      best = std::min(best, std::abs(v - r));
    EXPECT_LT(best, 1e-10) << r;
  }
}

TEST(ComplexZeros, BoundaryThroughZeroIsNudged) {
  const auto set = complex_zeros([](cplx z) { return z - cplx(1.0, 0.5); }, Rect{0.0, 1.0, 0.0, 1.0});
  ASSERT_EQ(set.size(), 1u);
  EXPECT_LT(std::abs(set.values[0] - cplx(1.0, 0.5)), 1e-12);
}

TEST(NewtonPolish, ConvergesOnSimpleRoot) {
  const auto z = newton_polish([](cplx x) { return std::exp(x) - 2.0; }, cplx(0.6, 0.1), 1.0);
  ASSERT_TRUE(z.has_value());
  EXPECT_LT(std::abs(*z - std::log(2.0)), 1e-14);
}

TEST(EigenvalueSet, SortsByRealPartAndFlagsReality) {
  EigenvalueSet set;
  set.push(cplx(3.0, 0.0));
  set.push(cplx(1.0, 0.5));
  set.push(cplx(2.0, 1e-9));
  set.sort();
  EXPECT_EQ(set.values[0], cplx(1.0, 0.5));
  EXPECT_FALSE(set.real_flags[0]);
  EXPECT_TRUE(set.real_flags[1]);
  EXPECT_TRUE(set.real_flags[2]);
  EXPECT_FALSE(set.all_real());
}

TEST(RealityTolerance, ScalesWithMagnitude) {
  EXPECT_TRUE(is_real(cplx(1e4, 5e-3)));
  EXPECT_FALSE(is_real(cplx(1e4, 2e-2)));
  EXPECT_TRUE(is_real(cplx(0.1, 9e-7)));
}
