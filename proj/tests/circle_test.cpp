#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "test_support.hpp"
#include "vlp/circle.hpp"

namespace vlp {
namespace {

std::vector<PixelPoint> on_circle(PixelPoint c, double r, int n, double phase = 0.0) {
  std::vector<PixelPoint> pts;
  for (int k = 0; k < n; ++k) {
    const double a = phase + 2 * std::numbers::pi * k / n;
    pts.push_back({c.u + r * std::cos(a), c.v + r * std::sin(a)});
  }
  return pts;
}

TEST(FitCircle, ThreePointExample) {
  // Equidistance: (1,0) is at distance 1 from (0,0), (2,0) and (1,1).
  const std::vector<PixelPoint> pts{{0, 0}, {2, 0}, {1, 1}};
  const CircleFit fit = fit_circle(pts);
  EXPECT_NEAR(fit.center.u, 1.0, 1e-12);
  EXPECT_NEAR(fit.center.v, 0.0, 1e-12);
  EXPECT_NEAR(fit.radius, 1.0, 1e-12);
  EXPECT_LT(fit.rms_residual, 1e-12);
}

TEST(FitCircle, TwelvePointsExact) {
  const CircleFit fit = fit_circle(on_circle({413.2, 295.7}, 50.0, 12));
  EXPECT_NEAR(fit.center.u, 413.2, 1e-9);
  EXPECT_NEAR(fit.center.v, 295.7, 1e-9);
  EXPECT_NEAR(fit.radius, 50.0, 1e-9);
  EXPECT_LT(fit.rms_residual, 1e-9);
}

TEST(FitCircle, DegenerateInputs) {
  auto expect_degenerate = [](std::vector<PixelPoint> pts) {
    try {
      fit_circle(pts);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DegenerateCircle);
    }
  };
  expect_degenerate({{0, 0}, {1, 1}});
  expect_degenerate({});
  expect_degenerate({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  expect_degenerate({{5, 5}, {5, 5}, {5, 5}});
}

TEST(FitCircle, ExactOnAnyCircle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> c(-1000, 1000), r(0.5, 400), phase(0, 6.3);
  std::uniform_int_distribution<int> n(3, 40);
  for (int t = 0; t < 300; ++t) {
    const PixelPoint center{c(rng), c(rng)};
    const double radius = r(rng);
    const CircleFit fit = fit_circle(on_circle(center, radius, n(rng), phase(rng)));
    EXPECT_NEAR(fit.center.u, center.u, 1e-9 * std::max(1.0, radius));
    EXPECT_NEAR(fit.center.v, center.v, 1e-9 * std::max(1.0, radius));
    EXPECT_NEAR(fit.radius, radius, 1e-9 * std::max(1.0, radius));
    EXPECT_LT(fit.rms_residual, 1e-9 * std::max(1.0, radius));
  }
}

TEST(FitCircle, ResidualReflectsNoise) {
  auto pts = on_circle({0, 0}, 10, 4);
  pts[0].u += 1.0;  // (11, 0)
  const CircleFit fit = fit_circle(pts);
  EXPECT_GT(fit.rms_residual, 0.0);
  EXPECT_GE(fit.radius, 0.0);
}

TEST(MinEnclosingCircle, SinglePoint) {
  const std::vector<Vec2> pts{{3, -4}};
  const Circle c = min_enclosing_circle(pts);
  EXPECT_EQ(c.center, (Vec2{3, -4}));
  EXPECT_EQ(c.radius, 0.0);
}

TEST(MinEnclosingCircle, TwoPointsGiveDiameter) {
  const std::vector<Vec2> pts{{0, 0}, {6, 8}};
  const Circle c = min_enclosing_circle(pts);
  EXPECT_NEAR(c.center.x, 3.0, 1e-15);
  EXPECT_NEAR(c.center.y, 4.0, 1e-15);
  EXPECT_NEAR(c.radius, 5.0, 1e-15);
}

TEST(MinEnclosingCircle, EmptyInput) {
  try {
    min_enclosing_circle(std::vector<Vec2>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(MinEnclosingCircle, CollinearAndDuplicatePoints) {
  const std::vector<Vec2> line{{0, 0}, {1, 0}, {5, 0}, {2, 0}, {5, 0}};
  const Circle c = min_enclosing_circle(line);
  EXPECT_NEAR(c.center.x, 2.5, 1e-12);
  EXPECT_NEAR(c.center.y, 0.0, 1e-12);
  EXPECT_NEAR(c.radius, 2.5, 1e-12);
}

TEST(MinEnclosingCircle, MatchesBruteForceOnTwelvePoints) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec2> pts;
  for (int n = 0; n < 12; ++n) pts.push_back({g(rng), g(rng)});
  const Circle fast = min_enclosing_circle(pts);
  const Circle slow = testing::brute_force_enclosing_circle(pts);
  EXPECT_NEAR(fast.radius, slow.radius, 1e-9);
  EXPECT_NEAR(fast.center.x, slow.center.x, 1e-9);
  EXPECT_NEAR(fast.center.y, slow.center.y, 1e-9);
}

TEST(MinEnclosingCircle, ContainsAllAndMatchesOracleUpToFifteenPoints) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(-50, 50);
  std::uniform_int_distribution<int> count(1, 15);
  for (int t = 0; t < 200; ++t) {
    std::vector<Vec2> pts(count(rng));
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    const Circle fast = min_enclosing_circle(pts);
    for (const auto& p : pts) EXPECT_LE(distance(fast.center, p), fast.radius + 1e-9);
    const Circle slow = testing::brute_force_enclosing_circle(pts);
    EXPECT_NEAR(fast.radius, slow.radius, 1e-9);
    EXPECT_NEAR(fast.center.x, slow.center.x, 1e-9);
    EXPECT_NEAR(fast.center.y, slow.center.y, 1e-9);
  }
}

}  // namespace
}  // namespace vlp
