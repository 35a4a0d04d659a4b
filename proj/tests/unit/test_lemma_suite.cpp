#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wirewall/lemma_suite.hpp"

using namespace wirewall;

namespace {

// Closed form of the same integral: potential of the rectangle in its own plane.
double rectangle_oracle(double s, double r, double y1, double z1) {
  return kernel::rect_potential(kernel::Rect{0, {0.0, 0.0, 0.0}, s, r}, {0.0, y1, z1});
}

}  // namespace

TEST(BoundCheck, MarginAndTolerance) {
  const auto a = make_check("a", 1.0, 2.0);
  EXPECT_EQ(a.margin(), 1.0);
  EXPECT_TRUE(a.pass());
  EXPECT_FALSE(make_check("b", 2.0, 1.0).pass());
  EXPECT_TRUE(make_check("c", 1.0 + 1e-9, 1.0, 1e-8).pass());
}

TEST(GreenRectangle, PinnedSquareValue) {
  const auto c = green_rectangle_integral(1.0, 1.0, 0.0, 0.0);
  EXPECT_NEAR(c.measured, 8.0 * std::log(1.0 + std::sqrt(2.0)), 1e-10);
  EXPECT_NEAR(c.measured, 7.0510, 1e-4);
  EXPECT_EQ(c.bound, 10.0);
  EXPECT_TRUE(c.pass());
}

TEST(GreenRectangle, MatchesClosedFormAntiderivative) {
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const double s = rng.uniform(0.1, 2.0), r = s * rng.uniform(1.0, 20.0);
    const double y1 = rng.uniform(-3.0, 3.0) * s, z1 = rng.uniform(-3.0, 3.0) * r;
    EXPECT_NEAR(green_rectangle_value(s, r, y1, z1).value, rectangle_oracle(s, r, y1, z1), 1e-9 * (1.0 + r));
  }
}

TEST(GreenRectangle, FarFieldLimit) {
  const double s = 0.5, r = 1.5, D = 2000.0;
  const auto c = green_rectangle_integral(s, r, D, 0.0);
  EXPECT_NEAR(c.measured, 4.0 * s * r / D, 1e-6 * 4.0 * s * r / D);
  EXPECT_GT(c.margin(), 0.9 * c.bound);
  EXPECT_THROW(green_rectangle_value(2.0, 1.0, 0.0, 0.0), Error);
}

TEST(WallLowerBound, SaturatedByOptimalProfile) {
  const double alpha = 1.2;
  const auto f = WallProfile::sample({-15.0, 15.0, 6001}, [&](double x) { return transverse_profile(alpha * alpha, 1.0, 0.7, x); });
  const auto s = wall_lower_bound_sides(f, alpha, 0.5);
  EXPECT_NEAR(s.lhs / s.rhs, 1.0, 1e-3);
  EXPECT_TRUE(wall_lower_bound_check(f, alpha, 0.5).pass());
}

TEST(WallLowerBound, ConstantProfile) {
  const auto f = WallProfile::sample({-1.0, 1.0, 5}, [](double) { return kAxisPlus; });
  const auto c = wall_lower_bound_check(f, 2.0);
  EXPECT_EQ(c.measured, 0.0);
  EXPECT_EQ(c.bound, 0.0);
  EXPECT_TRUE(c.pass());
}

TEST(WallLowerBound, SuboptimalProfilesHaveSlack) {
  const double alpha = 1.0;
  const auto f = WallProfile::sample({-3.0, 3.0, 601}, [](double x) {
    const double t = std::clamp(x / 2.0, -1.0, 1.0) * 0.5 * std::numbers::pi;
    return Vec3{std::sin(t), std::cos(t), 0.0};
  });
  const auto c = wall_lower_bound_check(f, alpha);
  EXPECT_GT(c.margin(), 0.0);
}

TEST(LemmaSuite, DefaultSeedPasses) {
  const auto checks = run_all({});
  EXPECT_FALSE(checks.empty());
  for (const auto& c : checks) EXPECT_TRUE(c.pass()) << c.name << " measured " << c.measured << " bound " << c.bound;
  EXPECT_TRUE(all_pass(checks));
}

TEST(LemmaSuite, CoversEverySet) {
  const auto checks = run_all({});
  for (const char* prefix : {"A1 ", "A2 ", "A3 ", "L31 ", "L32 ", "L33 "}) {
    const auto n = std::count_if(checks.begin(), checks.end(), [&](const BoundCheck& c) { return c.name.rfind(prefix, 0) == 0; });
    EXPECT_GT(n, 0) << prefix;
  }
}

TEST(LemmaSuite, DeterministicAndSelectionIndependent) {
  LemmaSuiteConfig cfg;
  cfg.seed = 42;
  const auto a = run_all(cfg), b = run_all(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].measured, b[i].measured);
    EXPECT_EQ(a[i].bound, b[i].bound);
  }
  cfg.sets = {"A2"};
  const auto only = run_all(cfg);
  std::vector<BoundCheck> sub;
  for (const auto& c : a)
    if (c.name.rfind("A2 ", 0) == 0) sub.push_back(c);
  ASSERT_EQ(only.size(), sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) EXPECT_EQ(only[i].measured, sub[i].measured);
}

TEST(LemmaSuite, EmptySelectionIsVacuous) {
  LemmaSuiteConfig cfg;
  cfg.sets.clear();
  const auto checks = run_all(cfg);
  EXPECT_TRUE(checks.empty());
  EXPECT_TRUE(all_pass(checks));
  cfg.sets = {"B7"};
  EXPECT_THROW(run_all(cfg), Error);
}
