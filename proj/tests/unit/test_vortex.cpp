#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wirewall/random.hpp"
#include "wirewall/vortex.hpp"

using namespace wirewall;

namespace {

const double kPi = std::numbers::pi;

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

// Random point of the segment away from the sector diagonals and the cone surface.
Vec3 generic_point(Rng& rng, const VortexParams& v) {
  for (;;) {
    const Vec3 p{rng.uniform(-v.L, v.L), rng.uniform(-v.d, v.d), rng.uniform(-v.d, v.d)};
    const double r = std::max(std::abs(p.y), std::abs(p.z));
    if (std::abs(std::abs(p.y) - std::abs(p.z)) > 1e-3 && std::abs(std::abs(p.x) * v.d - v.L * r) > 1e-3) return p;
  }
}

}  // namespace

TEST(Vortex, SectorExamples) {
  const auto v = VortexParams::with_default_length(4.0);
  EXPECT_EQ(region_of({0, 0, 2}, v), Sector::up);
  EXPECT_EQ(region_of({0, 2, 0}, v), Sector::right);
  EXPECT_EQ(region_of({0, 0, -2}, v), Sector::bottom);
  EXPECT_EQ(region_of({0, -2, 0}, v), Sector::left);
  EXPECT_EQ(region_of({v.L, 0, 0}, v), Sector::cone_exterior);
  EXPECT_EQ(region_of({-v.L, 0, 0}, v), Sector::cone_exterior);
  EXPECT_EQ(region_of({0, 1, 1}, v), Sector::up);
  EXPECT_EQ(region_of({0, 1, -1}, v), Sector::bottom);
  EXPECT_STREQ(to_string(Sector::cone_exterior), "cone-exterior");
}

TEST(Vortex, TildeExamples) {
  const auto v = VortexParams::with_default_length(4.0);
  expect_vec_near(tilde_m({0, 0, v.d / 2}, v), {0, 1, 0}, 1e-15);
  expect_vec_near(tilde_m({v.L * (v.d / 2) / v.d, 0, v.d / 2}, v), {1, 0, 0}, 1e-15);
  expect_vec_near(tilde_m({-v.L, 0.5, 0.5}, v), {-1, 0, 0}, 0.0);
}

TEST(Vortex, WedgeFormulaOnTheAxis) {
  for (const double d : {4.0, 5.5}) {
    const auto v = VortexParams::with_default_length(d);
    expect_vec_near(wedge_formula({0, 0, 1.3}, v), {0, std::sin(kPi * d / 2), -std::cos(kPi * d / 2)}, 1e-14);
  }
}

TEST(Vortex, FieldsAreUnitVectors) {
  Rng rng(1);
  const auto v = VortexParams::with_default_length(8.0);
  for (int i = 0; i < 500; ++i) {
    const Vec3 p = generic_point(rng, v);
    EXPECT_NEAR(tilde_m(p, v).norm(), 1.0, 1e-14);
    EXPECT_NEAR(regularized_m(p, v).norm(), 1.0, 1e-14);
  }
}

TEST(Vortex, TildeIsTangentialOnTheWireSurface) {
  const auto v = VortexParams::with_default_length(4.0);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-v.L, v.L), t = rng.uniform(-v.d, v.d);
    EXPECT_NEAR(tilde_m({x, v.d, t}, v).y, 0.0, 1e-15);
    EXPECT_NEAR(tilde_m({x, t, -v.d}, v).z, 0.0, 1e-15);
  }
}

TEST(Vortex, RegularizedIsContinuousAcrossWedgeFaces) {
  const auto v = VortexParams::with_default_length(4.0);
  Rng rng(3);
  const double eps = 1e-9;
  for (int i = 0; i < 100; ++i) {
    const double z = rng.uniform(0.2, v.d), x = rng.uniform(-0.9, 0.9) * v.L * z / v.d;
    const double yw = (v.d - 1.0) * z / v.d;
    expect_vec_near(regularized_m({x, yw - eps, z}, v), regularized_m({x, yw + eps, z}, v), 1e-7);
    expect_vec_near(regularized_m({x, z - eps, z}, v), regularized_m({x, z + eps, z}, v), 1e-7);
  }
}

TEST(Vortex, QuarterTurnEquivariance) {
  const auto v = VortexParams::with_default_length(8.0);
  Rng rng(4);
  auto turn = [](Vec3 m) { return Vec3{m.x, m.z, -m.y}; };
  for (int i = 0; i < 200; ++i) {
    const Vec3 p = generic_point(rng, v);
    const Vec3 q{p.x, p.z, -p.y};
    expect_vec_near(tilde_m(q, v), turn(tilde_m(p, v)), 1e-12);
    expect_vec_near(regularized_m(q, v), turn(regularized_m(p, v)), 1e-12);
  }
}

TEST(Vortex, PointErrors) {
  const auto v = VortexParams::with_default_length(4.0);
  try {
    regularized_m({0, 0, 0}, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singularity);
  }
  try {
    tilde_m({0, 5.0, 0}, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
  EXPECT_THROW(VortexParams::with_default_length(0.5).validate(), InvalidGeometry);
}

TEST(Vortex, FormalExchangeClosedForm) {
  for (const double d : {4.0, 8.0, 16.0}) {
    const auto v = VortexParams::with_default_length(d);
    const double exact = 4.0 * kPi * kPi * (d * d / v.L + v.L / 3.0);
    EXPECT_NEAR(formal_exchange_tilde(v), exact, 1e-10 * exact);
  }
}

TEST(Vortex, WedgeExchangeClosedForm) {
  // Inside the wedge cos^2 a integrates to half the x extent and |grad b|^2 is polynomial in y/z.
  for (const double d : {4.0, 8.0, 16.0}) {
    const auto v = VortexParams::with_default_length(d);
    const double sw = (d - 1.0) / d;
    const double extra = kPi * kPi * d * d * v.L * (1.0 / d + (1.0 - sw * sw * sw) / 3.0);
    const double exact = 4.0 * kPi * kPi * (d * d / v.L + v.L / 3.0) + extra;
    EXPECT_NEAR(exchange_regularized(v), exact, 1e-10 * exact);
  }
}

TEST(Vortex, DifferenceNormClosedForm) {
  for (const double d : {4.0, 8.0}) {
    const auto v = VortexParams::with_default_length(d);
    const double exact = 8.0 * v.L * d * (kPi - 2.0) / (3.0 * kPi);
    EXPECT_NEAR(l2_difference_sq(v), exact, 1e-10 * exact);
  }
}

TEST(Vortex, AxialComponentIsMonotoneOnTheGrid) {
  const auto v = VortexParams::with_default_length(4.0);
  const auto g = vortex_grid(v, {});
  const auto f = Field3D::sample(g, [&](double x, double y, double z) { return tilde_m({x, y, z}, v); });
  for (int i = 0; i + 1 < g->nx(); ++i)
    for (int c = 0; c < g->cells_per_slice(); ++c) EXPECT_GE(f.at(i + 1, c).x, f.at(i, c).x - 1e-12);
  const auto avg = average_profile(f);
  for (int i = 0; i < g->nx(); ++i) EXPECT_NEAR(avg.mean[i].x + avg.mean[g->nx() - 1 - i].x, 0.0, 1e-12);
}

TEST(Vortex, PoincareHoldsSlicewise) {
  const auto v = VortexParams::with_default_length(4.0);
  const auto g = vortex_grid(v, {});
  const auto f = Field3D::sample(g, [&](double x, double y, double z) { return tilde_m({x, y, z}, v); });
  const double cp = calibrate_poincare_constant(g->slice(), g->domain().scaled_diameter());
  for (const auto& s : poincare_check(f, cp)) EXPECT_LE(s.lhs, s.rhs + 1e-12);
}

TEST(Vortex, BoundsAtDFour) {
  const auto r = verify_bounds(VortexParams::with_default_length(4.0));
  EXPECT_EQ(r.checks.size(), 6u);
  for (const auto& c : r.checks) EXPECT_TRUE(c.pass()) << c.name << " " << c.measured << " " << c.bound;
  EXPECT_LE(r.faces, 100000u);
  EXPECT_GT(r.mag_m, 0.0);
}

TEST(Vortex, GridRespectsFaceLimit) {
  EXPECT_THROW(verify_bounds(VortexParams::with_default_length(16.0), {64, 1, 100000}), Error);
}

TEST(Vortex, LogLogSlope) {
  const std::vector<double> x{2.0, 4.0, 8.0}, y{3.0 * std::pow(2.0, 2.5), 3.0 * std::pow(4.0, 2.5), 3.0 * std::pow(8.0, 2.5)};
  EXPECT_NEAR(loglog_slope(x, y), 2.5, 1e-12);
  EXPECT_THROW(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}
