#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wirewall/geometry.hpp"
#include "wirewall/quadrature.hpp"

using namespace wirewall;

namespace {

double weight_sum(const CrossSection& cs, int n) {
  double s = 0.0;
  for (const auto& node : cs.boundary_quadrature(n)) s += node.weight;
  return s;
}

// Arclength of the ellipse (a cos t, b sin t) by direct quadrature of the speed.
double ellipse_perimeter(double a, double b) {
  auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
  return quad::integrate(speed, 0.0, 2.0 * std::numbers::pi, 1e-14).value;
}

}  // namespace

TEST(CrossSection, AnalyticAreasAndDiameters) {
  const auto disc = CrossSection::disc(1.0);
  EXPECT_NEAR(disc.area(), std::numbers::pi, 1e-5);
  EXPECT_NEAR(disc.diameter(), 2.0, 1e-9);
  const auto rect = CrossSection::rectangle(1.0, 2.0);
  EXPECT_NEAR(rect.area(), 8.0, 1e-12);
  EXPECT_NEAR(rect.diameter(), 2.0 * std::sqrt(5.0), 1e-12);
  EXPECT_DOUBLE_EQ(*rect.analytic_area(), 8.0);
}

TEST(CrossSection, UnitEllipseSamplesMatchDisc) {
  const auto e = CrossSection::ellipse(1.0, 1.0).samples();
  const auto d = CrossSection::disc(1.0).samples();
  ASSERT_EQ(e.size(), d.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    EXPECT_NEAR(e[i].y, d[i].y, 1e-12);
    EXPECT_NEAR(e[i].z, d[i].z, 1e-12);
  }
}

TEST(CrossSection, BoundaryIsClosed) {
  for (const auto& cs : {CrossSection::ellipse(2.0, 1.0), CrossSection::rectangle(1.0, 0.5)}) {
    const Vec2 a = cs.point(0.0), b = cs.point(1.0 - 1e-12);
    EXPECT_NEAR(a.y, b.y, 1e-9);
    EXPECT_NEAR(a.z, b.z, 1e-9);
  }
}

TEST(BoundaryQuadrature, DiscCircumference) { EXPECT_NEAR(weight_sum(CrossSection::disc(1.0), 1000), 2.0 * std::numbers::pi, 1e-8); }

TEST(BoundaryQuadrature, EllipsePerimeterMatchesArclengthIntegral) {
  const double ref = ellipse_perimeter(2.0, 1.0);
  EXPECT_NEAR(ref, 9.688448220547675, 1e-10);
  EXPECT_NEAR(weight_sum(CrossSection::ellipse(2.0, 1.0), 2000), ref, 1e-8);
}

TEST(BoundaryQuadrature, SquareNormalsAreAxisAligned) {
  for (const int n : {8, 33, 400}) {
    for (const auto& node : CrossSection::rectangle(1.0, 1.0).boundary_quadrature(n)) {
      EXPECT_NEAR(std::abs(node.normal.y) + std::abs(node.normal.z), 1.0, 1e-15);
      EXPECT_TRUE(node.normal.y == 0.0 || node.normal.z == 0.0);
    }
  }
}

TEST(BoundaryQuadrature, NormalsPointOutward) {
  for (const auto& cs : {CrossSection::ellipse(2.0, 1.0), CrossSection::rectangle(2.0, 1.0)})
    for (const auto& node : cs.boundary_quadrature(256)) {
      EXPECT_GT(node.normal.y * node.point.y + node.normal.z * node.point.z, 0.0);
      const Vec2 out{node.point.y + 1e-6 * node.normal.y, node.point.z + 1e-6 * node.normal.z};
      EXPECT_FALSE(cs.contains(out));
    }
}

TEST(BoundaryQuadrature, NoNodeOnACorner) {
  const auto cs = CrossSection::rectangle(2.0, 1.0);
  for (const auto& node : cs.boundary_quadrature(64))
    EXPECT_FALSE(std::abs(std::abs(node.point.y) - 2.0) < 1e-12 && std::abs(std::abs(node.point.z) - 1.0) < 1e-12);
}

TEST(CrossSection, PolygonShoelaceArea) {
  const auto tri = CrossSection::polygon({{0.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}});
  EXPECT_NEAR(tri.area(), 1.0, 1e-12);
  EXPECT_NEAR(tri.perimeter(), 3.0 + std::sqrt(5.0), 1e-12);
}

TEST(CrossSection, InvalidParametersNameTheParameter) {
  try {
    CrossSection::ellipse(0.0, 1.0);
    FAIL();
  } catch (const InvalidGeometry& e) {
    EXPECT_EQ(e.parameter(), "a");
    EXPECT_TRUE(e.is_user_error());
  }
  try {
    CrossSection::rectangle(1.0, -2.0);
    FAIL();
  } catch (const InvalidGeometry& e) {
    EXPECT_EQ(e.parameter(), "b");
  }
  EXPECT_THROW(CrossSection::disc(std::nan("")), InvalidGeometry);
}

TEST(CrossSection, SelfIntersectingPolygonRejected) {
  EXPECT_THROW(CrossSection::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidGeometry);
}

TEST(CrossSection, InteriorMaskAreaConverges) {
  const auto cs = CrossSection::ellipse(2.0, 1.0);
  double prev = 1e9;
  for (const int n : {16, 64, 256}) {
    const double err = std::abs(cs.interior_grid(n).covered_area() - 2.0 * std::numbers::pi);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.02);
  const auto lat = CrossSection::rectangle(2.0, 1.0).interior_grid(8);
  EXPECT_EQ(lat.ny, 8);
  EXPECT_EQ(lat.nz, 4);
  EXPECT_EQ(lat.active_count(), 32);
}

TEST(CrossSection, KeyValueRoundTrip) {
  for (const auto& cs : {CrossSection::ellipse(2.0, 1.0 / 3.0, 500), CrossSection::disc(0.1),
                         CrossSection::polygon({{0, 0}, {1, 0}, {0.25, 0.75}})}) {
    const auto back = cross_section_from_key_value(to_key_value(cs));
    EXPECT_EQ(back.family(), cs.family());
    EXPECT_EQ(back.params(), cs.params());
    EXPECT_EQ(back.resolution(), cs.resolution());
  }
}

TEST(CrossSection, KeyValueErrorsNameTheKey) {
  try {
    cross_section_from_key_value("family=disc\nparams=1\ncolour=red\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  EXPECT_THROW(cross_section_from_key_value("family=disc\n"), Error);
  EXPECT_THROW(cross_section_from_key_value("family=disc\nparams=1x\n"), Error);
  EXPECT_THROW(cross_section_from_key_value("family=blob\nparams=1\n"), InvalidGeometry);
  EXPECT_NO_THROW(cross_section_from_key_value("# comment\nfamily = disc  \nparams=2 # radius\n\n"));
}

TEST(CrossSection, RotationPreservesAreaAndPerimeter) {
  const auto r = CrossSection::rectangle(2.0, 1.0);
  const auto q = r.rotated(0.3);
  EXPECT_NEAR(q.area(), r.area(), 1e-12);
  EXPECT_NEAR(q.perimeter(), r.perimeter(), 1e-12);
  EXPECT_THROW(CrossSection::disc(1.0).rotated(0.3), Error);
}
