#pragma once

// Planar cross sections of a straight wire: disc, ellipse, rectangle and
// simple polygons, with boundary quadrature and a square-cell interior mask.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wirewall/error.hpp"
#include "wirewall/vec.hpp"

namespace wirewall {

enum class Family { disc, ellipse, rectangle, polygon };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::disc: return "disc";
    case Family::ellipse: return "ellipse";
    case Family::rectangle: return "rectangle";
    case Family::polygon: return "polygon";
  }
  return "unknown";
}

inline std::optional<Family> family_from_string(const std::string& s) {
  if (s == "disc") return Family::disc;
  if (s == "ellipse") return Family::ellipse;
  if (s == "rectangle") return Family::rectangle;
  if (s == "polygon") return Family::polygon;
  return std::nullopt;
}

/// Node of a boundary quadrature rule: arclength weight and outward unit normal.
struct BoundaryNode {
  Vec2 point;
  Vec2 normal;
  double weight{0.0};
};

/// Axis-aligned lattice of square cells covering a cross section. A cell
/// belongs to the section when its center does.
struct InteriorGrid {
  double h{0.0};
  int ny{0};
  int nz{0};
  double y0{0.0};  // lower-left lattice corner
  double z0{0.0};
  std::vector<std::uint8_t> inside;  // index j + ny * k

  int index(int j, int k) const { return j + ny * k; }
  bool is_inside(int j, int k) const {
    return j >= 0 && j < ny && k >= 0 && k < nz && inside[index(j, k)] != 0;
  }
  Vec2 center(int j, int k) const { return {y0 + (j + 0.5) * h, z0 + (k + 0.5) * h}; }
  int active_count() const {
    return static_cast<int>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
  }
  double cell_area() const { return h * h; }
  double covered_area() const { return active_count() * cell_area(); }

  InteriorGrid scaled(double s) const {
    InteriorGrid g = *this;
    g.h *= s;
    g.y0 *= s;
    g.z0 *= s;
    return g;
  }
};

class CrossSection {
 public:
  static CrossSection disc(double r, int resolution = 1024) {
    check_positive("r", r);
    return CrossSection(Family::disc, {r}, {}, resolution);
  }

  static CrossSection ellipse(double a, double b, int resolution = 1024) {
    check_positive("a", a);
    check_positive("b", b);
    return CrossSection(Family::ellipse, {a, b}, {}, resolution);
  }

  /// Rectangle [-a, a] x [-b, b] given by its half-widths.
  static CrossSection rectangle(double a, double b, int resolution = 1024) {
    check_positive("a", a);
    check_positive("b", b);
    return CrossSection(Family::rectangle, {a, b}, {{a, -b}, {a, b}, {-a, b}, {-a, -b}},
                        resolution);
  }

  /// Simple counterclockwise polygon.
  static CrossSection polygon(std::vector<Vec2> vertices, int resolution = 1024) {
    validate_polygon(vertices);
    std::vector<double> flat;
    for (const auto& v : vertices) {
      flat.push_back(v.y);
      flat.push_back(v.z);
    }
    return CrossSection(Family::polygon, std::move(flat), std::move(vertices), resolution);
  }

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  int resolution() const { return resolution_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  bool is_curved() const { return family_ == Family::disc || family_ == Family::ellipse; }

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }
  double diameter() const { return diameter_; }

  /// Closed-form area for the analytic families.
  std::optional<double> analytic_area() const {
    switch (family_) {
      case Family::disc: return std::numbers::pi * params_[0] * params_[0];
      case Family::ellipse: return std::numbers::pi * params_[0] * params_[1];
      case Family::rectangle: return 4.0 * params_[0] * params_[1];
      case Family::polygon: return std::nullopt;
    }
    return std::nullopt;
  }

  /// Boundary curve gamma(t), t in [0, 1), counterclockwise.
  Vec2 point(double t) const {
    t = wrap(t);
    if (is_curved()) {
      const double th = 2.0 * std::numbers::pi * t;
      return {semi_y() * std::cos(th), semi_z() * std::sin(th)};
    }
    const auto [e, s] = locate_edge(t);
    const Vec2& p = vertices_[e];
    const Vec2& q = vertices_[(e + 1) % vertices_.size()];
    return p + (q - p) * s;
  }

  /// gamma'(t); for polygons the per-edge constant derivative.
  Vec2 derivative(double t) const {
    t = wrap(t);
    if (is_curved()) {
      const double w = 2.0 * std::numbers::pi;
      const double th = w * t;
      return {-w * semi_y() * std::sin(th), w * semi_z() * std::cos(th)};
    }
    const auto [e, s] = locate_edge(t);
    (void)s;
    const Vec2 d = vertices_[(e + 1) % vertices_.size()] - vertices_[e];
    return d * (perimeter_ / d.norm());
  }

  /// Outward unit normal at gamma(t).
  Vec2 normal(double t) const {
    const Vec2 d = derivative(t);
    const double n = d.norm();
    return {d.z / n, -d.y / n};
  }

  bool contains(const Vec2& p) const {
    if (is_curved()) {
      const double u = p.y / semi_y(), v = p.z / semi_z();
      return u * u + v * v < 1.0;
    }
    bool in = false;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2& a = vertices_[i];
      const Vec2& b = vertices_[j];
      if ((a.z > p.z) != (b.z > p.z)) {
        const double yc = (b.y - a.y) * (p.z - a.z) / (b.z - a.z) + a.y;
        if (p.y < yc) in = !in;
      }
    }
    return in;
  }

  /// `resolution` equally spaced parameter samples of the boundary.
  std::vector<Vec2> samples() const {
    std::vector<Vec2> out(resolution_);
    for (int i = 0; i < resolution_; ++i) out[i] = point(static_cast<double>(i) / resolution_);
    return out;
  }

  /// Midpoint rule in the boundary parameter. Polygon edges receive nodes in
  /// proportion to their length, so no node ever sits on a corner and the
  /// total count can differ from `n_points` by rounding.
  std::vector<BoundaryNode> boundary_quadrature(int n_points) const {
    if (n_points < 8) throw Error(ErrorKind::domain, "boundary quadrature needs n_points >= 8");
    std::vector<BoundaryNode> nodes;
    if (is_curved()) {
      nodes.reserve(n_points);
      for (int i = 0; i < n_points; ++i) {
        const double t = (i + 0.5) / n_points;
        const Vec2 d = derivative(t);
        const double speed = d.norm();
        nodes.push_back({point(t), {d.z / speed, -d.y / speed}, speed / n_points});
      }
      return nodes;
    }
    const std::size_t nv = vertices_.size();
    for (std::size_t e = 0; e < nv; ++e) {
      const Vec2& p = vertices_[e];
      const Vec2& q = vertices_[(e + 1) % nv];
      const Vec2 d = q - p;
      const double len = d.norm();
      const int ne = std::max(1, static_cast<int>(std::lround(n_points * len / perimeter_)));
      const Vec2 nrm{d.z / len, -d.y / len};
      for (int i = 0; i < ne; ++i) {
        nodes.push_back({p + d * ((i + 0.5) / ne), nrm, len / ne});
      }
    }
    return nodes;
  }

  /// Lattice with `cells_across` square cells along the longer bounding-box side.
  InteriorGrid interior_grid(int cells_across) const {
    if (cells_across < 1) throw Error(ErrorKind::domain, "cells_across must be positive");
    const auto [lo, hi] = bounding_box();
    const double width = hi.y - lo.y, height = hi.z - lo.z;
    InteriorGrid g;
    g.h = std::max(width, height) / cells_across;
    g.ny = std::max(1, static_cast<int>(std::ceil(width / g.h - 1e-9)));
    g.nz = std::max(1, static_cast<int>(std::ceil(height / g.h - 1e-9)));
    g.y0 = 0.5 * (lo.y + hi.y) - 0.5 * g.ny * g.h;
    g.z0 = 0.5 * (lo.z + hi.z) - 0.5 * g.nz * g.h;
    g.inside.assign(static_cast<std::size_t>(g.ny) * g.nz, 0);
    for (int k = 0; k < g.nz; ++k)
      for (int j = 0; j < g.ny; ++j) g.inside[g.index(j, k)] = contains(g.center(j, k)) ? 1 : 0;
    return g;
  }

  std::pair<Vec2, Vec2> bounding_box() const {
    if (is_curved()) return {{-semi_y(), -semi_z()}, {semi_y(), semi_z()}};
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-lo.y, -lo.z};
    for (const auto& v : vertices_) {
      lo = {std::min(lo.y, v.y), std::min(lo.z, v.z)};
      hi = {std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
    return {lo, hi};
  }

  CrossSection scaled(double s) const {
    check_positive("scale", s);
    std::vector<double> p = params_;
    for (auto& v : p) v *= s;
    std::vector<Vec2> verts = vertices_;
    for (auto& v : verts) v = v * s;
    return CrossSection(family_, std::move(p), std::move(verts), resolution_);
  }

  /// Rigid rotation about the origin; rectangles become polygons.
  CrossSection rotated(double angle) const {
    if (is_curved()) throw Error(ErrorKind::domain, "rotation is defined for polygonal sections");
    std::vector<Vec2> verts = vertices_;
    for (auto& v : verts) v = rotate(v, angle);
    return polygon(std::move(verts), resolution_);
  }

 private:
  CrossSection(Family f, std::vector<double> params, std::vector<Vec2> verts, int resolution)
      : family_(f), params_(std::move(params)), vertices_(std::move(verts)), resolution_(resolution) {
    if (resolution_ < 8) throw InvalidGeometry("resolution", "must be at least 8");
    if (!is_curved()) {
      const std::size_t n = vertices_.size();
      edge_start_.resize(n + 1, 0.0);
      double len = 0.0, twice_area = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = vertices_[i];
        const Vec2& q = vertices_[(i + 1) % n];
        len += (q - p).norm();
        edge_start_[i + 1] = len;
        twice_area += p.y * q.z - q.y * p.z;
      }
      for (auto& s : edge_start_) s /= len;
      perimeter_ = len;
      area_ = 0.5 * twice_area;
      diameter_ = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          diameter_ = std::max(diameter_, (vertices_[i] - vertices_[j]).norm());
    } else {
      // Periodic trapezoid rule with exact derivatives: spectrally accurate.
      double a2 = 0.0, len = 0.0;
      for (int i = 0; i < resolution_; ++i) {
        const double t = static_cast<double>(i) / resolution_;
        const Vec2 p = point(t), d = derivative(t);
        a2 += p.y * d.z - p.z * d.y;
        len += d.norm();
      }
      area_ = 0.5 * a2 / resolution_;
      perimeter_ = len / resolution_;
      diameter_ = 2.0 * std::max(semi_y(), semi_z());
    }
    if (!(area_ > 0.0)) throw InvalidGeometry("params", "zero or negative area");
  }

  static void check_positive(const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidGeometry(name, "must be positive and finite");
  }

  static bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
      const double v = (b.y - a.y) * (c.z - a.z) - (b.z - a.z) * (c.y - a.y);
      return (v > 0.0) - (v < 0.0);
    };
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 c) {
      return std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y) && std::min(a.z, b.z) <= c.z &&
             c.z <= std::max(a.z, b.z);
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
  }

  static void validate_polygon(const std::vector<Vec2>& v) {
    const std::size_t n = v.size();
    if (n < 3) throw InvalidGeometry("vertices", "a polygon needs at least 3 vertices");
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % n];
      if (!std::isfinite(p.y) || !std::isfinite(p.z))
        throw InvalidGeometry("vertices", "non-finite coordinate");
      if ((q - p).norm() == 0.0) throw InvalidGeometry("vertices", "repeated vertex");
      twice_area += p.y * q.z - q.y * p.z;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (j == i + 1 || (i == 0 && j == n - 1)) continue;
        if (segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
          throw InvalidGeometry("vertices", "polygon is self-intersecting");
      }
    }
    if (!(twice_area > 0.0))
      throw InvalidGeometry("vertices", "polygon must be counterclockwise with positive area");
  }

  static double wrap(double t) {
    t -= std::floor(t);
    return t >= 1.0 ? 0.0 : t;
  }

  double semi_y() const { return params_[0]; }
  double semi_z() const { return family_ == Family::disc ? params_[0] : params_[1]; }

  std::pair<std::size_t, double> locate_edge(double t) const {
    const auto it = std::upper_bound(edge_start_.begin(), edge_start_.end(), t);
    std::size_t e = static_cast<std::size_t>(std::distance(edge_start_.begin(), it)) - 1;
    e = std::min(e, vertices_.size() - 1);
    const double s = (t - edge_start_[e]) / (edge_start_[e + 1] - edge_start_[e]);
    return {e, s};
  }

  Family family_;
  std::vector<double> params_;
  std::vector<Vec2> vertices_;
  int resolution_;
  std::vector<double> edge_start_;
  double area_{0.0};
  double perimeter_{0.0};
  double diameter_{0.0};
};

/// Builds a cross section from a family tag and a flat parameter list:
/// disc {r}, ellipse {a, b}, rectangle {a, b} (half-widths), polygon {y0, z0, y1, z1, ...}.
inline CrossSection make_cross_section(Family kind, std::span<const double> params,
                                       int resolution = 1024) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw InvalidGeometry("params", std::string(to_string(kind)) + " expects " +
                                          std::to_string(n) + " parameters");
  };
  switch (kind) {
    case Family::disc: need(1); return CrossSection::disc(params[0], resolution);
    case Family::ellipse: need(2); return CrossSection::ellipse(params[0], params[1], resolution);
    case Family::rectangle: need(2); return CrossSection::rectangle(params[0], params[1], resolution);
    case Family::polygon: {
      if (params.size() % 2 != 0) throw InvalidGeometry("vertices", "odd coordinate count");
      std::vector<Vec2> v;
      for (std::size_t i = 0; i < params.size(); i += 2) v.push_back({params[i], params[i + 1]});
      return CrossSection::polygon(std::move(v), resolution);
    }
  }
  throw InvalidGeometry("shape", "unknown family");
}

/// Plain-text block, one `key=value` per line: family, params (comma
/// separated, 17 significant digits) and resolution.
inline std::string to_key_value(const CrossSection& cs) {
  std::ostringstream s;
  s.precision(17);
  s << "family=" << to_string(cs.family()) << "\nparams=";
  for (std::size_t i = 0; i < cs.params().size(); ++i) s << (i ? "," : "") << cs.params()[i];
  s << "\nresolution=" << cs.resolution() << "\n";
  return s.str();
}

/// Inverse of to_key_value. Blank lines and `#` comments are ignored; unknown
/// or missing keys are config errors naming the key.
inline CrossSection cross_section_from_key_value(const std::string& text) {
  std::istringstream in(text);
  std::string line, family;
  std::vector<double> params;
  int resolution = 1024;
  bool has_family = false, has_params = false;
  auto trim = [](std::string v) {
    const auto b = v.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return v.substr(b, v.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::config, "expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    try {
      if (key == "family") {
        family = value;
        has_family = true;
      } else if (key == "params") {
        params.clear();
        std::istringstream vs(value);
        std::string tok;
        while (std::getline(vs, tok, ',')) {
          std::size_t used = 0;
          params.push_back(std::stod(trim(tok), &used));
          if (used != trim(tok).size()) throw std::invalid_argument(tok);
        }
        has_params = true;
      } else if (key == "resolution") {
        std::size_t used = 0;
        resolution = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } else {
        throw Error(ErrorKind::config, "unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::config, "malformed value for '" + key + "': '" + value + "'");
    }
  }
  if (!has_family) throw Error(ErrorKind::config, "missing key 'family'");
  if (!has_params) throw Error(ErrorKind::config, "missing key 'params'");
  const auto kind = family_from_string(family);
  if (!kind) throw InvalidGeometry("family", "unknown family '" + family + "'");
  return make_cross_section(*kind, params, resolution);
}

/// Straight wire d*omega truncated to [x0, x1] for numerics.
struct WireDomain {
  CrossSection cross_section;
  double scale{1.0};
  double x0{-1.0};
  double x1{1.0};
  int axial_cells{1};
  int transverse_cells{1};  // square cells along the longer side of the section

  void validate() const {
    if (!(scale > 0.0)) throw Error(ErrorKind::domain, "wire scale must be positive");
    if (!(x0 < x1)) throw Error(ErrorKind::domain, "x window must satisfy x0 < x1");
    if (axial_cells < 1 || transverse_cells < 1)
      throw Error(ErrorKind::domain, "cell counts must be positive");
  }
  double hx() const { return (x1 - x0) / axial_cells; }
  double scaled_diameter() const { return scale * cross_section.diameter(); }
  double scaled_area() const { return scale * scale * cross_section.area(); }
};

}  // namespace wirewall
