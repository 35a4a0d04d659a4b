#pragma once

// Thick-wire vortex wall on the square wire [-L, L] x [-d, d]^2: the
// boundary-tangential field m~ with (0, m~2, m~3) divergence free inside the
// double cone R_L = {|x| < L max(|y|, |z|) / d}, and the regularized m that
// blends neighbouring sector branches across thin wedges.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wirewall/bound_check.hpp"
#include "wirewall/error.hpp"
#include "wirewall/field3d.hpp"
#include "wirewall/quadrature.hpp"
#include "wirewall/stray_field.hpp"
#include "wirewall/vec.hpp"

namespace wirewall {

struct VortexParams {
  double d{4.0};
  double L{0.0};

  /// L = d^{3/2} sqrt(ln d).
  static VortexParams with_default_length(double d) { return {d, std::pow(d, 1.5) * std::sqrt(std::log(d))}; }

  void validate() const {
    if (!(d >= 1.0)) throw InvalidGeometry("d", "vortex half-width d must be >= 1");
    if (!(L > 0.0)) throw InvalidGeometry("L", "vortex half-length L must be positive");
  }
};

enum class Sector { up, right, bottom, left, cone_exterior };

inline const char* to_string(Sector s) {
  switch (s) {
    case Sector::up: return "up";
    case Sector::right: return "right";
    case Sector::bottom: return "bottom";
    case Sector::left: return "left";
    case Sector::cone_exterior: return "cone-exterior";
  }
  return "unknown";
}

namespace detail {

inline void check_vortex_point(const Vec3& p, const VortexParams& v) {
  const double slack = 1e-12 * v.d;
  if (std::abs(p.y) > v.d + slack || std::abs(p.z) > v.d + slack || std::abs(p.x) > v.L * (1.0 + 1e-12))
    throw Error(ErrorKind::domain, "point lies outside the wire segment");
  if (p.x == 0.0 && p.y == 0.0 && p.z == 0.0) throw Error(ErrorKind::singularity, "the vortex field is singular at the origin");
}

// Quarter turns k with R^k taking the up sector onto the point's sector,
// R(y, z) = (z, -y).
inline int quarter_turns(Sector s) { return static_cast<int>(s); }

// R^{-k}(y, z).
inline Vec2 to_up_frame(double y, double z, int k) {
  for (int i = 0; i < k; ++i) {
    const double t = y;
    y = -z;
    z = t;
  }
  return {y, z};
}

// Applies (u, v) -> (v, -u) k times to the transverse components.
inline Vec3 from_up_frame(Vec3 m, int k) {
  for (int i = 0; i < k; ++i) {
    const double t = m.y;
    m.y = m.z;
    m.z = -t;
  }
  return m;
}

inline double vortex_angle(double x, double z, const VortexParams& v) {
  return std::numbers::pi * v.d * x / (2.0 * v.L * z);
}

inline double wedge_angle(double y, double z, const VortexParams& v) {
  return std::numbers::pi * v.d * (z - y) / (2.0 * z);
}

inline bool in_up_wedge(double y, double z, const VortexParams& v) { return y >= (v.d - 1.0) * z / v.d; }

}  // namespace detail

/// Sector of a point of the segment; up and bottom own the diagonals |y| = |z|.
inline Sector region_of(const Vec3& p, const VortexParams& v) {
  v.validate();
  const double r = std::max(std::abs(p.y), std::abs(p.z));
  if (std::abs(p.x) * v.d >= v.L * r) return Sector::cone_exterior;
  if (p.z > 0.0 && p.z >= std::abs(p.y)) return Sector::up;
  if (p.z < 0.0 && -p.z >= std::abs(p.y)) return Sector::bottom;
  return p.y > 0.0 ? Sector::right : Sector::left;
}

/// m~: (sin a, cos a, 0) with a = pi d x / (2 L z) on the up sector, rotated
/// copies on the other three, (sign x, 0, 0) outside the cone.
inline Vec3 tilde_m(const Vec3& p, const VortexParams& v) {
  detail::check_vortex_point(p, v);
  const Sector s = region_of(p, v);
  if (s == Sector::cone_exterior) return {p.x > 0.0 ? 1.0 : -1.0, 0.0, 0.0};
  const int k = detail::quarter_turns(s);
  const Vec2 q = detail::to_up_frame(p.y, p.z, k);
  const double a = detail::vortex_angle(p.x, q.z, v);
  return detail::from_up_frame({std::sin(a), std::cos(a), 0.0}, k);
}

/// The blended wedge formula of the up sector,
/// (sin a, cos a sin b, -cos a cos b) with b = pi d (z - y) / (2 z),
/// evaluated without any region test (needs z != 0).
inline Vec3 wedge_formula(const Vec3& p, const VortexParams& v) {
  if (p.z == 0.0) throw Error(ErrorKind::singularity, "wedge formula needs z != 0");
  const double a = detail::vortex_angle(p.x, p.z, v);
  const double b = detail::wedge_angle(p.y, p.z, v);
  return {std::sin(a), std::cos(a) * std::sin(b), -std::cos(a) * std::cos(b)};
}

/// Regularized field: m~ except on the four wedges (d-1) z / d <= y <= z of
/// the up sector and its rotated copies, where the wedge formula joins the
/// neighbouring branches continuously.
inline Vec3 regularized_m(const Vec3& p, const VortexParams& v) {
  detail::check_vortex_point(p, v);
  const Sector s = region_of(p, v);
  if (s == Sector::cone_exterior) return {p.x > 0.0 ? 1.0 : -1.0, 0.0, 0.0};
  const int k = detail::quarter_turns(s);
  const Vec2 q = detail::to_up_frame(p.y, p.z, k);
  if (!detail::in_up_wedge(q.y, q.z, v)) {
    const double a = detail::vortex_angle(p.x, q.z, v);
    return detail::from_up_frame({std::sin(a), std::cos(a), 0.0}, k);
  }
  return detail::from_up_frame(wedge_formula({p.x, q.y, q.z}, v), k);
}

// ---------------------------------------------------------------------------
// Energies by quadrature over the sectors

namespace detail {

// 4 \int_{up sector of R_L} g(x, y, z) with y = z s, x = (L z / d) t, using
// Gauss rules in z, t and in s split at the wedge boundary.
template <class G>
double sector_integral(const VortexParams& v, G&& g, int order = 16) {
  const auto& q = quad::gauss(order);
  const double sw = (v.d - 1.0) / v.d;
  double total = 0.0;
  for (int iz = 0; iz < order; ++iz) {
    const double z = 0.5 * v.d * (1.0 + q.nodes[iz]);
    const double wz = 0.5 * v.d * q.weights[iz];
    const double xmax = v.L * z / v.d;
    double slab = 0.0;
    for (const auto& [s0, s1] : {std::pair{-1.0, sw}, std::pair{sw, 1.0}}) {
      for (int is = 0; is < order; ++is) {
        const double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * q.nodes[is];
        const double ws = 0.5 * (s1 - s0) * q.weights[is];
        double line = 0.0;
        for (int it = 0; it < order; ++it) line += q.weights[it] * g(xmax * q.nodes[it], z * s, z);
        slab += ws * line;
      }
    }
    total += wz * slab * z * xmax;  // dy dx = z ds * xmax dt
  }
  return 4.0 * total;
}

inline double grad_a_sq(double x, double z, const VortexParams& v) {
  const double c = std::numbers::pi * v.d / (2.0 * v.L * z);
  return c * c * (1.0 + x * x / (z * z));
}

inline double grad_b_sq(double y, double z, const VortexParams& v) {
  const double c = std::numbers::pi * v.d / (2.0 * z);
  return c * c * (1.0 + y * y / (z * z));
}

}  // namespace detail

/// \int |grad m~|^2 over the open sectors (jumps across the diagonals ignored).
inline double formal_exchange_tilde(const VortexParams& v, int order = 16) {
  v.validate();
  return detail::sector_integral(v, [&](double x, double, double z) { return detail::grad_a_sq(x, z, v); }, order);
}

/// \int |grad m|^2 for the regularized field.
inline double exchange_regularized(const VortexParams& v, int order = 16) {
  v.validate();
  return detail::sector_integral(
      v,
      [&](double x, double y, double z) {
        double e = detail::grad_a_sq(x, z, v);
        if (detail::in_up_wedge(y, z, v)) {
          const double c = std::cos(detail::vortex_angle(x, z, v));
          e += c * c * detail::grad_b_sq(y, z, v);
        }
        return e;
      },
      order);
}

/// ||m - m~||^2 in L^2 of the segment.
inline double l2_difference_sq(const VortexParams& v, int order = 16) {
  v.validate();
  return detail::sector_integral(
      v,
      [&](double x, double y, double z) {
        if (!detail::in_up_wedge(y, z, v)) return 0.0;
        const Vec3 w = wedge_formula({x, y, z}, v);
        const double a = detail::vortex_angle(x, z, v);
        return (w - Vec3{std::sin(a), std::cos(a), 0.0}).norm2();
      },
      order);
}

// ---------------------------------------------------------------------------
// Grid evaluation and bounds

struct VortexGridOptions {
  int cells_across{16};
  int threads{1};
  std::size_t max_faces{100000};
};

inline WireGridPtr vortex_grid(const VortexParams& v, const VortexGridOptions& opt) {
  v.validate();
  if (opt.cells_across < 2) throw Error(ErrorKind::config, "cells_across must be >= 2");
  const double h = 2.0 * v.d / opt.cells_across;
  const int nx = std::max(1, static_cast<int>(std::lround(2.0 * v.L / h)));
  return make_wire_grid({CrossSection::rectangle(1.0, 1.0), v.d, -v.L, v.L, nx, opt.cells_across});
}

struct VortexReport {
  VortexParams params;
  int nx{0};
  int cells_across{0};
  std::size_t faces{0};
  double exchange_formal_tilde{0.0};
  double exchange_m{0.0};
  double exchange_m_grid{0.0};  // finite differences on the cell grid, for reference
  double mag_tilde{0.0};
  double mag_m{0.0};
  double l2_diff_sq{0.0};
  std::vector<BoundCheck> checks;

  double energy() const { return exchange_m + mag_m; }
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
};

inline double vortex_energy_bound(double d) { return 150.0 * std::pow(d, 2.5) * std::sqrt(std::log(d)); }

inline VortexReport verify_bounds(const VortexParams& v, const VortexGridOptions& opt = {}) {
  v.validate();
  const WireGridPtr grid = vortex_grid(v, opt);
  const StrayField sf(grid, {EndFaces::continuation, opt.threads, opt.max_faces});
  const Field3D ft = Field3D::sample(grid, [&](double x, double y, double z) { return tilde_m({x, y, z}, v); });
  const Field3D fm = Field3D::sample(grid, [&](double x, double y, double z) { return regularized_m({x, y, z}, v); });

  VortexReport r;
  r.params = v;
  r.nx = grid->nx();
  r.cells_across = opt.cells_across;
  r.faces = sf.face_count();
  r.exchange_formal_tilde = formal_exchange_tilde(v);
  r.exchange_m = exchange_regularized(v);
  r.exchange_m_grid = exchange_energy(fm);
  r.mag_tilde = sf.energy(ft);
  r.mag_m = sf.energy(fm);
  r.l2_diff_sq = l2_difference_sq(v);

  const double d = v.d, L = v.L, pi2 = std::numbers::pi * std::numbers::pi;
  const double diff_bound = 16.0 * d * L + 16.0 * std::sqrt(5.0) * d * d * std::sqrt(d * std::log(L));
  r.checks.push_back(make_check("E_mag(m~) <= 20 d^4 (1 + ln(L/d)) / L", r.mag_tilde,
                                20.0 * std::pow(d, 4) * (1.0 + std::log(L / d)) / L));
  r.checks.push_back(
      make_check("E_ex_formal(m~) <= 4 pi^2 (d^2/L + L)", r.exchange_formal_tilde, 4.0 * pi2 * (d * d / L + L)));
  r.checks.push_back(make_check("|E_mag(m) - E_mag(m~)| <= 16 d L + 16 sqrt(5) d^2 sqrt(d ln L)",
                                std::abs(r.mag_m - r.mag_tilde), diff_bound));
  r.checks.push_back(make_check("||m - m~||^2 <= 16 d L + 16 sqrt(5) d^2 sqrt(d ln L)", r.l2_diff_sq, diff_bound));
  r.checks.push_back(make_check("|E_ex_formal(m~) - E_ex(m)| <= 2 pi^2 d L + pi^2 L / d",
                                std::abs(r.exchange_formal_tilde - r.exchange_m), 2.0 * pi2 * d * L + pi2 * L / d));
  r.checks.push_back(make_check("E(m) <= 150 d^2.5 sqrt(ln d)", r.energy(), vortex_energy_bound(d)));
  return r;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::domain, "slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw Error(ErrorKind::domain, "slope fit needs positive data");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace wirewall
