#pragma once

// Randomized numerical checks of the lemma inequalities, reported as BoundChecks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "wirewall/bound_check.hpp"
#include "wirewall/demag_matrix.hpp"
#include "wirewall/error.hpp"
#include "wirewall/field3d.hpp"
#include "wirewall/minimize3d.hpp"
#include "wirewall/quadrature.hpp"
#include "wirewall/random.hpp"
#include "wirewall/stray_field.hpp"
#include "wirewall/vortex.hpp"
#include "wirewall/wall_profiles.hpp"

namespace wirewall {

// ---------------------------------------------------------------------------
// Logarithmic-kernel integral over a rectangle

namespace detail {

// \int_0^|U| \int_0^|V| dy dz / |(y, z)| with the sign of U V, in polar
// coordinates about the corner: \int R(theta) d theta.
inline quad::Estimate corner_integral(double u, double v, double tol) {
  const double au = std::abs(u), av = std::abs(v);
  if (au == 0.0 || av == 0.0) return {};
  const double split = std::atan2(av, au);
  const auto a = quad::integrate([&](double t) { return au / std::cos(t); }, 0.0, split, 0.5 * tol);
  const auto b = quad::integrate([&](double t) { return av / std::sin(t); }, split, 0.5 * std::numbers::pi, 0.5 * tol);
  const double sign = (u < 0.0) == (v < 0.0) ? 1.0 : -1.0;
  return {sign * (a.value + b.value), a.error + b.error};
}

}  // namespace detail

/// I = \int_{[-s,s] x [-r,r]} dy dz / |(y, z) - (y1, z1)|, split into
/// rectangles anchored at the point so that the singularity sits at a corner
/// where polar coordinates remove it.
inline quad::Estimate green_rectangle_value(double s, double r, double y1, double z1, double tol = 1e-12) {
  if (!(s > 0.0 && s <= r)) throw Error(ErrorKind::domain, "need 0 < s <= r");
  const double ys[2] = {-s - y1, s - y1}, zs[2] = {-r - z1, r - z1};
  quad::Estimate total;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const auto c = detail::corner_integral(ys[i], zs[j], 0.25 * tol);
      const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
      total.value += sign * c.value;
      total.error += c.error;
    }
  return total;
}

inline BoundCheck green_rectangle_integral(double s, double r, double y1, double z1, double tol = 1e-12) {
  const auto est = green_rectangle_value(s, r, y1, z1, tol);
  return make_check("green rectangle integral < 10 s (1 + ln(r/s))", est.value, 10.0 * s * (1.0 + std::log(r / s)),
                    std::max(1e-8, 3.0 * est.error));
}

// ---------------------------------------------------------------------------
// One-dimensional wall lower bound

struct WallBoundSides {
  double lhs{0.0};    // |omega| (\int |f'|^2 + alpha^2 \int (f2^2 + f3^2))
  double rhs{0.0};    // 2 alpha |omega| |f1(a) - f1(b)|
  double error{0.0};  // Richardson estimate of the discretization error of lhs
};

namespace detail {

inline double wall_lhs(std::span<const Vec3> f, double h, double alpha, double area, std::size_t stride) {
  double ex = 0.0, zero = 0.0;
  const std::size_t n = f.size();
  for (std::size_t i = 0; i + stride < n; i += stride) ex += (f[i + stride] - f[i]).norm2();
  for (std::size_t i = 0; i < n; i += stride) {
    const double w = (i == 0 || i + stride >= n) ? 0.5 : 1.0;
    zero += w * (f[i].y * f[i].y + f[i].z * f[i].z);
  }
  const double hs = h * static_cast<double>(stride);
  return area * (ex / hs + alpha * alpha * zero * hs);
}

}  // namespace detail

inline WallBoundSides wall_lower_bound_sides(const WallProfile& f, double alpha, double area = 1.0) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "alpha must be positive");
  const auto v = f.values();
  WallBoundSides s;
  s.lhs = detail::wall_lhs(v, f.h(), alpha, area, 1);
  if (f.size() % 2 == 1) s.error = std::abs(s.lhs - detail::wall_lhs(v, f.h(), alpha, area, 2)) / 3.0;
  s.rhs = 2.0 * alpha * area * std::abs(v.front().x - v.back().x);
  return s;
}

/// 2 alpha |omega| |f1(a) - f1(b)| <= |omega| (\int |f'|^2 + alpha^2 \int (f2^2 + f3^2)).
inline BoundCheck wall_lower_bound_check(const WallProfile& f, double alpha, double area = 1.0) {
  const auto s = wall_lower_bound_sides(f, alpha, area);
  return make_check("2 alpha |omega| |f1(a) - f1(b)| <= wall energy", s.rhs, s.lhs, std::max(1e-8, 3.0 * s.error));
}

// ---------------------------------------------------------------------------
// Suite

struct LemmaSuiteConfig {
  std::uint64_t seed{1};
  std::vector<std::string> sets{"A1", "A2", "A3", "L31", "L32", "L33"};
  int a1_pairs{50};
  int a2_cases{100};
  int a3_fields{100};
  int threads{1};
};

inline const std::vector<std::string>& lemma_set_names() {
  static const std::vector<std::string> names{"A1", "A2", "A3", "L31", "L32", "L33"};
  return names;
}

namespace detail {

inline std::string indexed(const std::string& prefix, int i) { return prefix + " #" + std::to_string(i); }

inline Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double n2 = v.norm2();
    if (n2 > 1e-4 && n2 <= 1.0) return v * (1.0 / std::sqrt(n2));
  }
}

inline double l2_distance(const Field3D& a, const Field3D& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) s += (a.values()[i] - b.values()[i]).norm2();
  return std::sqrt(s * a.grid().cell_volume());
}

inline void run_a1(const LemmaSuiteConfig& cfg, Rng& rng, std::vector<BoundCheck>& out) {
  const auto grid = make_wire_grid({CrossSection::rectangle(1.0, 0.5), 1.0, -2.0, 2.0, 16, 4});
  const StrayField sf(grid, {EndFaces::continuation, cfg.threads});
  std::vector<Vec3> v1(grid->cell_count()), v2(v1.size());
  for (int p = 0; p < cfg.a1_pairs; ++p) {
    const double eps = std::pow(10.0, rng.uniform(-3.0, 0.5));
    for (auto& v : v1) v = random_unit(rng);
    for (std::size_t i = 0; i < v1.size(); ++i) v2[i] = normalized(v1[i] + random_unit(rng) * eps);
    const Field3D f1(grid, v1), f2(grid, v2);
    const double e1 = sf.energy(f1), e2 = sf.energy(f2);
    const double dist = l2_distance(f1, f2);
    out.push_back(make_check(indexed("A1 magnetostatic continuity", p), std::abs(e1 - e2),
                             dist * dist + 2.0 * dist * std::sqrt(e1), 1e-10 * std::max(e1, e2)));
  }
}

inline void run_a2(const LemmaSuiteConfig& cfg, Rng& rng, std::vector<BoundCheck>& out) {
  BoundCheck pinned = green_rectangle_integral(1.0, 1.0, 0.0, 0.0);
  pinned.name = "A2 unit square at the centre";
  out.push_back(pinned);
  const double exact = 8.0 * std::log(1.0 + std::sqrt(2.0));
  out.push_back(make_check("A2 unit square matches 8 ln(1 + sqrt 2)", std::abs(pinned.measured - exact), 1e-3));
  for (int c = 0; c < cfg.a2_cases; ++c) {
    const double s = rng.uniform(0.05, 2.0);
    const double r = s * std::exp(rng.uniform(0.0, std::log(50.0)));
    const double y1 = rng.uniform(-2.0, 2.0) * s, z1 = rng.uniform(-2.0, 2.0) * r;
    BoundCheck b = green_rectangle_integral(s, r, y1, z1);
    b.name = indexed("A2 green rectangle bound", c);
    out.push_back(b);
  }
}

inline void run_a3(const LemmaSuiteConfig& cfg, Rng& rng, std::vector<BoundCheck>& out) {
  {
    const double alpha = 1.5, area = 0.7;
    const UniformGrid g{-6.0, 6.0, 4001};
    const auto f = WallProfile::sample(g, [&](double x) { return transverse_profile(alpha * alpha, 1.0, 0.3, x); });
    const auto s = wall_lower_bound_sides(f, alpha, area);
    out.push_back(make_check("A3 saturating profile equality (relative gap)", std::abs(s.lhs - s.rhs) / s.rhs, 1e-3));
    out.push_back(wall_lower_bound_check(f, alpha, area));
    out.back().name = "A3 saturating profile";
  }
  {
    const UniformGrid g{-1.0, 1.0, 11};
    const auto f = WallProfile::sample(g, [](double) { return kAxisPlus; });
    out.push_back(wall_lower_bound_check(f, 1.0));
    out.back().name = "A3 constant profile";
  }
  const double pa = std::asin(-0.9), pb = std::asin(0.9);
  for (int c = 0; c < cfg.a3_fields; ++c) {
    const double alpha = rng.uniform(0.5, 3.0), half = rng.uniform(1.0, 5.0), area = rng.uniform(0.2, 2.0);
    double cp[3], ct[3];
    for (auto& v : cp) v = rng.uniform(-0.5, 0.5);
    for (auto& v : ct) v = rng.uniform(-1.0, 1.0);
    const double theta0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const UniformGrid g{-half, half, 2001};
    const auto f = WallProfile::sample(g, [&](double x) {
      const double s = (x + half) / (2.0 * half);
      double phi = pa + (pb - pa) * s, theta = theta0;
      for (int k = 0; k < 3; ++k) {
        phi += cp[k] * std::sin((k + 1) * std::numbers::pi * s);
        theta += ct[k] * std::sin((k + 1) * std::numbers::pi * s);
      }
      return Vec3{std::sin(phi), std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta)};
    });
    out.push_back(wall_lower_bound_check(f, alpha, area));
    out.back().name = indexed("A3 random profile", c);
  }
}

inline void run_l31(const LemmaSuiteConfig& cfg, Rng& rng, std::vector<BoundCheck>& out) {
  const auto grid = make_wire_grid({CrossSection::rectangle(1.0, 0.5), 0.5, -3.0, 3.0, 24, 8});
  const double k1 = rng.uniform(0.5, 3.0), k2 = rng.uniform(0.5, 3.0), w = rng.uniform(0.5, 1.5);
  const Field3D f = Field3D::sample(grid, [&](double x, double y, double z) {
    const double c = 1.0 / std::cosh(x / w), t = k1 * y + k2 * z;
    return Vec3{std::tanh(x / w), c * std::cos(t), c * std::sin(t)};
  });
  const StrayFieldOptions opt{EndFaces::continuation, cfg.threads};
  const EnergyReport base{exchange_energy(f), magnetostatic_energy(f, opt)};
  for (const double t : {0.5, 2.0}) {
    const Field3D ft = scale_field(f, t);
    const double ex = exchange_energy(ft), mag = magnetostatic_energy(ft, opt);
    const std::string tag = " (t = " + std::string(t < 1.0 ? "0.5" : "2") + ")";
    out.push_back(make_check("L31 exchange scales by t" + tag, std::abs(ex - t * base.exchange) / (t * base.exchange), 0.02));
    out.push_back(make_check("L31 magnetostatic scales by t^3" + tag,
                             std::abs(mag - t * t * t * base.magnetostatic) / (t * t * t * base.magnetostatic), 0.05));
  }
}

inline BoundCheck poincare_bound(const std::string& name, const Field3D& f) {
  const auto& g = f.grid();
  const double cp = calibrate_poincare_constant(g.slice(), g.domain().scaled_diameter());
  double worst = -std::numeric_limits<double>::infinity(), scale = 0.0;
  for (const auto& s : poincare_check(f, cp)) {
    worst = std::max(worst, s.lhs - s.rhs);
    scale = std::max(scale, s.rhs);
  }
  return make_check(name, worst, 0.0, 1e-12 * (scale + g.slice_area()));
}

inline void run_l32(const LemmaSuiteConfig&, Rng& rng, std::vector<BoundCheck>& out) {
  const auto grid = make_wire_grid({CrossSection::rectangle(1.0, 0.5), 1.0, -2.0, 2.0, 8, 8});
  out.push_back(poincare_bound("L32 slice-constant field", Field3D::sample(grid, [](double x, double, double) {
                                 return Vec3{std::tanh(x), 1.0 / std::cosh(x), 0.0};
                               })));
  out.push_back(poincare_bound("L32 cosine field", Field3D::sample(grid, [](double, double y, double) {
                                 return Vec3{std::cos(std::numbers::pi * y / 2.0), std::sin(std::numbers::pi * y / 2.0), 0.0};
                               })));
  for (int c = 0; c < 5; ++c) {
    double k[6];
    for (auto& v : k) v = rng.uniform(-3.0, 3.0);
    out.push_back(poincare_bound(indexed("L32 random smooth field", c),
                                 Field3D::sample(grid, [&](double x, double y, double z) {
                                   return Vec3{std::sin(k[0] * y + k[1] * z + x), std::cos(k[2] * y * y + k[3] * z),
                                               std::sin(k[4] * y * z + k[5] * x)};
                                 })));
  }
  const auto v = VortexParams::with_default_length(4.0);
  const auto vg = vortex_grid(v, {8});
  out.push_back(poincare_bound("L32 vortex field", Field3D::sample(vg, [&](double x, double y, double z) {
                                 return tilde_m({x, y, z}, v);
                               })));
}

inline void run_l33(const LemmaSuiteConfig& cfg, Rng& rng, std::vector<BoundCheck>& out) {
  const double b = 0.5 / std::sqrt(5.0);
  const CrossSection cs = CrossSection::rectangle(2.0 * b, b);
  const DemagMatrix dm = compute_demag_matrix(cs, 512);
  const ReducedEnergyParams p{cs.area(), dm.alpha2, dm.alpha3};
  const double w = 1.0 / std::sqrt(p.alpha_omega());
  for (const double d : {0.2, 0.1}) {
    const auto grid = make_wire_grid({cs, d, -8.0 * w, 8.0 * w, 64, 8});
    const StrayField sf(grid, {EndFaces::continuation, cfg.threads});
    for (int c = 0; c < 3; ++c) {
      const double alpha = p.alpha_omega() * rng.uniform(0.5, 2.0), theta = rng.uniform(0.0, std::numbers::pi);
      const double amp = rng.uniform(0.0, 0.3), ky = rng.uniform(-20.0, 20.0) / d;
      const Field3D f = Field3D::sample(grid, [&](double x, double y, double) {
        Vec3 m = transverse_profile(alpha, 1.0, theta, x);
        m.z += amp * std::sin(ky * y) / std::cosh(x);
        return m;
      });
      const double energy = exchange_energy(f) + sf.energy(f);
      const auto avg = average_profile(f);
      double lhs = 0.0;
      for (const auto& m : avg.mean) lhs += (m.y * m.y + m.z * m.z) * grid->hx();
      out.push_back(make_check(indexed("L33 averaged transverse bound (d = " + std::string(d > 0.15 ? "0.2" : "0.1") + ")", c),
                               lhs, 2.0 * energy / (d * d * std::min(p.alpha2, p.alpha3))));
    }
  }
}

}  // namespace detail

/// Runs the selected sets in the fixed order A1, A2, A3, L31, L32, L33.
inline std::vector<BoundCheck> run_all(const LemmaSuiteConfig& cfg) {
  for (const auto& s : cfg.sets)
    if (std::find(lemma_set_names().begin(), lemma_set_names().end(), s) == lemma_set_names().end())
      throw Error(ErrorKind::config, "unknown lemma set '" + s + "'");
  auto selected = [&](const char* s) { return std::find(cfg.sets.begin(), cfg.sets.end(), s) != cfg.sets.end(); };
  std::vector<BoundCheck> out;
  // Each set draws from its own stream so selections do not shift each other's inputs.
  std::uint64_t stream = 0;
  auto rng_for = [&]() { return Rng(cfg.seed * 1000003ULL + (++stream)); };
  Rng r1 = rng_for(), r2 = rng_for(), r3 = rng_for(), r4 = rng_for(), r5 = rng_for(), r6 = rng_for();
  if (selected("A1")) detail::run_a1(cfg, r1, out);
  if (selected("A2")) detail::run_a2(cfg, r2, out);
  if (selected("A3")) detail::run_a3(cfg, r3, out);
  if (selected("L31")) detail::run_l31(cfg, r4, out);
  if (selected("L32")) detail::run_l32(cfg, r5, out);
  if (selected("L33")) detail::run_l33(cfg, r6, out);
  return out;
}

inline bool all_pass(const std::vector<BoundCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass(); });
}

}  // namespace wirewall
