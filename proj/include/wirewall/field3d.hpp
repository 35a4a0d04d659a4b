#pragma once

// Cell-centred magnetizations on a truncated wire [x0, x1] x (d * omega),
// their exchange energy and cross-section statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wirewall/error.hpp"
#include "wirewall/geometry.hpp"
#include "wirewall/vec.hpp"
#include "wirewall/wall_profiles.hpp"

namespace wirewall {

/// Discretization of a WireDomain: `axial_cells` slices, each a copy of the
/// scaled interior lattice of the cross section. Cells are boxes hx * h * h.
class WireGrid {
 public:
  explicit WireGrid(WireDomain domain)
      : domain_(std::move(domain)),
        slice_(domain_.cross_section.interior_grid(domain_.transverse_cells).scaled(domain_.scale)) {
    domain_.validate();
    active_.assign(slice_.inside.size(), -1);
    for (int k = 0; k < slice_.nz; ++k)
      for (int j = 0; j < slice_.ny; ++j)
        if (slice_.is_inside(j, k)) {
          active_[slice_.index(j, k)] = static_cast<int>(lattice_.size());
          lattice_.push_back({j, k});
        }
    if (lattice_.empty()) throw Error(ErrorKind::domain, "cross-section lattice has no interior cells");
  }

  const WireDomain& domain() const { return domain_; }
  const InteriorGrid& slice() const { return slice_; }
  int nx() const { return domain_.axial_cells; }
  double hx() const { return domain_.hx(); }
  double h() const { return slice_.h; }
  double x0() const { return domain_.x0; }
  double x1() const { return domain_.x1; }
  double cell_volume() const { return hx() * h() * h(); }
  int cells_per_slice() const { return static_cast<int>(lattice_.size()); }
  int cell_count() const { return nx() * cells_per_slice(); }
  /// Area actually covered by the lattice (|omega_h| for the scaled section).
  double slice_area() const { return cells_per_slice() * h() * h(); }

  int index(int i, int c) const { return i * cells_per_slice() + c; }
  /// Active index of lattice cell (j, k) or -1.
  int active(int j, int k) const {
    if (j < 0 || j >= slice_.ny || k < 0 || k >= slice_.nz) return -1;
    return active_[slice_.index(j, k)];
  }
  std::pair<int, int> lattice(int c) const { return {lattice_[c].first, lattice_[c].second}; }
  double x_center(int i) const { return x0() + (i + 0.5) * hx(); }
  Vec2 yz_center(int c) const { return slice_.center(lattice_[c].first, lattice_[c].second); }

 private:
  WireDomain domain_;
  InteriorGrid slice_;
  std::vector<int> active_;
  std::vector<std::pair<int, int>> lattice_;
};

using WireGridPtr = std::shared_ptr<const WireGrid>;

inline WireGridPtr make_wire_grid(WireDomain d) { return std::make_shared<const WireGrid>(std::move(d)); }

/// Unit vector field on the active cells of a WireGrid; beyond the x window
/// the field continues as -e1 (left) and +e1 (right), and it vanishes
/// outside the wire.
class Field3D {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  Field3D(WireGridPtr grid, std::vector<Vec3> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_->cell_count())
      throw Error(ErrorKind::domain, "field size does not match its grid");
    for (const auto& v : values_)
      if (!(std::abs(v.norm() - 1.0) <= kUnitTolerance))
        throw Error(ErrorKind::domain, "field values must be unit vectors");
  }

  /// Samples f(x, y, z) at cell centres; results are renormalized.
  template <class F>
  static Field3D sample(WireGridPtr grid, F&& f) {
    std::vector<Vec3> v(grid->cell_count());
    for (int i = 0; i < grid->nx(); ++i)
      for (int c = 0; c < grid->cells_per_slice(); ++c) {
        const Vec2 p = grid->yz_center(c);
        v[grid->index(i, c)] = normalized(f(grid->x_center(i), p.y, p.z));
      }
    return Field3D(std::move(grid), std::move(v));
  }

  const WireGrid& grid() const { return *grid_; }
  const WireGridPtr& grid_ptr() const { return grid_; }
  std::span<const Vec3> values() const { return values_; }
  const Vec3& at(int i, int c) const { return values_[grid_->index(i, c)]; }

 private:
  WireGridPtr grid_;
  std::vector<Vec3> values_;
};

/// Extends a 1D profile constantly over every cross section, sampling the
/// profile function at the cell centres.
template <class Profile>
Field3D extend_profile(WireGridPtr grid, Profile&& m_of_x) {
  return Field3D::sample(std::move(grid), [&](double x, double, double) { return m_of_x(x); });
}

// ---------------------------------------------------------------------------
// Exchange energy

/// Sum over neighbouring cell pairs of |m_a - m_b|^2 / spacing^2 times the
/// cell volume. Faces on the wire surface and at the window ends carry no
/// term (natural boundary condition).
inline double exchange_energy(const WireGrid& g, std::span<const Vec3> m) {
  const int ncs = g.cells_per_slice();
  const double wx = g.cell_volume() / (g.hx() * g.hx());
  const double wt = g.cell_volume() / (g.h() * g.h());
  double ex = 0.0, et = 0.0;
  for (int i = 0; i + 1 < g.nx(); ++i)
    for (int c = 0; c < ncs; ++c) ex += (m[g.index(i + 1, c)] - m[g.index(i, c)]).norm2();
  for (int i = 0; i < g.nx(); ++i)
    for (int c = 0; c < ncs; ++c) {
      const auto [j, k] = g.lattice(c);
      const int cy = g.active(j + 1, k), cz = g.active(j, k + 1);
      const Vec3& v = m[g.index(i, c)];
      if (cy >= 0) et += (m[g.index(i, cy)] - v).norm2();
      if (cz >= 0) et += (m[g.index(i, cz)] - v).norm2();
    }
  return wx * ex + wt * et;
}

inline double exchange_energy(const Field3D& f) { return exchange_energy(f.grid(), f.values()); }

/// Euclidean gradient of exchange_energy with respect to every cell value.
inline std::vector<Vec3> exchange_gradient(const WireGrid& g, std::span<const Vec3> m) {
  const int ncs = g.cells_per_slice();
  const double wx = 2.0 * g.cell_volume() / (g.hx() * g.hx());
  const double wt = 2.0 * g.cell_volume() / (g.h() * g.h());
  std::vector<Vec3> grad(m.size());
  for (int i = 0; i + 1 < g.nx(); ++i)
    for (int c = 0; c < ncs; ++c) {
      const int a = g.index(i, c), b = g.index(i + 1, c);
      const Vec3 d = (m[a] - m[b]) * wx;
      grad[a] += d;
      grad[b] -= d;
    }
  for (int i = 0; i < g.nx(); ++i)
    for (int c = 0; c < ncs; ++c) {
      const auto [j, k] = g.lattice(c);
      const int a = g.index(i, c);
      for (const int nb : {g.active(j + 1, k), g.active(j, k + 1)}) {
        if (nb < 0) continue;
        const int b = g.index(i, nb);
        const Vec3 d = (m[a] - m[b]) * wt;
        grad[a] += d;
        grad[b] -= d;
      }
    }
  return grad;
}

// ---------------------------------------------------------------------------
// Cross-section averages

/// Slice means m_bar(x_i) = (1/|omega_h|) \int_omega m, sampled at slice centres.
struct AveragedProfile {
  std::vector<double> x;
  std::vector<Vec3> mean;
};

inline AveragedProfile average_profile(const Field3D& f) {
  const auto& g = f.grid();
  AveragedProfile out;
  out.x.resize(g.nx());
  out.mean.resize(g.nx());
  const double inv = 1.0 / g.cells_per_slice();
  for (int i = 0; i < g.nx(); ++i) {
    Vec3 s;
    for (int c = 0; c < g.cells_per_slice(); ++c) s += f.at(i, c);
    out.x[i] = g.x_center(i);
    out.mean[i] = s * inv;
  }
  return out;
}

/// Resamples an averaged profile as a WallProfile (renormalizing the means),
/// for alignment against the 1D minimizer.
inline WallProfile averaged_as_profile(const AveragedProfile& a) {
  std::vector<Vec3> v(a.mean.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = normalized(a.mean[i]);
  return WallProfile({a.x.front(), a.x.back(), static_cast<int>(a.x.size())}, std::move(v));
}

// ---------------------------------------------------------------------------
// Poincare-type estimate on cross sections

struct PoincareSlice {
  double lhs{0.0};  // \int_omega |m - m_bar|^2
  double rhs{0.0};  // C_p d^2 \int_omega |grad_yz m|^2
};

/// Per-slice sides of \int |m - m_bar|^2 <= C_p d^2 \int |grad_yz m|^2, with
/// the transverse gradient taken from neighbour differences (squared form).
inline std::vector<PoincareSlice> poincare_check(const Field3D& f, double c_p) {
  const auto& g = f.grid();
  const double d = g.domain().scaled_diameter();
  const double area = g.h() * g.h();
  std::vector<PoincareSlice> out(g.nx());
  const auto avg = average_profile(f);
  for (int i = 0; i < g.nx(); ++i) {
    double lhs = 0.0, grad = 0.0;
    for (int c = 0; c < g.cells_per_slice(); ++c) {
      const Vec3& v = f.at(i, c);
      lhs += (v - avg.mean[i]).norm2() * area;
      const auto [j, k] = g.lattice(c);
      for (const int nb : {g.active(j + 1, k), g.active(j, k + 1)})
        if (nb >= 0) grad += (f.at(i, nb) - v).norm2();  // |dm/h|^2 * h^2
    }
    out[i] = {lhs, c_p * d * d * grad};
  }
  return out;
}

/// Poincare constant of a lattice cross section, normalized by diameter^2:
/// the largest ratio \int|f - f_bar|^2 / (d^2 \int|grad f|^2) over the
/// low-frequency cosine modes cos(p pi (y - y0)/W) cos(q pi (z - z0)/H),
/// 0 <= p, q <= max_mode. On rectangles the first mode is the exact discrete
/// Neumann eigenvector, so the constant is sharp there.
inline double calibrate_poincare_constant(const InteriorGrid& lat, double diameter, int max_mode = 4) {
  const double width = lat.ny * lat.h, height = lat.nz * lat.h;
  double best = 0.0;
  std::vector<double> f(lat.inside.size());
  for (int p = 0; p <= max_mode; ++p)
    for (int q = 0; q <= max_mode; ++q) {
      if (p == 0 && q == 0) continue;
      double mean = 0.0;
      int count = 0;
      for (int k = 0; k < lat.nz; ++k)
        for (int j = 0; j < lat.ny; ++j) {
          const Vec2 c = lat.center(j, k);
          const double v = std::cos(p * std::numbers::pi * (c.y - lat.y0) / width) *
                           std::cos(q * std::numbers::pi * (c.z - lat.z0) / height);
          f[lat.index(j, k)] = v;
          if (lat.is_inside(j, k)) {
            mean += v;
            ++count;
          }
        }
      mean /= count;
      double var = 0.0, grad = 0.0;
      for (int k = 0; k < lat.nz; ++k)
        for (int j = 0; j < lat.ny; ++j) {
          if (!lat.is_inside(j, k)) continue;
          const double v = f[lat.index(j, k)];
          var += (v - mean) * (v - mean);
          if (lat.is_inside(j + 1, k)) grad += std::pow(f[lat.index(j + 1, k)] - v, 2);
          if (lat.is_inside(j, k + 1)) grad += std::pow(f[lat.index(j, k + 1)] - v, 2);
        }
      if (grad > 0.0) best = std::max(best, var * lat.h * lat.h / (diameter * diameter * grad));
    }
  return best;
}

// ---------------------------------------------------------------------------
// Scaling

/// m_t(xi) = m(xi / t) on the domain t * (d * Omega): same cell values on a
/// grid stretched by t, so E_ex(m_t) = t E_ex(m) and E_mag(m_t) = t^3 E_mag(m).
inline Field3D scale_field(const Field3D& f, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::domain, "scale factor must be positive");
  WireDomain d = f.grid().domain();
  d.scale *= t;
  d.x0 *= t;
  d.x1 *= t;
  std::vector<Vec3> v(f.values().begin(), f.values().end());
  return Field3D(make_wire_grid(std::move(d)), std::move(v));
}

// ---------------------------------------------------------------------------
// Oscillation statistics of m_bar_1

struct CrossingInterval {
  double a{0.0};
  double b{0.0};
};

struct CrossingStats {
  std::vector<CrossingInterval> intervals;
  int count{0};
  double total_length{0.0};
};

/// Disjoint intervals (a, b) with {m1(a), m1(b)} = {alpha, beta} and
/// |m1| <= rho inside, found on the piecewise-linear interpolant of the samples.
inline CrossingStats crossing_families(std::span<const double> x, std::span<const double> m1, double alpha,
                                       double beta, double rho) {
  if (!(-1.0 < alpha && alpha < beta && beta < 1.0) || !(0.0 < rho && rho < 1.0))
    throw Error(ErrorKind::domain, "need -1 < alpha < beta < 1 and 0 < rho < 1");
  if (x.size() != m1.size()) throw Error(ErrorKind::domain, "x and m1 sizes differ");
  CrossingStats s;
  // Anchor: last point at level alpha (0) or beta (1) with no excursion beyond rho since.
  int anchor_level = -1;
  double anchor_x = 0.0;
  auto visit_level = [&](int level, double xc) {
    if (anchor_level >= 0 && anchor_level != level) {
      s.intervals.push_back({anchor_x, xc});
      s.total_length += xc - anchor_x;
    }
    anchor_level = level;
    anchor_x = xc;
  };
  struct Event {
    double frac;
    int kind;  // 0: alpha, 1: beta, 2: leaves [-rho, rho]
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(m1[i]) > rho) anchor_level = -1;
    if (m1[i] == alpha) visit_level(0, x[i]);
    if (m1[i] == beta) visit_level(1, x[i]);
    if (i + 1 == x.size()) break;
    const double u = m1[i], v = m1[i + 1];
    std::array<Event, 4> ev{};
    int ne = 0;
    for (int lvl = 0; lvl < 2; ++lvl) {
      const double L = lvl == 0 ? alpha : beta;
      if ((u < L && v > L) || (u > L && v < L)) ev[ne++] = {(L - u) / (v - u), lvl};
    }
    for (const double L : {rho, -rho}) {
      const bool inside_u = std::abs(u) <= rho;
      if (inside_u && ((u < L && v > L) || (u > L && v < L))) ev[ne++] = {(L - u) / (v - u), 2};
    }
    std::sort(ev.begin(), ev.begin() + ne, [](const Event& p, const Event& q) { return p.frac < q.frac; });
    for (int e = 0; e < ne; ++e) {
      const double xc = x[i] + ev[e].frac * (x[i + 1] - x[i]);
      if (ev[e].kind == 2) {
        anchor_level = -1;
      } else {
        // Levels outside the band never anchor an interval.
        const double L = ev[e].kind == 0 ? alpha : beta;
        if (std::abs(L) <= rho) visit_level(ev[e].kind, xc);
      }
    }
  }
  s.count = static_cast<int>(s.intervals.size());
  return s;
}

/// M(alpha, beta, rho, omega, E) = (1/|omega|) (E/(alpha-beta)^2 + (C1 + C_p d^2 E)/(1 - rho^2))
/// with C1 = 2E / min(alpha2, alpha3).
inline double oscillation_constant(double alpha, double beta, double rho, const ReducedEnergyParams& omega,
                                   double energy, double d, double c_p) {
  if (!(-1.0 < alpha && alpha < beta && beta < 1.0) || !(0.0 < rho && rho < 1.0) || !(energy >= 0.0))
    throw Error(ErrorKind::domain, "need -1 < alpha < beta < 1, 0 < rho < 1 and energy >= 0");
  const double c1 = 2.0 * energy / std::min(omega.alpha2, omega.alpha3);
  return (energy / ((alpha - beta) * (alpha - beta)) + (c1 + c_p * d * d * energy) / (1.0 - rho * rho)) /
         omega.area;
}

}  // namespace wirewall
