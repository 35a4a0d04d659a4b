#pragma once

// One-dimensional reduced wall energy
//   E0(m) = |omega| \int |m'|^2 dx + \int (alpha2 m2^2 + alpha3 m3^2) dx
// on sampled profiles with the tail convention m = -e1 (left), +e1 (right).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wirewall/error.hpp"
#include "wirewall/vec.hpp"

namespace wirewall {

struct UniformGrid {
  double x0{-1.0};
  double x1{1.0};
  int n{2};

  double h() const { return (x1 - x0) / (n - 1); }
  double x(int i) const { return x0 + i * h(); }
};

/// Thin-wire energy coefficients, already in the frame where the demag block is diagonal.
struct ReducedEnergyParams {
  double area{1.0};
  double alpha2{1.0};
  double alpha3{1.0};

  void validate() const {
    if (!(area > 0.0) || !(alpha2 > 0.0) || !(alpha3 > 0.0))
      throw Error(ErrorKind::domain, "area and eigenvalues must be positive");
    if (alpha2 > alpha3) throw Error(ErrorKind::domain, "expected alpha2 <= alpha3");
  }
  double alpha_omega() const { return alpha2 / area; }
  /// Closed-form minimum 4 sqrt(alpha2 |omega|).
  double minimal_energy() const { return 4.0 * std::sqrt(alpha2 * area); }
};

class WallProfile {
 public:
  static constexpr double kUnitTolerance = 1e-12;

  WallProfile(UniformGrid grid, std::vector<Vec3> values) : grid_(grid), values_(std::move(values)) {
    if (grid_.n < 3 || static_cast<int>(values_.size()) != grid_.n)
      throw Error(ErrorKind::domain, "profile needs n >= 3 samples matching its grid");
    if (!(grid_.x0 < grid_.x1)) throw Error(ErrorKind::domain, "profile window must satisfy x0 < x1");
    for (const auto& v : values_)
      if (std::abs(v.norm() - 1.0) > kUnitTolerance)
        throw Error(ErrorKind::domain, "profile samples must be unit vectors");
  }

  template <class F>
  static WallProfile sample(UniformGrid grid, F&& f) {
    std::vector<Vec3> v(grid.n);
    for (int i = 0; i < grid.n; ++i) v[i] = f(grid.x(i));
    return WallProfile(grid, std::move(v));
  }

  const UniformGrid& grid() const { return grid_; }
  std::span<const Vec3> values() const { return values_; }
  const Vec3& operator[](int i) const { return values_[i]; }
  int size() const { return grid_.n; }
  double h() const { return grid_.h(); }

  /// Largest distance of the end samples from the tail values.
  double tail_mismatch() const {
    return std::max((values_.front() - kAxisMinus).norm(), (values_.back() - kAxisPlus).norm());
  }

 private:
  UniformGrid grid_;
  std::vector<Vec3> values_;
};

/// Discrete energy of raw samples: differences between neighbours for the
/// exchange term (second order at the half-grid points) and the trapezoid
/// rule for the anisotropy-like term. No admissibility checks.
inline double reduced_energy_raw(std::span<const Vec3> m, double h, const ReducedEnergyParams& p) {
  const std::size_t n = m.size();
  double ex = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) ex += (m[i + 1] - m[i]).norm2();
  double zero = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    zero += w * (p.alpha2 * m[i].y * m[i].y + p.alpha3 * m[i].z * m[i].z);
  }
  return p.area * ex / h + zero * h;
}

/// Euclidean gradient of reduced_energy_raw with respect to every sample.
inline std::vector<Vec3> reduced_energy_gradient(std::span<const Vec3> m, double h,
                                                 const ReducedEnergyParams& p) {
  const std::size_t n = m.size();
  std::vector<Vec3> g(n);
  const double c = 2.0 * p.area / h;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3 d = (m[i] - m[i + 1]) * c;
    g[i] += d;
    g[i + 1] -= d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double w = ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * 2.0 * h;
    g[i] += Vec3{0.0, w * p.alpha2 * m[i].y, w * p.alpha3 * m[i].z};
  }
  return g;
}

enum class TailCheck { enforce, skip };

/// Reduced energy of an admissible profile. With TailCheck::enforce a profile
/// whose end samples are farther than `tail_tolerance` from -e1 / +e1 is
/// rejected, since the truncated window would then miss part of the wall.
inline double reduced_energy(const WallProfile& prof, const ReducedEnergyParams& p,
                             TailCheck check = TailCheck::enforce, double tail_tolerance = 1e-6) {
  p.validate();
  if (check == TailCheck::enforce && prof.tail_mismatch() > tail_tolerance)
    throw Error(ErrorKind::truncation, "profile ends miss the tails by " +
                                           std::to_string(prof.tail_mismatch()) +
                                           "; enlarge the window");
  return reduced_energy_raw(prof.values(), prof.h(), p);
}

/// m^{alpha,beta}(x) written with tanh/sech of s = sqrt(alpha) x + ln(beta)/2,
/// which is the same closed form without overflow.
inline Vec3 transverse_profile(double alpha, double beta, double theta, double x) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error(ErrorKind::domain, "alpha and beta must be positive");
  const double s = std::sqrt(alpha) * x + 0.5 * std::log(beta);
  const double t = std::tanh(s);
  const double amp = 1.0 / std::cosh(s);
  return {t, amp * std::cos(theta), amp * std::sin(theta)};
}

/// Default truncation window [-40/sqrt(alpha_omega), 40/sqrt(alpha_omega)].
inline UniformGrid default_window(const ReducedEnergyParams& p, int n) {
  const double half = 40.0 / std::sqrt(p.alpha_omega());
  return {-half, half, n};
}

struct FixedMinimizer {
  WallProfile profile;
  bool degenerate{false};  // alpha2 == alpha3: the wall plane is not determined
};

/// Samples m^omega = m^{alpha_omega, 1} with theta = 0: the wall turns
/// through +e2, the small-eigenvalue direction, with m1(0) = 0.
inline FixedMinimizer fixed_minimizer(const ReducedEnergyParams& p, UniformGrid grid,
                                      double tie_tolerance = 1e-12) {
  p.validate();
  const double a = p.alpha_omega();
  auto prof = WallProfile::sample(grid, [a](double x) {
    Vec3 v = transverse_profile(a, 1.0, 0.0, x);
    v.z = 0.0;
    return v;
  });
  const bool degenerate = (p.alpha3 - p.alpha2) <= tie_tolerance * p.alpha3;
  return {std::move(prof), degenerate};
}

enum class InitKind { closed_form, perturbed, rotated };

inline const char* to_string(InitKind k) {
  switch (k) {
    case InitKind::closed_form: return "closed-form";
    case InitKind::perturbed: return "perturbed";
    case InitKind::rotated: return "rotated";
  }
  return "unknown";
}

inline InitKind init_kind_from_string(const std::string& s) {
  if (s == "closed-form") return InitKind::closed_form;
  if (s == "perturbed") return InitKind::perturbed;
  if (s == "rotated") return InitKind::rotated;
  throw Error(ErrorKind::config, "unknown init '" + s + "' (closed-form | perturbed | rotated)");
}

/// Tilt away from the exact saddle used by the rotated start.
inline constexpr double kRotatedTilt = 1e-3;

/// Starting profiles for descent, as functions of x. With w = 1/sqrt(alpha_omega):
///   closed-form  m^omega itself;
///   perturbed    (e1(x/w), 0.6 b, 0.8 b) normalized, e1 = clamp to [-1, 1], b = max(1 - |x/w|, 0);
///   rotated      m^omega with the wall plane turned by pi/2 - kRotatedTilt.
/// `plane` turns the (m2, m3) pair, so 0 means the small-eigenvalue axis.
inline Vec3 initial_value(InitKind kind, const ReducedEnergyParams& p, double x, double plane = 0.0) {
  const double a = p.alpha_omega();
  switch (kind) {
    case InitKind::closed_form: return transverse_profile(a, 1.0, plane, x);
    case InitKind::rotated:
      return transverse_profile(a, 1.0, plane + 0.5 * std::numbers::pi - kRotatedTilt, x);
    case InitKind::perturbed: {
      const double s = x * std::sqrt(a);
      const double b = std::max(1.0 - std::abs(s), 0.0);
      const double c = std::cos(plane), sn = std::sin(plane);
      const double u = 0.6 * b, v = 0.8 * b;
      return normalized(Vec3{std::clamp(s, -1.0, 1.0), c * u - sn * v, sn * u + c * v});
    }
  }
  return kAxisPlus;
}

inline WallProfile initial_profile(InitKind kind, const ReducedEnergyParams& p, UniformGrid grid) {
  p.validate();
  return WallProfile::sample(grid, [&](double x) { return initial_value(kind, p, x); });
}

struct DescentOptions {
  double step{1.0};           // initial step in preconditioned units
  double max_step{4.0};
  double grow{1.5};
  int max_iterations{5000};
  double gradient_tolerance{1e-8};  // on the projected L2 gradient norm
  double min_step{1e-14};
};

enum class DescentStatus { converged, max_iterations, stalled };

inline const char* to_string(DescentStatus s) {
  switch (s) {
    case DescentStatus::converged: return "converged";
    case DescentStatus::max_iterations: return "max-iterations";
    case DescentStatus::stalled: return "stalled";
  }
  return "unknown";
}

struct ReducedDescentResult {
  WallProfile profile;
  std::vector<double> energy_history;  // one entry per accepted step, starting with the initial energy
  DescentStatus status{DescentStatus::max_iterations};
  int iterations{0};
  double gradient_norm{0.0};
};

namespace detail {

// Solves (c I - a D2) u = r with homogeneous Dirichlet data at both ends,
// D2 the three-point Laplacian on spacing h (Thomas algorithm).
inline void solve_sobolev_1d(std::vector<double>& r, double c, double a, double h) {
  const std::size_t n = r.size();
  if (n < 3) return;
  const double off = -a / (h * h);
  const double diag = c + 2.0 * a / (h * h);
  std::vector<double> cp(n, 0.0);
  r.front() = 0.0;
  r.back() = 0.0;
  // interior unknowns 1..n-2
  double denom = diag;
  cp[1] = off / denom;
  r[1] = r[1] / denom;
  for (std::size_t i = 2; i + 1 < n; ++i) {
    denom = diag - off * cp[i - 1];
    cp[i] = off / denom;
    r[i] = (r[i] - off * r[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 2; --i) r[i - 1] -= cp[i - 1] * r[i];
}

}  // namespace detail

/// Projected gradient descent on the discrete reduced energy over unit
/// vector fields with clamped ends. The tangent gradient is preconditioned by
/// (alpha_omega - D2)^{-1} (a Sobolev gradient), the step is halved until the
/// energy does not increase and grown after each accepted step, and every
/// sample is renormalized to the sphere.
inline ReducedDescentResult minimize_reduced(const ReducedEnergyParams& p, const WallProfile& init,
                                             const DescentOptions& opts = {}) {
  p.validate();
  const double h = init.h();
  const int n = init.size();
  std::vector<Vec3> m(init.values().begin(), init.values().end());
  m.front() = kAxisMinus;
  m.back() = kAxisPlus;
  double energy = reduced_energy_raw(m, h, p);

  ReducedDescentResult res{WallProfile(init.grid(), m), {energy}, DescentStatus::max_iterations, 0, 0.0};
  double step = opts.step;
  std::vector<double> comp(n);
  std::vector<Vec3> dir(n), trial(n);

  for (int it = 0; it < opts.max_iterations; ++it) {
    auto g = reduced_energy_gradient(m, h, p);
    double gnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      g[i] = tangent_part(g[i], m[i]) * (1.0 / h);  // L2 gradient
      if (i == 0 || i == n - 1) g[i] = {};
      gnorm2 += g[i].norm2() * h;
    }
    res.gradient_norm = std::sqrt(gnorm2);
    res.iterations = it;
    if (res.gradient_norm < opts.gradient_tolerance) {
      res.status = DescentStatus::converged;
      break;
    }
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < n; ++i) comp[i] = g[i][c];
      detail::solve_sobolev_1d(comp, 2.0 * p.alpha_omega() * p.area, 2.0 * p.area, h);
      for (int i = 0; i < n; ++i) dir[i][c] = comp[i];
    }
    for (int i = 0; i < n; ++i) dir[i] = tangent_part(dir[i], m[i]);

    bool accepted = false;
    while (step >= opts.min_step) {
      for (int i = 0; i < n; ++i) trial[i] = normalized(m[i] - dir[i] * step);
      trial.front() = kAxisMinus;
      trial.back() = kAxisPlus;
      const double e = reduced_energy_raw(trial, h, p);
      if (e <= energy) {
        m.swap(trial);
        energy = e;
        accepted = true;
        step = std::min(step * opts.grow, opts.max_step);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.status = DescentStatus::stalled;
      break;
    }
    res.energy_history.push_back(energy);
    res.iterations = it + 1;
  }
  res.profile = WallProfile(init.grid(), m);
  return res;
}

struct Alignment {
  double translation{0.0};
  bool rotated{false};
  double distance{0.0};
};

namespace detail {

// First zero crossing of m1 by linear interpolation (sample index + fraction).
inline double m1_crossing(std::span<const Vec3> v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double a = v[i].x, b = v[i + 1].x;
    if (a == 0.0) return static_cast<double>(i);
    if ((a < 0.0) != (b < 0.0)) return static_cast<double>(i) + a / (a - b);
  }
  if (!v.empty() && v.back().x == 0.0) return static_cast<double>(v.size() - 1);
  throw Error(ErrorKind::alignment, "profile has no zero crossing of m1");
}

// Linear interpolation at fractional index s with the tail convention outside.
inline Vec3 interpolate(std::span<const Vec3> v, double s) {
  if (s <= 0.0) return s < 0.0 ? kAxisMinus : v.front();
  const double last = static_cast<double>(v.size() - 1);
  if (s >= last) return s > last ? kAxisPlus : v.back();
  const auto i = static_cast<std::size_t>(s);
  const double f = s - static_cast<double>(i);
  if (f == 0.0) return v[i];
  return v[i] * (1.0 - f) + v[i + 1] * f;
}

}  // namespace detail

/// Aligns `p` to `reference` by an x translation putting the m1 zero crossing
/// at the reference crossing and, when m2 < 0 there, a 180 degree rotation
/// of (m2, m3). Returns the translation applied to p, whether p was rotated and
/// the discrete L2 distance after alignment, measured on the reference grid.
inline Alignment align_profile(const WallProfile& p, const WallProfile& reference) {
  const double hp = p.h(), hr = reference.h();
  if (std::abs(hp - hr) > 1e-12 * std::max(hp, hr))
    throw Error(ErrorKind::domain, "profiles must share the grid spacing");
  const double xp = p.grid().x0 + detail::m1_crossing(p.values()) * hp;
  const double xr = reference.grid().x0 + detail::m1_crossing(reference.values()) * hr;
  Alignment a;
  a.translation = xr - xp;
  const double sp = (xp - p.grid().x0) / hp;
  const Vec3 at = detail::interpolate(p.values(), sp);
  a.rotated = at.y < 0.0;
  double d2 = 0.0;
  for (int i = 0; i < reference.size(); ++i) {
    const double x = reference.grid().x(i) - a.translation;  // point of p that lands on x_i
    Vec3 v = detail::interpolate(p.values(), (x - p.grid().x0) / hp);
    if (a.rotated) {
      v.y = -v.y;
      v.z = -v.z;
    }
    d2 += (v - reference[i]).norm2() * hr;
  }
  a.distance = std::sqrt(d2);
  return a;
}

}  // namespace wirewall
