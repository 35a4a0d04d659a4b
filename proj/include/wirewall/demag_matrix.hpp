#pragma once

// Transverse block of the thin-wire demagnetizing matrix
//   M = -(1/2pi) \oint\oint n(x) (x) n(y) ln|x - y| ds(x) ds(y)
// restricted to the (y, z) components of the outward normal.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wirewall/error.hpp"
#include "wirewall/geometry.hpp"

namespace wirewall {

/// 2x2 symmetric block stored as (m22, m23, m33).
struct Block2 {
  double m22{0.0};
  double m23{0.0};
  double m33{0.0};
};

struct Eigen2 {
  double alpha2{0.0};
  double alpha3{0.0};
  double rotation_angle{0.0};  // in (-pi/2, pi/2]
  bool degenerate{false};
};

struct DemagMatrix {
  double m22{0.0};
  double m23{0.0};
  double m33{0.0};
  double alpha2{0.0};
  double alpha3{0.0};
  double rotation_angle{0.0};
  bool degenerate{false};
  int quad_points{0};
  double estimated_error{0.0};

  Block2 block() const { return {m22, m23, m33}; }
};

/// Closed-form symmetric eigendecomposition. The angle rotates the (y, z)
/// plane so that the small-eigenvalue direction lands on the y axis, i.e.
/// R(angle) B R(angle)^T = diag(alpha2, alpha3). When the eigenvalues agree
/// within `tie_tolerance` the frame is arbitrary: angle 0, degenerate set.
inline Eigen2 diagonalize(const Block2& b, double tie_tolerance = 0.0) {
  const double mean = 0.5 * (b.m22 + b.m33);
  const double half_diff = 0.5 * (b.m33 - b.m22);
  const double radius = std::hypot(half_diff, b.m23);
  Eigen2 e;
  e.alpha2 = mean - radius;
  e.alpha3 = mean + radius;
  if (e.alpha3 - e.alpha2 <= tie_tolerance) {
    e.rotation_angle = 0.0;
    e.degenerate = true;
    return e;
  }
  double angle = 0.5 * std::atan2(2.0 * b.m23, b.m33 - b.m22);
  if (angle <= -0.5 * std::numbers::pi) angle += std::numbers::pi;
  e.rotation_angle = angle;
  return e;
}

inline Eigen2 diagonalize(const DemagMatrix& dm, double tie_tolerance = 0.0) {
  return diagonalize(dm.block(), tie_tolerance);
}

/// R(angle) B R(angle)^T.
inline Block2 rotate_block(const Block2& b, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Block2 r;
  r.m22 = c * c * b.m22 - 2.0 * c * s * b.m23 + s * s * b.m33;
  r.m33 = s * s * b.m22 + 2.0 * c * s * b.m23 + c * c * b.m33;
  r.m23 = c * s * (b.m22 - b.m33) + (c * c - s * s) * b.m23;
  return r;
}

/// Single-resolution evaluation of the block. Off-diagonal node pairs use the
/// point rule; each node's own panel is replaced by the flat-panel integral
///   \int_0^l \int_0^l ln|u - v| du dv = l^2 (ln l - 3/2).
/// Summation order is fixed (row by row) so results are bit-reproducible.
inline Block2 demag_block_raw(const CrossSection& cs, int n_points) {
  const auto nodes = cs.boundary_quadrature(n_points);
  const std::size_t n = nodes.size();
  double s22 = 0.0, s23 = 0.0, s33 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = nodes[i];
    // Row sum of w_j n_j ln|x_i - x_j| with the self panel patched analytically.
    double ry = 0.0, rz = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& b = nodes[j];
      double k;
      if (i == j) {
        k = b.weight * (std::log(b.weight) - 1.5);
      } else {
        const double dy = a.point.y - b.point.y, dz = a.point.z - b.point.z;
        k = b.weight * 0.5 * std::log(dy * dy + dz * dz);
      }
      ry += k * b.normal.y;
      rz += k * b.normal.z;
    }
    s22 += a.weight * a.normal.y * ry;
    s33 += a.weight * a.normal.z * rz;
    s23 += 0.5 * a.weight * (a.normal.y * rz + a.normal.z * ry);
  }
  const double f = -1.0 / (2.0 * std::numbers::pi);
  return {f * s22, f * s23, f * s33};
}

/// Demag block with a Richardson error estimate from the n/2 resolution. The
/// returned entries are the first-order Richardson extrapolation 2 M(n) - M(n/2);
/// `estimated_error` is the largest entry difference |M(n) - M(n/2)|.
/// Throws AccuracyError when the estimate exceeds `tolerance`.
inline DemagMatrix compute_demag_matrix(const CrossSection& cs, int n_points,
                                        double tolerance = std::numeric_limits<double>::infinity()) {
  if (n_points < 32) throw Error(ErrorKind::domain, "compute_demag_matrix needs n_points >= 32");
  const Block2 fine = demag_block_raw(cs, n_points);
  const Block2 coarse = demag_block_raw(cs, n_points / 2);
  const double err = std::max({std::abs(fine.m22 - coarse.m22), std::abs(fine.m23 - coarse.m23),
                               std::abs(fine.m33 - coarse.m33)});
  if (err > tolerance) {
    throw AccuracyError(fine.m22, coarse.m22, tolerance);
  }
  DemagMatrix dm;
  dm.m22 = 2.0 * fine.m22 - coarse.m22;
  dm.m23 = 2.0 * fine.m23 - coarse.m23;
  dm.m33 = 2.0 * fine.m33 - coarse.m33;
  dm.quad_points = static_cast<int>(cs.boundary_quadrature(n_points).size());
  dm.estimated_error = err;
  const Eigen2 e = diagonalize(dm.block(), err);
  dm.alpha2 = e.alpha2;
  dm.alpha3 = e.alpha3;
  dm.rotation_angle = e.rotation_angle;
  dm.degenerate = e.degenerate;
  if (!(dm.alpha2 > 0.0))
    throw Error(ErrorKind::accuracy, "demag block is not positive definite; increase n_points");
  return dm;
}

/// alpha_omega = alpha2 / |omega|, the inverse squared wall width of the thin-wire minimizer.
inline double alpha_omega(const DemagMatrix& dm, const CrossSection& cs) {
  return dm.alpha2 / cs.area();
}

}  // namespace wirewall
