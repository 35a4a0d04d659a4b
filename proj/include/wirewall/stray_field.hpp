#pragma once

// Magnetostatic energy of a cell-wise constant magnetization on a WireGrid.
// A piecewise-constant m has no volume charge; its charge sits on cell faces
// as the jump of the normal component. With face charges sigma the energy is
//   E_mag = sum_{A,B} sigma_A sigma_B W(A, B),
//   W(A, B) = (1/4pi) \int_A \int_B 1/|r - r'|,
// the exact stray-field energy of that field.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <thread>
#include <vector>

#include "wirewall/error.hpp"
#include "wirewall/field3d.hpp"
#include "wirewall/quadrature.hpp"
#include "wirewall/vec.hpp"

namespace wirewall {

namespace kernel {

/// Axis-aligned rectangle in 3D with normal along `axis`.
struct Rect {
  int axis{0};
  Vec3 center;
  double half_u{0.0};  // along (axis + 1) % 3
  double half_v{0.0};  // along (axis + 2) % 3
  double area() const { return 4.0 * half_u * half_v; }
  double diagonal() const { return 2.0 * std::hypot(half_u, half_v); }
};

// U ln(V + R) with the U = 0 limit and a cancellation-free form for V < 0.
inline double u_log_v_plus_r(double u, double v, double r) {
  if (u == 0.0) return 0.0;
  if (v >= 0.0) return u * std::log(v + r);
  const double s = r - v;  // > 0
  return u * std::log((r * r - v * v) / s);
}

/// \int\int dU dV / sqrt(U^2 + V^2 + w^2), antiderivative in (U, V).
inline double rect_antiderivative(double u, double v, double w) {
  const double r = std::sqrt(u * u + v * v + w * w);
  if (r == 0.0) return 0.0;
  double f = u_log_v_plus_r(u, v, r) + u_log_v_plus_r(v, u, r);
  if (w != 0.0 && u != 0.0 && v != 0.0) f -= w * std::atan(u * v / (w * r));
  return f;
}

/// \int_A 1/|p - r'| dA(r').
inline double rect_potential(const Rect& a, const Vec3& p) {
  const int iu = (a.axis + 1) % 3, iv = (a.axis + 2) % 3;
  const double w = p[a.axis] - a.center[a.axis];
  const double u1 = p[iu] - (a.center[iu] - a.half_u), u2 = p[iu] - (a.center[iu] + a.half_u);
  const double v1 = p[iv] - (a.center[iv] - a.half_v), v2 = p[iv] - (a.center[iv] + a.half_v);
  return rect_antiderivative(u1, v1, w) - rect_antiderivative(u1, v2, w) - rect_antiderivative(u2, v1, w) +
         rect_antiderivative(u2, v2, w);
}

// Tensor Gauss rule of order n over rect b applied to g.
template <class G>
double gauss_over(const Rect& b, int n, G&& g) {
  const auto& q = quad::gauss(n);
  const int iu = (b.axis + 1) % 3, iv = (b.axis + 2) % 3;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      Vec3 p = b.center;
      p[iu] += b.half_u * q.nodes[i];
      p[iv] += b.half_v * q.nodes[j];
      row += q.weights[j] * g(p);
    }
    s += q.weights[i] * row;
  }
  return s * b.half_u * b.half_v;
}

inline double asinh_ratio(double a, double b) { return b == 0.0 ? 0.0 : std::asinh(a / b); }

/// Fourfold antiderivative for parallel faces: d^2/dy^2 d^2/dz^2 f = 1/R.
inline double parallel_antiderivative(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  double s = (2.0 * x * x - y * y - z * z) * r / 6.0;
  if (y != 0.0) s += 0.5 * y * (z * z - x * x) * asinh_ratio(y, std::sqrt(x * x + z * z));
  if (z != 0.0) s += 0.5 * z * (y * y - x * x) * asinh_ratio(z, std::sqrt(x * x + y * y));
  if (x != 0.0 && y != 0.0 && z != 0.0) s -= x * y * z * std::atan(y * z / (x * r));
  return s;
}

/// Fourfold antiderivative for perpendicular faces: d/dx d/dy d^2/dz^2 g = 1/R.
inline double perpendicular_antiderivative(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  double s = -x * y * r / 3.0;
  if (x == 0.0 || y == 0.0) return s;
  s += y / 6.0 * (3.0 * z * z - y * y) * asinh_ratio(x, std::sqrt(y * y + z * z));
  s += x / 6.0 * (3.0 * z * z - x * x) * asinh_ratio(y, std::sqrt(x * x + z * z));
  if (z != 0.0) {
    s += x * y * z * asinh_ratio(z, std::sqrt(x * x + y * y));
    s -= z * z * z / 6.0 * std::atan(x * y / (z * r));
    s -= z * y * y / 2.0 * std::atan(x * z / (y * r));
    s -= z * x * x / 2.0 * std::atan(y * z / (x * r));
  }
  return s;
}

inline std::array<double, 2> extent(const Rect& r, int axis) {
  if (axis == r.axis) return {r.center[axis], r.center[axis]};
  const double half = axis == (r.axis + 1) % 3 ? r.half_u : r.half_v;
  return {r.center[axis] - half, r.center[axis] + half};
}

/// Closed-form \int_A \int_B 1/|r - r'| as signed sums of the antiderivatives
/// over the corner differences.
inline double exact_interaction(const Rect& a, const Rect& b) {
  double s = 0.0;
  if (a.axis == b.axis) {
    const int n = a.axis, p = (n + 1) % 3, q = (n + 2) % 3;
    const double x = b.center[n] - a.center[n];
    const auto ap = extent(a, p), bp = extent(b, p), aq = extent(a, q), bq = extent(b, q);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double sign = ((i + j + k + l) % 2 == 0) ? 1.0 : -1.0;
            s += sign * parallel_antiderivative(x, ap[i] - bp[j], aq[k] - bq[l]);
          }
    return s;
  }
  const int ta = a.axis, tb = b.axis, c = 3 - ta - tb;
  const auto bx = extent(b, ta), ay = extent(a, tb), az = extent(a, c), bz = extent(b, c);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double sign = (i == 0 ? 1.0 : -1.0) * (j == 1 ? 1.0 : -1.0) * ((k + l) % 2 == 1 ? 1.0 : -1.0);
          s += sign * perpendicular_antiderivative(a.center[ta] - bx[i], ay[j] - b.center[tb], az[k] - bz[l]);
        }
  return s;
}

/// W(A, B) = (1/4pi) \int_A \int_B 1/|r - r'|. Near pairs use the closed form,
/// far pairs tensor Gauss rules (where the closed form loses digits to cancellation).
inline double face_interaction(const Rect& a, const Rect& b) {
  const double dist = (b.center - a.center).norm();
  const double size = std::max(a.diagonal(), b.diagonal());
  double value;
  if (dist > 3.0 * size) {
    const int n = dist > 20.0 * size ? 2 : (dist > 8.0 * size ? 3 : 4);
    value = gauss_over(a, n, [&](const Vec3& p) {
      return gauss_over(b, n, [&](const Vec3& q) { return 1.0 / (p - q).norm(); });
    });
  } else {
    value = exact_interaction(a, b);
  }
  return value / (4.0 * std::numbers::pi);
}

}  // namespace kernel

/// How the two x-end faces of the window are charged.
enum class EndFaces {
  continuation,  // jump against the -e1 / +e1 continuation beyond the window
  omit,          // no charge on the end faces
};

struct StrayFieldOptions {
  EndFaces end_faces{EndFaces::continuation};
  int threads{1};
  std::size_t max_faces{100000};
};

/// Face-charge interaction operator for one WireGrid. Construction tabulates
/// W over all relative face offsets; evaluation is a direct sum.
class StrayField {
 public:
  explicit StrayField(WireGridPtr grid, StrayFieldOptions opt = {}) : grid_(std::move(grid)), opt_(opt) {
    if (opt_.threads < 1) throw Error(ErrorKind::config, "threads must be >= 1");
    const auto& g = *grid_;
    const int ny = g.slice().ny, nz = g.slice().nz;
    // X lanes: one per active lattice cell, nx + 1 faces.
    for (int c = 0; c < g.cells_per_slice(); ++c) {
      const auto [j, k] = g.lattice(c);
      lanes_[0].push_back({j, k, c, -1});
    }
    // Y lanes: lattice edges between (j - 1, k) and (j, k).
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j <= ny; ++j) {
        const int lo = g.active(j - 1, k), hi = g.active(j, k);
        if (lo >= 0 || hi >= 0) lanes_[1].push_back({j, k, lo, hi});
      }
    // Z lanes: lattice edges between (j, k - 1) and (j, k).
    for (int k = 0; k <= nz; ++k)
      for (int j = 0; j < ny; ++j) {
        const int lo = g.active(j, k - 1), hi = g.active(j, k);
        if (lo >= 0 || hi >= 0) lanes_[2].push_back({j, k, lo, hi});
      }
    len_ = {g.nx() + 1, g.nx(), g.nx()};
    std::size_t faces = 0;
    for (int t = 0; t < 3; ++t) faces += lanes_[t].size() * static_cast<std::size_t>(len_[t]);
    if (faces > opt_.max_faces)
      throw Error(ErrorKind::capacity, "grid has " + std::to_string(faces) + " charged faces, limit is " +
                                           std::to_string(opt_.max_faces));
    face_count_ = faces;
    build_tables();
  }

  const WireGrid& grid() const { return *grid_; }
  std::size_t face_count() const { return face_count_; }
  const StrayFieldOptions& options() const { return opt_; }
  void set_threads(int threads) {
    if (threads < 1) throw Error(ErrorKind::config, "threads must be >= 1");
    opt_.threads = threads;
  }

  /// Face charges per type, lane-major.
  using Charges = std::array<std::vector<double>, 3>;

  Charges charges(std::span<const Vec3> m) const {
    const auto& g = *grid_;
    Charges s;
    for (int t = 0; t < 3; ++t) s[t].assign(lanes_[t].size() * len_[t], 0.0);
    const double ax = g.h() * g.h(), at = g.hx() * g.h();
    const bool ends = opt_.end_faces == EndFaces::continuation;
    for (std::size_t l = 0; l < lanes_[0].size(); ++l) {
      double* row = &s[0][l * len_[0]];
      const int c = lanes_[0][l].lo;
      for (int i = 0; i <= g.nx(); ++i) {
        if ((i == 0 || i == g.nx()) && !ends) continue;
        const double left = i == 0 ? -1.0 : m[g.index(i - 1, c)].x;
        const double right = i == g.nx() ? 1.0 : m[g.index(i, c)].x;
        row[i] = (left - right) * ax;
      }
    }
    for (int t = 1; t < 3; ++t)
      for (std::size_t l = 0; l < lanes_[t].size(); ++l) {
        double* row = &s[t][l * len_[t]];
        const Lane& ln = lanes_[t][l];
        for (int i = 0; i < g.nx(); ++i) {
          const double lo = ln.lo >= 0 ? m[g.index(i, ln.lo)][t] : 0.0;
          const double hi = ln.hi >= 0 ? m[g.index(i, ln.hi)][t] : 0.0;
          row[i] = (lo - hi) * at;
        }
      }
    return s;
  }

  /// Potential per unit charge at every face, phi = K q with K = W / (area_A area_B).
  /// Returned as the sum over sources of W(A, B) q_B / area_B, i.e. the
  /// face-averaged potential times area_A.
  Charges potential(const Charges& q, bool only_charged_targets = false) const {
    Charges phi;
    std::array<std::vector<char>, 3> nonzero;
    for (int t = 0; t < 3; ++t) {
      phi[t].assign(q[t].size(), 0.0);
      nonzero[t].assign(lanes_[t].size(), 0);
      for (std::size_t l = 0; l < lanes_[t].size(); ++l)
        for (int i = 0; i < len_[t]; ++i)
          if (q[t][l * len_[t] + i] != 0.0) {
            nonzero[t][l] = 1;
            break;
          }
    }
    // Work items: (type, lane) targets, split into contiguous blocks per thread.
    std::vector<std::pair<int, int>> targets;
    for (int t = 0; t < 3; ++t)
      for (std::size_t l = 0; l < lanes_[t].size(); ++l)
        if (!only_charged_targets || nonzero[t][l]) targets.push_back({t, static_cast<int>(l)});
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t w = begin; w < end; ++w) {
        const auto [ta, la] = targets[w];
        const Lane& A = lanes_[ta][la];
        double* out = &phi[ta][static_cast<std::size_t>(la) * len_[ta]];
        for (int tb = 0; tb < 3; ++tb) {
          const Table& tab = tables_[ta][tb];
          for (std::size_t lb = 0; lb < lanes_[tb].size(); ++lb) {
            if (!nonzero[tb][lb]) continue;
            const Lane& B = lanes_[tb][lb];
            const double* base = tab.row(B.j - A.j, B.k - A.k);
            const double* src = &q[tb][lb * len_[tb]];
            const int nb = len_[tb];
            for (int ia = 0; ia < len_[ta]; ++ia) {
              const double* r = base - ia;
              double acc = 0.0;
              for (int ib = 0; ib < nb; ++ib) acc += r[ib] * src[ib];
              out[ia] += acc;
            }
          }
        }
      }
    };
    run_parallel(targets.size(), work);
    return phi;
  }

  double energy(std::span<const Vec3> m) const {
    const Charges q = charges(m);
    return dot(q, potential(q, true));
  }
  double energy(const Field3D& f) const { return energy(f.values()); }

  struct Evaluation {
    double energy{0.0};
    std::vector<Vec3> gradient;  // Euclidean, per cell
  };

  /// Energy and its gradient with respect to every cell value (end-face
  /// continuation values are constants).
  Evaluation evaluate(std::span<const Vec3> m) const {
    const auto& g = *grid_;
    const Charges q = charges(m);
    const Charges phi = potential(q);
    Evaluation ev;
    ev.energy = dot(q, phi);
    ev.gradient.assign(m.size(), Vec3{});
    const double ax = 2.0 * g.h() * g.h(), at = 2.0 * g.hx() * g.h();
    const bool ends = opt_.end_faces == EndFaces::continuation;
    for (std::size_t l = 0; l < lanes_[0].size(); ++l) {
      const double* p = &phi[0][l * len_[0]];
      const int c = lanes_[0][l].lo;
      for (int i = 0; i < g.nx(); ++i) {
        const double left = (i == 0 && !ends) ? 0.0 : p[i];
        const double right = (i + 1 == g.nx() && !ends) ? 0.0 : p[i + 1];
        ev.gradient[g.index(i, c)].x += ax * (right - left);
      }
    }
    for (int t = 1; t < 3; ++t)
      for (std::size_t l = 0; l < lanes_[t].size(); ++l) {
        const double* p = &phi[t][l * len_[t]];
        const Lane& ln = lanes_[t][l];
        for (int i = 0; i < g.nx(); ++i) {
          if (ln.lo >= 0) ev.gradient[g.index(i, ln.lo)][t] += at * p[i];
          if (ln.hi >= 0) ev.gradient[g.index(i, ln.hi)][t] -= at * p[i];
        }
      }
    return ev;
  }

  /// Sum of all face charges (net charge of the window).
  double total_charge(std::span<const Vec3> m) const {
    const Charges q = charges(m);
    double s = 0.0;
    for (const auto& v : q)
      for (const double x : v) s += x;
    return s;
  }

 private:
  struct Lane {
    int j, k;  // lattice position of the lane (edge index on its own axis)
    int lo, hi;
  };

  struct Table {
    int nj{0}, nk{0}, ni{0};
    int oj{0}, ok{0}, oi{0};
    std::vector<double> data;
    // Pointer to the entry at (dj, dk, di = 0) shifted so that r[ib - ia] is W.
    const double* row(int dj, int dk) const {
      return &data[(static_cast<std::size_t>(dj + oj) * nk + (dk + ok)) * ni + oi];
    }
  };

  static double dot(const Charges& a, const Charges& b) {
    double s = 0.0;
    for (int t = 0; t < 3; ++t)
      for (std::size_t i = 0; i < a[t].size(); ++i) s += a[t][i] * b[t][i];
    return s;
  }

  template <class F>
  void run_parallel(std::size_t n, F& work) const {
    const int nt = static_cast<int>(std::min<std::size_t>(opt_.threads, std::max<std::size_t>(n, 1)));
    if (nt <= 1) {
      work(0, n);
      return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back([&, t] { work(n * t / nt, n * (t + 1) / nt); });
    for (auto& th : pool) th.join();
  }

  // Face of type t at lattice (j, k), axial index i.
  kernel::Rect face(int t, int i, int j, int k) const {
    const auto& g = *grid_;
    const double hx = g.hx(), h = g.h();
    const double y0 = g.slice().y0, z0 = g.slice().z0;
    kernel::Rect r;
    r.axis = t;
    if (t == 0) {
      r.center = {g.x0() + i * hx, y0 + (j + 0.5) * h, z0 + (k + 0.5) * h};
      r.half_u = 0.5 * h;
      r.half_v = 0.5 * h;
    } else if (t == 1) {
      r.center = {g.x0() + (i + 0.5) * hx, y0 + j * h, z0 + (k + 0.5) * h};
      r.half_u = 0.5 * h;   // z
      r.half_v = 0.5 * hx;  // x
    } else {
      r.center = {g.x0() + (i + 0.5) * hx, y0 + (j + 0.5) * h, z0 + k * h};
      r.half_u = 0.5 * hx;  // x
      r.half_v = 0.5 * h;   // y
    }
    return r;
  }

  // W between faces of type ta at the origin lane and tb displaced by (di, dj, dk),
  // evaluated with the two types in canonical order so the tables are symmetric.
  double interaction(int ta, int tb, int di, int dj, int dk) const {
    if (ta > tb) return interaction(tb, ta, -di, -dj, -dk);
    if (ta == tb) {
      di = std::abs(di);
      dj = std::abs(dj);
      dk = std::abs(dk);
    }
    const int base = grid_->nx() + 2;  // keep indices positive
    const kernel::Rect a = face(ta, base, base, base);
    const kernel::Rect b = face(tb, base + di, base + dj, base + dk);
    return kernel::face_interaction(a, b);
  }

  void build_tables() {
    const auto& g = *grid_;
    const int ny = g.slice().ny, nz = g.slice().nz, nx = g.nx();
    for (int ta = 0; ta < 3; ++ta)
      for (int tb = 0; tb < 3; ++tb) {
        Table& tab = tables_[ta][tb];
        tab.oj = ny + 1;
        tab.ok = nz + 1;
        tab.oi = nx + 1;
        tab.nj = 2 * tab.oj + 1;
        tab.nk = 2 * tab.ok + 1;
        tab.ni = 2 * tab.oi + 1;
        tab.data.assign(static_cast<std::size_t>(tab.nj) * tab.nk * tab.ni, 0.0);
      }
    // Scale factors turn charges q = sigma * area into the energy sum q_A q_B W / (area_A area_B).
    std::array<double, 3> area = {g.h() * g.h(), g.hx() * g.h(), g.hx() * g.h()};
    for (int ta = 0; ta < 3; ++ta)
      for (int tb = ta; tb < 3; ++tb) {
        // Offsets that actually occur between lanes of the two types.
        std::vector<char> used(static_cast<std::size_t>(tables_[ta][tb].nj) * tables_[ta][tb].nk, 0);
        for (const Lane& A : lanes_[ta])
          for (const Lane& B : lanes_[tb])
            used[static_cast<std::size_t>(B.j - A.j + tables_[ta][tb].oj) * tables_[ta][tb].nk +
                 (B.k - A.k + tables_[ta][tb].ok)] = 1;
        Table& t1 = tables_[ta][tb];
        Table& t2 = tables_[tb][ta];
        const double scale = 1.0 / (area[ta] * area[tb]);
        std::vector<std::array<int, 2>> offsets;
        for (int dj = -t1.oj; dj <= t1.oj; ++dj)
          for (int dk = -t1.ok; dk <= t1.ok; ++dk)
            if (used[static_cast<std::size_t>(dj + t1.oj) * t1.nk + (dk + t1.ok)]) offsets.push_back({dj, dk});
        auto fill = [&](std::size_t begin, std::size_t end) {
          for (std::size_t o = begin; o < end; ++o) {
            const int dj = offsets[o][0], dk = offsets[o][1];
            for (int di = -(len_[ta] - 1); di <= len_[tb] - 1; ++di) {
              const double w = interaction(ta, tb, di, dj, dk) * scale;
              t1.data[(static_cast<std::size_t>(dj + t1.oj) * t1.nk + (dk + t1.ok)) * t1.ni + (di + t1.oi)] = w;
              if (ta != tb)
                t2.data[(static_cast<std::size_t>(-dj + t2.oj) * t2.nk + (-dk + t2.ok)) * t2.ni + (-di + t2.oi)] = w;
            }
          }
        };
        run_parallel(offsets.size(), fill);
      }
  }

  WireGridPtr grid_;
  StrayFieldOptions opt_;
  std::array<std::vector<Lane>, 3> lanes_;
  std::array<int, 3> len_{};
  std::array<std::array<Table, 3>, 3> tables_;
  std::size_t face_count_{0};
};

inline double magnetostatic_energy(const Field3D& f, StrayFieldOptions opt = {}) {
  return StrayField(f.grid_ptr(), opt).energy(f);
}

}  // namespace wirewall
