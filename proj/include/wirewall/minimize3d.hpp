#pragma once

// Total energy E = E_ex + E_mag of a Field3D and its constrained minimization.

#include <cmath>
#include <vector>

#include "wirewall/demag_matrix.hpp"
#include "wirewall/field3d.hpp"
#include "wirewall/stray_field.hpp"
#include "wirewall/wall_profiles.hpp"

namespace wirewall {

struct EnergyReport {
  double exchange{0.0};
  double magnetostatic{0.0};
  double total() const { return exchange + magnetostatic; }
};

inline EnergyReport energy_report(const Field3D& f, const StrayField& sf) {
  return {exchange_energy(f), sf.energy(f)};
}

inline EnergyReport energy_report(const Field3D& f, StrayFieldOptions opt = {}) {
  return energy_report(f, StrayField(f.grid_ptr(), opt));
}

struct Minimize3DOptions {
  DescentOptions descent{1.0, 4.0, 1.5, 200, 1e-6, 1e-12};
  double shift{1.0};        // zero-order weight of the preconditioner
  double cg_tolerance{1e-6};
  int cg_max_iterations{400};
};

struct Minimize3DResult {
  Field3D field;
  EnergyReport energy;
  std::vector<double> energy_history;  // initial energy, then one entry per accepted step
  DescentStatus status{DescentStatus::max_iterations};
  int iterations{0};
  double gradient_norm{0.0};
};

namespace detail {

// y = (2 shift + 2 L) u on free cells, identity on clamped end slices, where
// L is the exchange graph Laplacian (Neumann on the wire surface, zero
// Dirichlet data on the clamped slices).
inline void apply_sobolev_3d(const WireGrid& g, double shift, const std::vector<double>& u,
                             std::vector<double>& y) {
  const int ncs = g.cells_per_slice(), nx = g.nx();
  const double wx = 1.0 / (g.hx() * g.hx()), wt = 1.0 / (g.h() * g.h());
  for (int i = 0; i < nx; ++i)
    for (int c = 0; c < ncs; ++c) {
      const int a = g.index(i, c);
      if (i == 0 || i == nx - 1) {
        y[a] = u[a];
        continue;
      }
      double lap = 2.0 * wx * u[a];
      if (i - 1 > 0) lap -= wx * u[g.index(i - 1, c)];
      if (i + 1 < nx - 1) lap -= wx * u[g.index(i + 1, c)];
      const auto [j, k] = g.lattice(c);
      for (const int nb : {g.active(j - 1, k), g.active(j + 1, k), g.active(j, k - 1), g.active(j, k + 1)})
        if (nb >= 0) lap += wt * (u[a] - u[g.index(i, nb)]);
      y[a] = 2.0 * shift * u[a] + 2.0 * lap;
    }
}

// Conjugate gradients for the preconditioner system; r holds the right-hand
// side on entry and the solution on exit.
inline void solve_sobolev_3d(const WireGrid& g, double shift, std::vector<double>& r, double tol, int max_iter) {
  const std::size_t n = r.size();
  std::vector<double> x(n, 0.0), res = r, p = r, ap(n);
  double rr = 0.0;
  for (const double v : res) rr += v * v;
  const double stop = tol * tol * rr;
  for (int it = 0; it < max_iter && rr > stop && rr > 0.0; ++it) {
    apply_sobolev_3d(g, shift, p, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    const double a = rr / pap;
    double rr_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += a * p[i];
      res[i] -= a * ap[i];
      rr_new += res[i] * res[i];
    }
    const double b = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = res[i] + b * p[i];
  }
  r.swap(x);
}

}  // namespace detail

/// Projected Sobolev-gradient descent of E_ex + E_mag over unit fields with
/// the end slices clamped to -e1 and +e1.
inline Minimize3DResult minimize_3d(const Field3D& init, const StrayField& sf, const Minimize3DOptions& opts = {}) {
  const WireGrid& g = init.grid();
  if (&sf.grid() != &g) throw Error(ErrorKind::domain, "stray-field operator belongs to a different grid");
  const int nx = g.nx(), ncs = g.cells_per_slice();
  const std::size_t n = static_cast<std::size_t>(g.cell_count());
  const double vol = g.cell_volume();
  std::vector<Vec3> m(init.values().begin(), init.values().end());
  for (int c = 0; c < ncs; ++c) {
    m[g.index(0, c)] = kAxisMinus;
    m[g.index(nx - 1, c)] = kAxisPlus;
  }
  auto evaluate = [&](const std::vector<Vec3>& v, std::vector<Vec3>& grad) {
    auto mag = sf.evaluate(v);
    const auto ex = exchange_gradient(g, v);
    for (std::size_t i = 0; i < n; ++i) mag.gradient[i] += ex[i];
    grad = std::move(mag.gradient);
    return EnergyReport{exchange_energy(g, v), mag.energy};
  };

  std::vector<Vec3> grad;
  EnergyReport rep = evaluate(m, grad);
  std::vector<double> history{rep.total()};
  DescentStatus status = DescentStatus::max_iterations;
  double step = opts.descent.step;
  double gnorm = 0.0;
  int iterations = 0;
  std::vector<double> comp(n);
  std::vector<Vec3> dir(n), trial(n), trial_grad;

  for (int it = 0; it < opts.descent.max_iterations; ++it) {
    double g2 = 0.0;
    for (int i = 0; i < nx; ++i)
      for (int c = 0; c < ncs; ++c) {
        const int a = g.index(i, c);
        grad[a] = (i == 0 || i == nx - 1) ? Vec3{} : tangent_part(grad[a], m[a]) * (1.0 / vol);
        g2 += grad[a].norm2() * vol;
      }
    gnorm = std::sqrt(g2);
    iterations = it;
    if (gnorm < opts.descent.gradient_tolerance) {
      status = DescentStatus::converged;
      break;
    }
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < n; ++i) comp[i] = grad[i][c];
      detail::solve_sobolev_3d(g, opts.shift, comp, opts.cg_tolerance, opts.cg_max_iterations);
      for (std::size_t i = 0; i < n; ++i) dir[i][c] = comp[i];
    }
    for (std::size_t i = 0; i < n; ++i) dir[i] = tangent_part(dir[i], m[i]);

    bool accepted = false;
    while (step >= opts.descent.min_step) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = normalized(m[i] - dir[i] * step);
      for (int c = 0; c < ncs; ++c) {
        trial[g.index(0, c)] = kAxisMinus;
        trial[g.index(nx - 1, c)] = kAxisPlus;
      }
      const EnergyReport e = evaluate(trial, trial_grad);
      if (e.total() <= rep.total()) {
        m.swap(trial);
        grad.swap(trial_grad);
        rep = e;
        accepted = true;
        step = std::min(step * opts.descent.grow, opts.descent.max_step);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      status = DescentStatus::stalled;
      break;
    }
    history.push_back(rep.total());
    iterations = it + 1;
  }
  return {Field3D(init.grid_ptr(), std::move(m)), rep, std::move(history), status, iterations, gnorm};
}


// ---------------------------------------------------------------------------
// Thin-wire experiments on d*omega

struct ThinWireSetup {
  CrossSection section;
  DemagMatrix demag;             // of the unit section
  double window{8.0};            // half window in wall widths 1/sqrt(alpha_omega)
  int axial_cells{64};
  int transverse_cells{8};
  InitKind init{InitKind::closed_form};
  StrayFieldOptions stray{};
  Minimize3DOptions minimize{};

  ReducedEnergyParams reduced() const { return {section.area(), demag.alpha2, demag.alpha3}; }
};

struct ThinWireResult {
  double d{0.0};
  int nx{0};
  int ny{0};
  int nz{0};
  std::size_t faces{0};
  EnergyReport initial;
  EnergyReport final_energy;
  int iterations{0};
  DescentStatus status{DescentStatus::converged};
  double gradient_norm{0.0};
  double distance_closed_form{0.0};  // aligned averaged profile vs sampled m^omega
  double distance_discrete{0.0};     // vs the 1D minimizer on the same axial grid

  double scaled_energy() const { return final_energy.total() / (d * d); }
};

inline WireGridPtr thin_wire_grid(const ThinWireSetup& s, double d) {
  if (!(d > 0.0)) throw Error(ErrorKind::domain, "d must be positive");
  if (!(s.window > 0.0)) throw Error(ErrorKind::domain, "window must be positive");
  const double half = s.window / std::sqrt(s.reduced().alpha_omega());
  WireDomain dom{s.section, d, -half, half, s.axial_cells, s.transverse_cells};
  dom.validate();
  return make_wire_grid(std::move(dom));
}

/// Builds the initial field on d*omega, evaluates it and, when `minimize` is
/// set, runs minimize_3d. The axial variable is not rescaled with d, so
/// E/d^2 is compared directly with the reduced energy. Transverse components
/// of the averaged profile are read in the eigenframe of the demag block.
inline ThinWireResult run_thin_wire(const ThinWireSetup& s, double d, bool minimize) {
  const ReducedEnergyParams p = s.reduced();
  p.validate();
  const WireGridPtr grid = thin_wire_grid(s, d);
  const StrayField sf(grid, s.stray);
  const double plane = -s.demag.rotation_angle;
  const Field3D init = extend_profile(grid, [&](double x) { return initial_value(s.init, p, x, plane); });

  ThinWireResult r;
  r.d = d;
  r.nx = grid->nx();
  r.ny = grid->slice().ny;
  r.nz = grid->slice().nz;
  r.faces = sf.face_count();
  r.initial = energy_report(init, sf);
  r.final_energy = r.initial;
  Field3D field = init;
  if (minimize) {
    auto res = minimize_3d(init, sf, s.minimize);
    r.final_energy = res.energy;
    r.iterations = res.iterations;
    r.status = res.status;
    r.gradient_norm = res.gradient_norm;
    field = std::move(res.field);
  }

  AveragedProfile avg = average_profile(field);
  const double c = std::cos(s.demag.rotation_angle), sn = std::sin(s.demag.rotation_angle);
  for (auto& v : avg.mean) v = {v.x, c * v.y - sn * v.z, sn * v.y + c * v.z};
  const WallProfile prof = averaged_as_profile(avg);
  const WallProfile ref = fixed_minimizer(p, prof.grid()).profile;
  const WallProfile discrete = minimize_reduced(p, ref).profile;
  r.distance_closed_form = align_profile(prof, ref).distance;
  r.distance_discrete = align_profile(prof, discrete).distance;
  return r;
}

}  // namespace wirewall
