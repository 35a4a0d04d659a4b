#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wirewall/error.hpp"

namespace wirewall::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Cached rules for small orders.
inline const GaussRule& gauss(int n) {
  static const std::array<GaussRule, 17> rules = [] {
    std::array<GaussRule, 17> r;
    for (int k = 1; k <= 16; ++k) r[k] = gauss_legendre(k);
    return r;
  }();
  if (n < 1 || n > 16) throw std::out_of_range("gauss order must be in [1, 16]");
  return rules[n];
}

struct Estimate {
  double value{0.0};
  double error{0.0};
};

namespace detail {

// Gauss-Kronrod 7/15 on [-1, 1]; symmetric halves.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
Estimate gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

template <class F>
Estimate adaptive(F& f, double a, double b, double tol, int depth) {
  const Estimate whole = gk15(f, a, b);
  if (whole.error <= tol || depth <= 0) return whole;
  const double m = 0.5 * (a + b);
  const Estimate l = adaptive(f, a, m, 0.5 * tol, depth - 1);
  const Estimate r = adaptive(f, m, b, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a smooth (or endpoint-singular) integrand.
template <class F>
Estimate integrate(F&& f, double a, double b, double abs_tol = 1e-12, int max_depth = 40) {
  return detail::adaptive(f, a, b, abs_tol, max_depth);
}

}  // namespace wirewall::quad
