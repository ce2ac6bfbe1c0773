#pragma once

// Adaptive Gauss-Kronrod (7/15) integration for vector-valued integrands and
// Gauss-Legendre node generation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "truncdep/errors.hpp"

namespace truncdep::quad {

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-12;
  int max_intervals = 400;
};

namespace detail {

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
// Gauss weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::array<double, N> value{};
  std::array<double, N> error{};
  double worst = 0.0;
};

// One G7/K15 panel with the QUADPACK error heuristic applied per component.
template <std::size_t N, class F>
Panel<N> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<std::array<double, N>, 15> fv;
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  Panel<N> p{a, b, {}, {}, 0.0};
  for (std::size_t c = 0; c < N; ++c) {
    double kron = kWgk[7] * fv[7][c];
    double gauss = kWg[3] * fv[7][c];
    for (int j = 0; j < 7; ++j) {
      const double pair = fv[j][c] + fv[14 - j][c];
      kron += kWgk[j] * pair;
      if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * kron;
    double asc = kWgk[7] * std::abs(fv[7][c] - mean);
    for (int j = 0; j < 7; ++j) {
      asc += kWgk[j] * (std::abs(fv[j][c] - mean) + std::abs(fv[14 - j][c] - mean));
    }
    asc *= std::abs(half);
    double err = std::abs((kron - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    p.value[c] = kron * half;
    p.error[c] = err;
    p.worst = std::max(p.worst, err);
  }
  return p;
}

}  // namespace detail

/// Integrates a vector-valued f over [a, b]. Every component must meet
/// max(tol.abs, tol.rel * |I_c|). Throws ConvergenceError past max_intervals.
template <std::size_t N, class F>
std::array<double, N> integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
  std::vector<detail::Panel<N>> panels;
  panels.reserve(32);
  panels.push_back(detail::gk15<N>(f, a, b));
  const auto by_error = [](const auto& l, const auto& r) { return l.worst < r.worst; };

  while (true) {
    std::array<double, N> total{};
    std::array<double, N> total_err{};
    for (const auto& p : panels) {
      for (std::size_t c = 0; c < N; ++c) {
        total[c] += p.value[c];
        total_err[c] += p.error[c];
      }
    }
    bool done = true;
    for (std::size_t c = 0; c < N; ++c) {
      if (total_err[c] > std::max(tol.abs, tol.rel * std::abs(total[c]))) done = false;
    }
    if (done) return total;
    if (static_cast<int>(panels.size()) >= tol.max_intervals) {
      throw ConvergenceError("adaptive quadrature exceeded " + std::to_string(tol.max_intervals) +
                             " intervals on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    auto worst = std::max_element(panels.begin(), panels.end(), by_error);
    const double lo = worst->a;
    const double hi = worst->b;
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) return total;  // interval exhausted at machine precision
    *worst = detail::gk15<N>(f, lo, mid);
    panels.push_back(detail::gk15<N>(f, mid, hi));
  }
}

/// Scalar convenience wrapper.
template <class F>
double integrate_scalar(F&& f, double a, double b, const Tolerance& tol = {}) {
  auto wrapped = [&f](double x) { return std::array<double, 1>{f(x)}; };
  return integrate<1>(wrapped, a, b, tol)[0];
}

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1), ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

}  // namespace truncdep::quad
