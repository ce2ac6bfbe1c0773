#pragma once

// Unchecked per-point kernels shared by the density, selection and score code.
// They accept parameters slightly outside the admissible box, which the
// numerical Jacobians need at the vartheta = 0 edge.

#include <cmath>

#include "truncdep/copula.hpp"

namespace truncdep::detail {

struct LogDensityScore {
  double density = 0.0;
  double d_theta = 0.0;     // d/dtheta log f
  double d_vartheta = 0.0;  // d/dvartheta log f
};

/// Gumbel-Barnett bracket (vartheta*theta*x + 1)(vartheta*L - 1) + vartheta with
/// L = log(1 - t/G). Strictly negative on the truncation region for admissible
/// parameters.
inline double gb_bracket(double theta, double vartheta, double x, double log1mt) {
  return (vartheta * theta * x + 1.0) * (vartheta * log1mt - 1.0) + vartheta;
}

inline double gb_density(double theta, double vartheta, double big_g, double x, double log1mt) {
  const double bracket = gb_bracket(theta, vartheta, x, log1mt);
  return -(theta / big_g) * std::exp(theta * x * (vartheta * log1mt - 1.0)) * bracket;
}

inline LogDensityScore gb_density_score(double theta, double vartheta, double big_g, double x,
                                        double log1mt) {
  const double bracket = gb_bracket(theta, vartheta, x, log1mt);
  const double slope = vartheta * log1mt - 1.0;
  LogDensityScore r;
  r.density = -(theta / big_g) * std::exp(theta * x * slope) * bracket;
  r.d_theta = 1.0 / theta + x * slope + vartheta * x * slope / bracket;
  r.d_vartheta = theta * x * log1mt +
                 ((2.0 * vartheta * theta * x + 1.0) * log1mt - theta * x + 1.0) / bracket;
  return r;
}

// FGM with u = 1 - exp(-theta x), v = t / G: f = theta e^{-theta x} / G * K,
// K = 1 + vartheta (1 - 2u)(1 - 2v).
inline double fgm_density(double theta, double vartheta, double big_g, double x, double t) {
  const double e = std::exp(-theta * x);
  return theta * e / big_g * (1.0 + vartheta * (2.0 * e - 1.0) * (1.0 - 2.0 * t / big_g));
}

inline LogDensityScore fgm_density_score(double theta, double vartheta, double big_g, double x,
                                         double t) {
  const double e = std::exp(-theta * x);
  const double a = 2.0 * e - 1.0;
  const double b = 1.0 - 2.0 * t / big_g;
  const double k = 1.0 + vartheta * a * b;
  LogDensityScore r;
  r.density = theta * e / big_g * k;
  r.d_theta = 1.0 / theta - x - 2.0 * vartheta * x * e * b / k;
  r.d_vartheta = a * b / k;
  return r;
}

inline LogDensityScore density_score(CopulaFamily family, double theta, double vartheta,
                                     double big_g, double x, double t) {
  if (family == CopulaFamily::GumbelBarnett) {
    return gb_density_score(theta, vartheta, big_g, x, std::log1p(-t / big_g));
  }
  return fgm_density_score(theta, vartheta, big_g, x, t);
}

inline bool in_region(double x, double t, double big_g, double s) {
  return t > 0.0 && t < big_g && t <= x && x <= t + s;
}

}  // namespace truncdep::detail
