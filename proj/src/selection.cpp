#include "truncdep/selection.hpp"

#include <array>
#include <cmath>
#include <string>

#include "truncdep/detail/kernels.hpp"
#include "truncdep/errors.hpp"

namespace truncdep {

namespace {

// Value, first and second derivative in one variable.
struct Jet {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;
};

Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
Jet operator*(Jet a, Jet b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
Jet operator*(double k, Jet a) { return {k * a.v, k * a.d, k * a.dd}; }
Jet exp_jet(Jet a) {
  const double e = std::exp(a.v);
  return {e, e * a.d, e * (a.dd + a.d * a.d)};
}
Jet inv_jet(Jet a) {
  const double r = 1.0 / a.v;
  return {r, -a.d * r * r, (2.0 * a.d * a.d / a.v - a.dd) * r * r};
}

// FGM closed form split as alpha = A(theta) + vartheta * B(theta).
void fgm_parts(double theta, const StudyDesign& design, Jet& a_part, Jet& b_part) {
  const double g = design.big_g;
  const double s = design.s;
  const Jet th{theta, 1.0, 0.0};
  const Jet one{1.0, 0.0, 0.0};
  const Jet es = exp_jet(-s * th);
  const Jet eg = exp_jet(-g * th);
  const Jet e2s = exp_jet(-2.0 * s * th);
  const Jet e2g = exp_jet(-2.0 * g * th);
  const Jet inv_th = inv_jet(th);
  const Jet inv_th2 = inv_th * inv_th;

  a_part = (1.0 / g) * inv_th * (one - es) * (one - eg);
  const Jet middle = (-1.0) * inv_th * (es - one) * (eg + one) +
                     0.5 * inv_th * (e2s - one) * (e2g + one);
  const Jet last = inv_th2 * (one - es) * (one - eg) - 0.25 * inv_th2 * (one - e2s) * (one - e2g);
  b_part = (-1.0 / g) * middle + (2.0 / (g * g)) * last;
}

AlphaBundle fgm_bundle(const ModelParams& params, const StudyDesign& design) {
  Jet a_part;
  Jet b_part;
  fgm_parts(params.theta, design, a_part, b_part);
  const double vt = params.vartheta;
  AlphaBundle b;
  b.alpha = a_part.v + vt * b_part.v;
  b.d_theta = a_part.d + vt * b_part.d;
  b.d_vartheta = b_part.v;
  b.d2_theta_theta = a_part.dd + vt * b_part.dd;
  b.d2_theta_vartheta = b_part.d;
  b.d2_vartheta_vartheta = 0.0;
  return b;
}

// Integrates (f, df/dtheta, df/dvartheta) of the Gumbel-Barnett density over
// D = {0 < t < G, t <= x <= t + s}.
std::array<double, 3> gb_first_order(double theta, double vartheta, const StudyDesign& design,
                                     const SelectionOptions& options) {
  const double g = design.big_g;
  const double s = design.s;
  auto outer = [&](double t) {
    const double log1mt = std::log1p(-t / g);
    auto inner = [&](double x) {
      const auto r = detail::gb_density_score(theta, vartheta, g, x, log1mt);
      return std::array<double, 3>{r.density, r.density * r.d_theta, r.density * r.d_vartheta};
    };
    return quad::integrate<3>(inner, t, t + s, options.inner);
  };
  return quad::integrate<3>(outer, 0.0, g, options.outer);
}

void check_alpha(double a, const ModelParams& params) {
  if (!(a > 0.0 && a < 1.0)) {
    throw InvariantError("selection probability " + std::to_string(a) +
                         " outside (0, 1) at theta=" + std::to_string(params.theta) +
                         " vartheta=" + std::to_string(params.vartheta));
  }
}

}  // namespace

namespace detail {

AlphaBundle alpha_bundle_unchecked(const ModelParams& params, const StudyDesign& design,
                                   const SelectionOptions& options) {
  if (params.family == CopulaFamily::FGM) return fgm_bundle(params, design);

  const auto first = gb_first_order(params.theta, params.vartheta, design, options);
  AlphaBundle b;
  b.alpha = first[0];
  b.d_theta = first[1];
  b.d_vartheta = first[2];
  if (!options.second_derivatives) return b;

  const double h_th = 1e-5 * std::max(1.0, std::abs(params.theta));
  const double h_vt = 1e-5 * std::max(1.0, std::abs(params.vartheta));
  const auto tp = gb_first_order(params.theta + h_th, params.vartheta, design, options);
  const auto tm = gb_first_order(params.theta - h_th, params.vartheta, design, options);
  const auto vp = gb_first_order(params.theta, params.vartheta + h_vt, design, options);
  const auto vm = gb_first_order(params.theta, params.vartheta - h_vt, design, options);
  b.d2_theta_theta = (tp[1] - tm[1]) / (2.0 * h_th);
  b.d2_vartheta_vartheta = (vp[2] - vm[2]) / (2.0 * h_vt);
  // Both mixed estimates are averaged so the Hessian is symmetric.
  b.d2_theta_vartheta = 0.5 * ((tp[2] - tm[2]) / (2.0 * h_th) + (vp[1] - vm[1]) / (2.0 * h_vt));
  return b;
}

}  // namespace detail

double alpha(const ModelParams& params, const StudyDesign& design,
             const SelectionOptions& options) {
  validate(params);
  validate(design);
  double a = 0.0;
  if (params.family == CopulaFamily::FGM) {
    a = fgm_bundle(params, design).alpha;
  } else {
    // Same integration path as alpha_bundle so the two agree bit for bit.
    a = gb_first_order(params.theta, params.vartheta, design, options)[0];
  }
  check_alpha(a, params);
  return a;
}

AlphaBundle alpha_bundle(const ModelParams& params, const StudyDesign& design,
                         const SelectionOptions& options) {
  validate(params);
  validate(design);
  const AlphaBundle b = detail::alpha_bundle_unchecked(params, design, options);
  check_alpha(b.alpha, params);
  return b;
}

}  // namespace truncdep
