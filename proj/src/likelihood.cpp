#include "truncdep/likelihood.hpp"

#include <cmath>
#include <string>

#include "truncdep/detail/kernels.hpp"
#include "truncdep/errors.hpp"

namespace truncdep {

namespace {

SelectionOptions first_order_only() {
  SelectionOptions o;
  o.second_derivatives = false;
  return o;
}

detail::LogDensityScore checked_density_score(const ModelParams& params, const StudyDesign& design,
                                              double x, double t) {
  const auto r = detail::density_score(params.family, params.theta, params.vartheta,
                                       design.big_g, x, t);
  if (!(r.density > 0.0) || !std::isfinite(r.d_theta) || !std::isfinite(r.d_vartheta)) {
    throw InvariantError("non-positive density or non-finite score at x=" + std::to_string(x) +
                         " t=" + std::to_string(t));
  }
  return r;
}

ProfileScore score_in_region(const ModelParams& params, double x, double t,
                             const StudyDesign& design, const AlphaBundle& selection) {
  if (!in_truncation_region(x, t, design)) return {};
  const auto r = checked_density_score(params, design, x, t);
  return {r.d_theta - selection.d_theta / selection.alpha,
          r.d_vartheta - selection.d_vartheta / selection.alpha};
}

}  // namespace

double log_likelihood(const ModelParams& params, double n, const TruncatedSample& sample) {
  if (!(n > 0.0)) throw DomainError("log_likelihood: n must be positive");
  validate(params);
  sample.validate();
  const auto& d = sample.design;
  const double a = alpha(params, d);
  const double log_n = std::log(n);
  double acc = 0.0;
  for (const auto& o : sample.observations) {
    acc += log_n + std::log(checked_density_score(params, d, o.x_tilde, o.t_tilde).density);
  }
  return acc + (d.big_g + d.s) * d.big_g - n * a;
}

std::size_t profile_n(std::size_t m, double alpha) {
  if (m == 0) throw DomainError("profile_n: no maximizer for an empty sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("profile_n: alpha must lie in (0, 1)");
  const double ratio = static_cast<double>(m) / alpha;
  return static_cast<std::size_t>(std::ceil(ratio)) - 1;
}

Eigen::Vector2d full_score(const ModelParams& params, double n, const TruncatedSample& sample) {
  if (!(n > 0.0)) throw DomainError("full_score: n must be positive");
  validate(params);
  sample.validate();
  const auto sel = alpha_bundle(params, sample.design, first_order_only());
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& o : sample.observations) {
    const auto r = checked_density_score(params, sample.design, o.x_tilde, o.t_tilde);
    g[0] += r.d_theta;
    g[1] += r.d_vartheta;
  }
  g[0] -= n * sel.d_theta;
  g[1] -= n * sel.d_vartheta;
  return g;
}

ProfileScore profile_score(const ModelParams& params, const ObservedPair& pair,
                           const StudyDesign& design, const AlphaBundle& selection) {
  return score_in_region(params, pair.x_tilde, pair.t_tilde, design, selection);
}

ProfileScore profile_score(const ModelParams& params, const LatentPair& pair,
                           const StudyDesign& design, const AlphaBundle& selection) {
  return score_in_region(params, pair.x, pair.t, design, selection);
}

ProfileScore profile_score(const ModelParams& params, const ObservedPair& pair,
                           const StudyDesign& design) {
  return profile_score(params, pair, design, alpha_bundle(params, design, first_order_only()));
}

ProfileProblem::ProfileProblem(const TruncatedSample& sample, CopulaFamily family)
    : family_(family), design_(sample.design) {
  sample.validate();
  x_.reserve(sample.size());
  t_.reserve(sample.size());
  log1mt_.reserve(sample.size());
  for (const auto& o : sample.observations) {
    x_.push_back(o.x_tilde);
    t_.push_back(o.t_tilde);
    log1mt_.push_back(std::log1p(-o.t_tilde / design_.big_g));
  }
}

ProfileEval ProfileProblem::evaluate(double theta, double vartheta, bool with_outer) const {
  validate(ModelParams{family_, theta, vartheta});
  return evaluate_unchecked(theta, vartheta, with_outer, first_order_only());
}

ProfileEval ProfileProblem::evaluate_unchecked(double theta, double vartheta, bool with_outer,
                                               const SelectionOptions& options) const {
  ProfileEval out;
  out.selection = detail::alpha_bundle_unchecked({family_, theta, vartheta}, design_, options);
  const double a = out.selection.alpha;
  const double corr_th = out.selection.d_theta / a;
  const double corr_vt = out.selection.d_vartheta / a;
  const double g = design_.big_g;
  double obj = 0.0;
  double s0 = 0.0;
  double s1 = 0.0;
  double o00 = 0.0;
  double o01 = 0.0;
  double o11 = 0.0;
  for (std::size_t j = 0; j < x_.size(); ++j) {
    const auto r = family_ == CopulaFamily::GumbelBarnett
                       ? detail::gb_density_score(theta, vartheta, g, x_[j], log1mt_[j])
                       : detail::fgm_density_score(theta, vartheta, g, x_[j], t_[j]);
    obj += std::log(r.density);
    const double p0 = r.d_theta - corr_th;
    const double p1 = r.d_vartheta - corr_vt;
    s0 += p0;
    s1 += p1;
    if (with_outer) {
      o00 += p0 * p0;
      o01 += p0 * p1;
      o11 += p1 * p1;
    }
  }
  out.objective = obj - static_cast<double>(x_.size()) * std::log(a);
  out.score = {s0, s1};
  out.outer << o00, o01, o01, o11;
  return out;
}

Eigen::Matrix2d ProfileProblem::score_jacobian(double theta, double vartheta) const {
  const SelectionOptions options = first_order_only();
  const double h_th = 1e-5 * std::max(1.0, std::abs(theta));
  const double h_vt = 1e-5 * std::max(1.0, std::abs(vartheta));
  const auto tp = evaluate_unchecked(theta + h_th, vartheta, false, options).score;
  const auto tm = evaluate_unchecked(theta - h_th, vartheta, false, options).score;
  const auto vp = evaluate_unchecked(theta, vartheta + h_vt, false, options).score;
  const auto vm = evaluate_unchecked(theta, vartheta - h_vt, false, options).score;
  Eigen::Matrix2d jac;
  jac.col(0) = (tp - tm) / (2.0 * h_th);
  jac.col(1) = (vp - vm) / (2.0 * h_vt);
  return jac;
}

double profile_objective(const ModelParams& params, const TruncatedSample& sample) {
  return ProfileProblem(sample, params.family).evaluate(params.theta, params.vartheta).objective;
}

Eigen::Vector2d score_sum(const ModelParams& params, const TruncatedSample& sample) {
  return ProfileProblem(sample, params.family).evaluate(params.theta, params.vartheta).score;
}

}  // namespace truncdep
