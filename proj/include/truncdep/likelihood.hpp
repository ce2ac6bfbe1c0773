#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "truncdep/copula.hpp"
#include "truncdep/sampling.hpp"
#include "truncdep/selection.hpp"

namespace truncdep {

struct ProfileScore {
  double s_theta = 0.0;
  double s_vartheta = 0.0;
};

/// Poisson-approximated log-likelihood
///   sum_j log(n f(x_j, t_j)) + (G + s) G - n alpha,
/// with n treated as a positive real.
double log_likelihood(const ModelParams& params, double n, const TruncatedSample& sample);

/// Largest integer strictly below m / alpha. The integer maximizer in n of
/// log_likelihood at fixed parameters is this value or the next one.
/// m must be positive.
std::size_t profile_n(std::size_t m, double alpha);

/// Gradient of log_likelihood in (theta, vartheta) at fixed n.
Eigen::Vector2d full_score(const ModelParams& params, double n, const TruncatedSample& sample);

/// Profile score of one pair; zero outside the truncation region.
ProfileScore profile_score(const ModelParams& params, const ObservedPair& pair,
                           const StudyDesign& design, const AlphaBundle& selection);
ProfileScore profile_score(const ModelParams& params, const LatentPair& pair,
                           const StudyDesign& design, const AlphaBundle& selection);
ProfileScore profile_score(const ModelParams& params, const ObservedPair& pair,
                           const StudyDesign& design);

/// Value, gradient and score outer-product sum of the profile objective
///   l_p = sum_j log f(x_j, t_j) - M log alpha.
struct ProfileEval {
  double objective = 0.0;
  Eigen::Vector2d score = Eigen::Vector2d::Zero();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  AlphaBundle selection;
};

/// Observations cached in the form the per-point kernels consume. Sums run in
/// observation order, so results are bit-reproducible.
class ProfileProblem {
 public:
  ProfileProblem(const TruncatedSample& sample, CopulaFamily family);

  CopulaFamily family() const { return family_; }
  const StudyDesign& design() const { return design_; }
  std::size_t size() const { return x_.size(); }

  /// Validates parameters against the admissible box first.
  ProfileEval evaluate(double theta, double vartheta, bool with_outer = false) const;
  /// No box check; parameters may sit just outside it (numerical Jacobians).
  ProfileEval evaluate_unchecked(double theta, double vartheta, bool with_outer,
                                 const SelectionOptions& options) const;

  /// Central-difference Jacobian of the score sum, step 1e-5 * max(1, |p|).
  Eigen::Matrix2d score_jacobian(double theta, double vartheta) const;

 private:
  CopulaFamily family_;
  StudyDesign design_;
  std::vector<double> x_;
  std::vector<double> t_;
  std::vector<double> log1mt_;
};

double profile_objective(const ModelParams& params, const TruncatedSample& sample);
Eigen::Vector2d score_sum(const ModelParams& params, const TruncatedSample& sample);

}  // namespace truncdep
