#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "truncdep/copula.hpp"
#include "truncdep/likelihood.hpp"
#include "truncdep/sampling.hpp"

namespace truncdep {

struct FitOptions {
  ParamBounds bounds;
  /// Start from a 3 x 3 grid around the naive exponential rate; otherwise a
  /// single start.
  bool multistart = true;
  double grad_tol = 1e-8;  // on |sum psi|_inf / M
  double step_tol = 1e-10;
  int max_iter = 500;
  /// vartheta within this distance of the lower bound is snapped onto it.
  double boundary_snap = 1e-8;
  /// Slack for the first-order optimality check reported in FitResult: a
  /// score component passes if |g| <= kkt_tol * M or, scale-free,
  /// |g| <= kkt_score_z * sqrt(sum psi^2), i.e. it moves the estimate by a
  /// negligible fraction of a standard error.
  double kkt_tol = 1e-6;
  double kkt_score_z = 1e-4;
};

struct FitResult {
  ModelParams params_hat;
  std::size_t m = 0;
  std::size_t n_hat = 0;
  bool at_boundary = false;  // Gumbel-Barnett vartheta-hat clamped to 0
  double log_lik = 0.0;      // log l(params_hat, n_hat)
  double profile_objective = 0.0;
  Eigen::Vector2d score = Eigen::Vector2d::Zero();  // sum psi at the estimate
  Eigen::Matrix2d info_hat = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d cov_hat = Eigen::Matrix2d::Zero();  // info_hat^{-1}, per latent unit
  bool cov_available = false;
  Eigen::Vector2d se = Eigen::Vector2d::Zero();  // sqrt(diag(cov_hat) / n_hat)
  bool converged = false;
  bool kkt_ok = false;
  int iterations = 0;
};

/// Maximizes the profile objective over the admissible box.
FitResult fit(const TruncatedSample& sample, CopulaFamily family, const FitOptions& options = {});

/// vartheta held at 0 (independent truncation); one-dimensional in theta.
FitResult fit_restricted(const TruncatedSample& sample, CopulaFamily family,
                         const FitOptions& options = {});

/// (1 / n_hat) sum_j psi psi' with n_hat = profile_n(M, alpha(params_hat)).
Eigen::Matrix2d fisher_info_hat(const ModelParams& params_hat, const TruncatedSample& sample);

}  // namespace truncdep
