#pragma once

// Two-variable box-constrained minimization: projected quasi-Newton with a
// Nelder-Mead fallback.

#include <array>
#include <functional>

#include <Eigen/Core>

namespace truncdep::opt {

struct Box {
  Eigen::Vector2d lo;
  Eigen::Vector2d hi;

  Eigen::Vector2d project(const Eigen::Vector2d& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

struct Evaluation {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
};

/// Must return a non-finite value (not throw) where the objective is undefined.
using Objective = std::function<Evaluation(const Eigen::Vector2d&)>;

struct Options {
  double grad_tol = 1e-8;
  double step_tol = 1e-10;
  int max_iter = 500;
  std::array<bool, 2> fixed{false, false};
};

enum class StopReason { Gradient, Step, IterationCap, LineSearch };

struct Result {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  Evaluation at;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  StopReason reason = StopReason::IterationCap;
};

/// Gradient with components zeroed where a bound blocks descent (or the
/// coordinate is fixed).
Eigen::Vector2d projected_gradient(const Eigen::Vector2d& x, const Eigen::Vector2d& g,
                                   const Box& box, const std::array<bool, 2>& fixed);

/// `initial_hessian` seeds the curvature model; identity scaled by the first
/// gradient is used when it is null or not positive definite.
Result minimize_projected_bfgs(const Objective& f, const Eigen::Vector2d& x0, const Box& box,
                               const Options& options,
                               const Eigen::Matrix2d* initial_hessian = nullptr);

/// Derivative-free fallback; points are clamped into the box.
Result minimize_nelder_mead(const Objective& f, const Eigen::Vector2d& x0,
                            const Eigen::Vector2d& scale, const Box& box, const Options& options);

}  // namespace truncdep::opt
