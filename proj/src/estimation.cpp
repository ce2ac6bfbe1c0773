#include "truncdep/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "truncdep/errors.hpp"
#include "truncdep/optimizer.hpp"

namespace truncdep {

namespace {

SelectionOptions first_order_only() {
  SelectionOptions o;
  o.second_derivatives = false;
  return o;
}

opt::Box make_box(CopulaFamily family, const ParamBounds& b) {
  return {Eigen::Vector2d(b.theta_lo(), b.vartheta_lo(family)),
          Eigen::Vector2d(b.theta_hi(), b.vartheta_hi(family))};
}

double naive_rate(const TruncatedSample& sample) {
  double total = 0.0;
  for (const auto& o : sample.observations) total += o.x_tilde;
  return static_cast<double>(sample.size()) / total;
}

struct Candidate {
  opt::Result result;
  double objective = -std::numeric_limits<double>::infinity();
};

Candidate run_from(const ProfileProblem& problem, const Eigen::Vector2d& start, const opt::Box& box,
                   const opt::Options& opts) {
  const double m = static_cast<double>(problem.size());
  const SelectionOptions sel = first_order_only();
  const opt::Objective objective = [&](const Eigen::Vector2d& x) {
    opt::Evaluation e;
    const ProfileEval pe = problem.evaluate_unchecked(x[0], x[1], false, sel);
    e.value = -pe.objective / m;
    e.gradient = -pe.score / m;
    return e;
  };

  const Eigen::Vector2d x0 = box.project(start);
  // Outer-product (BHHH) curvature at the start point.
  const ProfileEval first = problem.evaluate_unchecked(x0[0], x0[1], true, sel);
  const Eigen::Matrix2d bhhh = first.outer / m;

  Candidate c;
  c.result = opt::minimize_projected_bfgs(objective, x0, box, opts, &bhhh);
  if (!c.result.converged) {
    const Eigen::Vector2d scale(0.1 * x0[0], 0.1);
    opt::Result nm = opt::minimize_nelder_mead(objective, c.result.x,
                                               scale, box, opts);
    // Polish the derivative-free point with a fresh quasi-Newton run.
    opt::Result polished = opt::minimize_projected_bfgs(objective, nm.x, box, opts, &bhhh);
    if (polished.at.value <= nm.at.value) {
      polished.iterations += c.result.iterations + nm.iterations;
      c.result = polished;
    } else {
      nm.iterations += c.result.iterations;
      c.result = nm;
    }
  }
  c.objective = -c.result.at.value * m;
  return c;
}

FitResult finish(const ProfileProblem& problem, const opt::Result& best, bool restricted,
                 const FitOptions& options) {
  const CopulaFamily family = problem.family();
  const auto& design = problem.design();
  const double m = static_cast<double>(problem.size());

  FitResult out;
  out.m = problem.size();
  out.params_hat = {family, best.x[0], best.x[1]};
  const double lo = options.bounds.vartheta_lo(family);
  if (restricted) {
    out.params_hat.vartheta = 0.0;
  } else if (out.params_hat.vartheta - lo < options.boundary_snap) {
    out.params_hat.vartheta = lo;
  }
  out.at_boundary = family == CopulaFamily::GumbelBarnett && out.params_hat.vartheta == 0.0;
  validate(out.params_hat, options.bounds);

  const ProfileEval pe =
      problem.evaluate_unchecked(out.params_hat.theta, out.params_hat.vartheta, true,
                                 first_order_only());
  const double a = pe.selection.alpha;
  if (!(a > 0.0 && a < 1.0)) throw InvariantError("selection probability outside (0, 1) at fit");
  out.n_hat = profile_n(out.m, a);
  const double n_hat = static_cast<double>(out.n_hat);
  out.profile_objective = pe.objective;
  // sum log f = l_p + M log alpha.
  out.log_lik = pe.objective + m * std::log(a) + m * std::log(n_hat) +
                (design.big_g + design.s) * design.big_g - n_hat * a;
  out.score = pe.score;
  out.info_hat = pe.outer / n_hat;
  if (out.info_hat.determinant() > 0.0 && out.info_hat(0, 0) > 0.0) {
    out.cov_hat = out.info_hat.inverse();
    out.cov_available = true;
    out.se = (out.cov_hat.diagonal() / n_hat).cwiseSqrt();
  }

  auto slack = [&](int i) {
    return std::max(options.kkt_tol * m, options.kkt_score_z * std::sqrt(pe.outer(i, i)));
  };
  bool kkt = std::abs(pe.score[0]) <= slack(0);
  if (!restricted) {
    const bool at_lower = out.params_hat.vartheta <= lo;
    const bool at_upper = out.params_hat.vartheta >= options.bounds.vartheta_hi(family);
    if (at_lower) {
      kkt = kkt && pe.score[1] <= slack(1);
    } else if (at_upper) {
      kkt = kkt && pe.score[1] >= -slack(1);
    } else {
      kkt = kkt && std::abs(pe.score[1]) <= slack(1);
    }
  }
  out.kkt_ok = kkt;
  // A line search that cannot decrease the objective at a first-order
  // optimal point is a rounding-limited stop, not a failure.
  out.converged =
      kkt && (best.converged || best.reason == opt::StopReason::LineSearch);
  out.iterations = best.iterations;
  return out;
}

}  // namespace

FitResult fit(const TruncatedSample& sample, CopulaFamily family, const FitOptions& options) {
  if (sample.size() < 2) throw DomainError("fit needs at least two observations");
  const auto& first = sample.observations.front();
  const bool identical = std::all_of(sample.observations.begin(), sample.observations.end(),
                                     [&](const ObservedPair& o) {
                                       return o.x_tilde == first.x_tilde &&
                                              o.t_tilde == first.t_tilde;
                                     });
  if (identical) throw DomainError("fit: all observations are identical");

  const ProfileProblem problem(sample, family);
  const opt::Box box = make_box(family, options.bounds);
  opt::Options opts;
  opts.grad_tol = options.grad_tol;
  opts.step_tol = options.step_tol;
  opts.max_iter = options.max_iter;

  const double rate = naive_rate(sample);
  std::vector<double> thetas = {rate};
  std::vector<double> varthetas;
  if (family == CopulaFamily::GumbelBarnett) {
    varthetas = {1e-3, 0.5};
  } else {
    varthetas = {0.0};
  }
  if (options.multistart) {
    thetas = {0.7 * rate, rate, 1.4 * rate};
    varthetas = family == CopulaFamily::GumbelBarnett ? std::vector<double>{1e-3, 0.5, 0.9}
                                                      : std::vector<double>{-0.5, 0.0, 0.5};
  }

  Candidate best;
  bool have = false;
  for (double th : thetas) {
    for (double vt : varthetas) {
      Candidate c = run_from(problem, Eigen::Vector2d(th, vt), box, opts);
      if (!std::isfinite(c.objective)) continue;
      const double tie = 1e-9 * (1.0 + std::abs(c.objective));
      const bool better = !have || c.objective > best.objective + tie ||
                          (std::abs(c.objective - best.objective) <= tie &&
                           c.result.x[1] < best.result.x[1]);
      if (better) {
        best = c;
        have = true;
      }
    }
  }
  if (!have) throw ConvergenceError("fit: no start produced a finite objective");
  return finish(problem, best.result, false, options);
}

FitResult fit_restricted(const TruncatedSample& sample, CopulaFamily family,
                         const FitOptions& options) {
  if (sample.size() < 1) throw DomainError("fit_restricted needs at least one observation");
  const ProfileProblem problem(sample, family);
  opt::Box box = make_box(family, options.bounds);
  box.lo[1] = 0.0;
  box.hi[1] = 0.0;
  opt::Options opts;
  opts.grad_tol = options.grad_tol;
  opts.step_tol = options.step_tol;
  opts.max_iter = options.max_iter;
  opts.fixed = {false, true};

  const double rate = naive_rate(sample);
  const std::vector<double> thetas =
      options.multistart ? std::vector<double>{0.7 * rate, rate, 1.4 * rate}
                         : std::vector<double>{rate};
  Candidate best;
  bool have = false;
  for (double th : thetas) {
    Candidate c = run_from(problem, Eigen::Vector2d(th, 0.0), box, opts);
    if (!std::isfinite(c.objective)) continue;
    if (!have || c.objective > best.objective) {
      best = c;
      have = true;
    }
  }
  if (!have) throw ConvergenceError("fit_restricted: no start produced a finite objective");
  return finish(problem, best.result, true, options);
}

Eigen::Matrix2d fisher_info_hat(const ModelParams& params_hat, const TruncatedSample& sample) {
  const ProfileProblem problem(sample, params_hat.family);
  const ProfileEval pe = problem.evaluate(params_hat.theta, params_hat.vartheta, true);
  const auto n_hat = static_cast<double>(profile_n(sample.size(), pe.selection.alpha));
  return pe.outer / n_hat;
}

}  // namespace truncdep
