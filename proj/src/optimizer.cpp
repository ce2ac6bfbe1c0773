#include "truncdep/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace truncdep::opt {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

bool positive_definite(const Eigen::Matrix2d& b) {
  return std::isfinite(b.sum()) && b(0, 0) > 0.0 && b.determinant() > 0.0;
}

Eigen::Matrix2d default_hessian(const Eigen::Vector2d& g, const Eigen::Vector2d& x) {
  // Unit step in the largest-magnitude coordinate scale.
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 2; ++i) {
    const double scale = std::max(std::abs(x[i]), 1e-3);
    b(i, i) = std::max(std::abs(g[i]) / scale, 1e-8);
  }
  return b;
}

Evaluation safe_eval(const Objective& f, const Eigen::Vector2d& x, int& count) {
  ++count;
  Evaluation e = f(x);
  if (!std::isfinite(e.value) || !e.gradient.allFinite()) {
    e.value = std::numeric_limits<double>::infinity();
  }
  return e;
}

}  // namespace

Eigen::Vector2d projected_gradient(const Eigen::Vector2d& x, const Eigen::Vector2d& g,
                                   const Box& box, const std::array<bool, 2>& fixed) {
  Eigen::Vector2d pg = g;
  for (int i = 0; i < 2; ++i) {
    if (fixed[i] || (x[i] <= box.lo[i] && g[i] > 0.0) || (x[i] >= box.hi[i] && g[i] < 0.0)) {
      pg[i] = 0.0;
    }
  }
  return pg;
}

Result minimize_projected_bfgs(const Objective& f, const Eigen::Vector2d& x0, const Box& box,
                               const Options& options, const Eigen::Matrix2d* initial_hessian) {
  Result r;
  r.x = box.project(x0);
  r.at = safe_eval(f, r.x, r.evaluations);
  if (!std::isfinite(r.at.value)) {
    r.reason = StopReason::LineSearch;
    return r;
  }

  Eigen::Matrix2d b = (initial_hessian && positive_definite(*initial_hessian))
                          ? *initial_hessian
                          : default_hessian(r.at.gradient, r.x);
  bool fresh = true;

  for (r.iterations = 0; r.iterations < options.max_iter; ++r.iterations) {
    const Eigen::Vector2d& g = r.at.gradient;
    const Eigen::Vector2d pg = projected_gradient(r.x, g, box, options.fixed);
    if (pg.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
      r.converged = true;
      r.reason = StopReason::Gradient;
      return r;
    }

    std::array<bool, 2> free{};
    for (int i = 0; i < 2; ++i) free[i] = pg[i] != 0.0;
    Eigen::Vector2d d = Eigen::Vector2d::Zero();
    if (free[0] && free[1]) {
      d = -b.ldlt().solve(g);
    } else {
      for (int i = 0; i < 2; ++i) {
        if (free[i]) d[i] = -g[i] / b(i, i);
      }
    }
    if (!d.allFinite() || g.dot(d) >= 0.0) {
      b = default_hessian(g, r.x);
      fresh = true;
      d = Eigen::Vector2d::Zero();
      for (int i = 0; i < 2; ++i) {
        if (free[i]) d[i] = -g[i] / b(i, i);
      }
    }

    // Backtracking along the projection arc.
    double lambda = 1.0;
    bool accepted = false;
    Eigen::Vector2d xn;
    Evaluation en;
    for (int h = 0; h < kMaxHalvings; ++h, lambda *= 0.5) {
      xn = box.project(r.x + lambda * d);
      for (int i = 0; i < 2; ++i) {
        if (options.fixed[i]) xn[i] = r.x[i];
      }
      if ((xn - r.x).lpNorm<Eigen::Infinity>() == 0.0) break;
      en = safe_eval(f, xn, r.evaluations);
      if (en.value <= r.at.value + kArmijo * g.dot(xn - r.x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!fresh) {
        b = default_hessian(g, r.x);
        fresh = true;
        continue;
      }
      r.reason = StopReason::LineSearch;
      return r;
    }

    const Eigen::Vector2d s = xn - r.x;
    const Eigen::Vector2d y = en.gradient - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Eigen::Vector2d bs = b * s;
      b += y * y.transpose() / sy - bs * bs.transpose() / s.dot(bs);
      fresh = false;
    }
    r.x = xn;
    r.at = en;

    if (s.lpNorm<Eigen::Infinity>() <= options.step_tol) {
      r.converged = true;
      r.reason = StopReason::Step;
      ++r.iterations;
      return r;
    }
  }
  r.reason = StopReason::IterationCap;
  return r;
}

Result minimize_nelder_mead(const Objective& f, const Eigen::Vector2d& x0,
                            const Eigen::Vector2d& scale, const Box& box, const Options& options) {
  Result r;
  const auto place = [&](Eigen::Vector2d x) {
    x = box.project(x);
    for (int i = 0; i < 2; ++i) {
      if (options.fixed[i]) x[i] = box.project(x0)[i];
    }
    return x;
  };
  const auto value = [&](const Eigen::Vector2d& x) { return safe_eval(f, x, r.evaluations).value; };

  std::array<Eigen::Vector2d, 3> pts = {place(x0), place(x0 + Eigen::Vector2d(scale[0], 0.0)),
                                        place(x0 + Eigen::Vector2d(0.0, scale[1]))};
  std::array<double, 3> vals = {value(pts[0]), value(pts[1]), value(pts[2])};

  for (r.iterations = 0; r.iterations < 20 * options.max_iter; ++r.iterations) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = idx[0];
    const int mid = idx[1];
    const int worst = idx[2];
    const double size = std::max((pts[mid] - pts[best]).lpNorm<Eigen::Infinity>(),
                                 (pts[worst] - pts[best]).lpNorm<Eigen::Infinity>());
    if (size <= options.step_tol &&
        std::abs(vals[worst] - vals[best]) <= 1e-14 * (1.0 + std::abs(vals[best]))) {
      r.converged = true;
      r.reason = StopReason::Step;
      break;
    }
    const Eigen::Vector2d centroid = 0.5 * (pts[best] + pts[mid]);
    const Eigen::Vector2d xr = place(centroid + (centroid - pts[worst]));
    const double fr = value(xr);
    if (fr < vals[best]) {
      const Eigen::Vector2d xe = place(centroid + 2.0 * (centroid - pts[worst]));
      const double fe = value(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[mid]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const Eigen::Vector2d xc = place(centroid + 0.5 * (pts[worst] - centroid));
      const double fc = value(xc);
      if (fc < vals[worst]) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (int k : {mid, worst}) {
          pts[k] = place(pts[best] + 0.5 * (pts[k] - pts[best]));
          vals[k] = value(pts[k]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  r.x = pts[best];
  r.at = safe_eval(f, r.x, r.evaluations);
  return r;
}

}  // namespace truncdep::opt
