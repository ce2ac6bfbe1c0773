#include "truncdep/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/LU>

#include "truncdep/detail/kernels.hpp"
#include "truncdep/errors.hpp"
#include "truncdep/inference.hpp"
#include "truncdep/likelihood.hpp"
#include "truncdep/quadrature.hpp"
#include "truncdep/sampling.hpp"

namespace truncdep {

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

Replicate run_one(const ScenarioSpec& spec, std::size_t k, const FitOptions& fit_options) {
  Replicate r;
  r.index = k;
  try {
    Rng rng(derive_seed(spec.seed, k));
    const TruncatedSample sample = simulate_truncated(spec.params0, spec.design, spec.n, rng);
    r.m = sample.size();
    const FitResult f = fit(sample, spec.params0.family, fit_options);
    if (!f.converged) {
      r.error = "optimizer did not converge";
      return r;
    }
    r.theta_hat = f.params_hat.theta;
    r.vartheta_hat = f.params_hat.vartheta;
    r.boundary = f.at_boundary;
    TestResult t;
    if (spec.params0.family == CopulaFamily::GumbelBarnett) {
      // The restricted fit only matters off the boundary.
      t = f.at_boundary ? wald_boundary_test(f, 0.0, spec.level)
                        : wald_boundary_test(f, sample, spec.level, fit_options);
    } else {
      t = wald_interior_test_fgm(f, sample, spec.level);
    }
    r.reject = t.reject;
    r.statistic = t.statistic;
    r.p_value = t.p_value;
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

}  // namespace

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void validate(const ScenarioSpec& spec) {
  validate(spec.design);
  validate(spec.params0);
  if (spec.n < 1) throw DomainError("scenario n must be positive");
  if (spec.replications < 2) throw DomainError("scenario needs at least two replications");
  if (!(spec.level > 0.0 && spec.level < 1.0)) throw DomainError("scenario level outside (0, 1)");
  if (spec.params0.family == CopulaFamily::GumbelBarnett && !(spec.level < 0.5)) {
    throw DomainError("boundary test level must be below 0.5");
  }
}

McSummary summarize(const ScenarioSpec& spec, const std::vector<Replicate>& replicates) {
  McSummary s;
  s.replications = replicates.size();
  std::vector<const Replicate*> good;
  for (const auto& r : replicates) {
    if (r.ok) good.push_back(&r);
  }
  s.successes = good.size();
  s.failures = s.replications - s.successes;
  if (good.empty()) throw ConvergenceError("all replications failed");

  const double count = static_cast<double>(good.size());
  const double th0 = spec.params0.theta;
  const double vt0 = spec.params0.vartheta;
  double sum_th = 0.0;
  double sum_vt = 0.0;
  double sum_m = 0.0;
  double rejections = 0.0;
  double boundaries = 0.0;
  for (const auto* r : good) {
    sum_th += r->theta_hat;
    sum_vt += r->vartheta_hat;
    sum_m += static_cast<double>(r->m);
    rejections += r->reject ? 1.0 : 0.0;
    boundaries += r->boundary ? 1.0 : 0.0;
  }
  const double mean_th = sum_th / count;
  const double mean_vt = sum_vt / count;
  s.bias_theta = mean_th - th0;
  s.bias_vartheta = mean_vt - vt0;
  s.mean_m = sum_m / count;
  s.rejection_rate = rejections / count;
  s.boundary_fraction = boundaries / count;

  double ss_th = 0.0;
  double ss_vt = 0.0;
  double sc_th = 0.0;
  double sc_vt = 0.0;
  for (const auto* r : good) {
    ss_th += (r->theta_hat - th0) * (r->theta_hat - th0);
    ss_vt += (r->vartheta_hat - vt0) * (r->vartheta_hat - vt0);
    sc_th += (r->theta_hat - mean_th) * (r->theta_hat - mean_th);
    sc_vt += (r->vartheta_hat - mean_vt) * (r->vartheta_hat - mean_vt);
  }
  s.var_theta = ss_th / count;
  s.var_vartheta = ss_vt / count;
  s.var_central_theta = sc_th / count;
  s.var_central_vartheta = sc_vt / count;

  // Standard errors of the Monte Carlo means.
  double sq_th = 0.0;
  double sq_vt = 0.0;
  for (const auto* r : good) {
    const double dth = (r->theta_hat - th0) * (r->theta_hat - th0) - s.var_theta;
    const double dvt = (r->vartheta_hat - vt0) * (r->vartheta_hat - vt0) - s.var_vartheta;
    sq_th += dth * dth;
    sq_vt += dvt * dvt;
  }
  const double denom = std::max(count - 1.0, 1.0);
  s.mc_se.bias_theta = std::sqrt(sc_th / denom / count);
  s.mc_se.bias_vartheta = std::sqrt(sc_vt / denom / count);
  s.mc_se.var_theta = std::sqrt(sq_th / denom / count);
  s.mc_se.var_vartheta = std::sqrt(sq_vt / denom / count);
  s.mc_se.rejection_rate = std::sqrt(s.rejection_rate * (1.0 - s.rejection_rate) / count);
  s.mc_se.boundary_fraction = std::sqrt(s.boundary_fraction * (1.0 - s.boundary_fraction) / count);
  return s;
}

McRun run_scenario_detailed(const ScenarioSpec& spec, const McOptions& options) {
  validate(spec);
  McRun run;
  run.replicates.resize(spec.replications);
  parallel_for(spec.replications, options.threads, [&](std::size_t k) {
    run.replicates[k] = run_one(spec, k, options.fit);
  });
  if (options.warn) {
    for (const auto& r : run.replicates) {
      if (!r.ok) options.warn("replication " + std::to_string(r.index) + " excluded: " + r.error);
    }
  }
  run.summary = summarize(spec, run.replicates);
  return run;
}

McSummary run_scenario(const ScenarioSpec& spec, const McOptions& options) {
  return run_scenario_detailed(spec, options).summary;
}

std::vector<PowerPoint> power_curve(const ScenarioSpec& base, const std::vector<double>& grid,
                                    const McOptions& options) {
  std::vector<PowerPoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ScenarioSpec spec = base;
    spec.params0.vartheta = grid[i];
    spec.seed = derive_seed(base.seed, i);
    const McSummary s = run_scenario(spec, options);
    out.push_back({grid[i], s.rejection_rate, s.mc_se.rejection_rate});
  }
  return out;
}

DetScan hessian_det_scan(const std::vector<double>& theta_grid,
                         const std::vector<double>& vartheta_grid, const StudyDesign& design,
                         std::size_t n_mc, std::uint64_t seed, unsigned threads) {
  if (n_mc == 0) throw DomainError("hessian_det_scan: n_mc must be positive");
  DetScan scan;
  scan.thetas = theta_grid;
  scan.varthetas = vartheta_grid;
  scan.det.assign(theta_grid.size() * vartheta_grid.size(), 0.0);
  for (double th : theta_grid) validate(ModelParams{CopulaFamily::GumbelBarnett, th, 0.0});
  for (double vt : vartheta_grid) validate(ModelParams{CopulaFamily::GumbelBarnett, 0.1, vt});

  parallel_for(scan.det.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / vartheta_grid.size();
    const std::size_t j = k % vartheta_grid.size();
    const ModelParams p0{CopulaFamily::GumbelBarnett, theta_grid[i], vartheta_grid[j]};
    Rng rng(derive_seed(seed, k));
    // Pairs outside D have zero score, so only the truncated sample matters.
    const TruncatedSample sample = simulate_truncated(p0, design, n_mc, rng);
    const ProfileProblem problem(sample, p0.family);
    const Eigen::Matrix2d jac = problem.score_jacobian(p0.theta, p0.vartheta) /
                                static_cast<double>(n_mc);
    scan.det[k] = jac.determinant();
  });
  return scan;
}

DetScan hessian_det_scan_quadrature(const std::vector<double>& theta_grid,
                                    const std::vector<double>& vartheta_grid,
                                    const StudyDesign& design, int nodes, unsigned threads) {
  if (nodes < 2) throw DomainError("hessian_det_scan_quadrature: need at least two nodes");
  validate(design);
  for (double th : theta_grid) validate(ModelParams{CopulaFamily::GumbelBarnett, th, 0.0});
  for (double vt : vartheta_grid) validate(ModelParams{CopulaFamily::GumbelBarnett, 0.1, vt});
  DetScan scan;
  scan.thetas = theta_grid;
  scan.varthetas = vartheta_grid;
  scan.det.assign(theta_grid.size() * vartheta_grid.size(), 0.0);

  // Nodes on D: t over (0, G), x = t + u with u over (0, s). The score has
  // log(1 - t/G) terms, so t = G(1 - r^3) with r uniform-spaced clusters nodes
  // at t -> G and keeps the rule spectrally convergent.
  const quad::GaussRule rule = quad::gauss_legendre(nodes);
  struct Node {
    double x, t, log1mt, w;
  };
  std::vector<Node> pts;
  pts.reserve(rule.nodes.size() * rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = 0.5 * (rule.nodes[i] + 1.0);
    const double t = design.big_g * (1.0 - r * r * r);
    const double wt = 0.5 * rule.weights[i] * 3.0 * design.big_g * r * r;
    const double log1mt = 3.0 * std::log(r);
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double u = 0.5 * design.s * (rule.nodes[j] + 1.0);
      pts.push_back({t + u, t, log1mt, wt * 0.5 * design.s * rule.weights[j]});
    }
  }

  SelectionOptions sel;
  sel.second_derivatives = false;
  parallel_for(scan.det.size(), threads, [&](std::size_t k) {
    const double th0 = theta_grid[k / vartheta_grid.size()];
    const double vt0 = vartheta_grid[k % vartheta_grid.size()];
    std::vector<double> weight(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
      weight[p] = pts[p].w * detail::gb_density(th0, vt0, design.big_g, pts[p].x, pts[p].log1mt);
    }
    // E_0[psi_theta] as a function of theta; its Jacobian at theta_0 is E[psi-dot].
    auto mean_score = [&](double th, double vt) {
      const AlphaBundle a = detail::alpha_bundle_unchecked(
          ModelParams{CopulaFamily::GumbelBarnett, th, vt}, design, sel);
      Eigen::Vector2d acc = Eigen::Vector2d::Zero();
      for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto sc = detail::gb_density_score(th, vt, design.big_g, pts[p].x, pts[p].log1mt);
        acc(0) += weight[p] * (sc.d_theta - a.d_theta / a.alpha);
        acc(1) += weight[p] * (sc.d_vartheta - a.d_vartheta / a.alpha);
      }
      return acc;
    };
    const double h_th = 1e-5 * std::max(1.0, std::abs(th0));
    const double h_vt = 1e-5 * std::max(1.0, std::abs(vt0));
    Eigen::Matrix2d jac;
    jac.col(0) = (mean_score(th0 + h_th, vt0) - mean_score(th0 - h_th, vt0)) / (2.0 * h_th);
    jac.col(1) = (mean_score(th0, vt0 + h_vt) - mean_score(th0, vt0 - h_vt)) / (2.0 * h_vt);
    scan.det[k] = jac.determinant();
  });
  return scan;
}

}  // namespace truncdep
