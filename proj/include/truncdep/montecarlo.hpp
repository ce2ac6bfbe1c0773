#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "truncdep/copula.hpp"
#include "truncdep/estimation.hpp"

namespace truncdep {

struct ScenarioSpec {
  StudyDesign design;
  std::size_t n = 10000;
  ModelParams params0;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  double level = 0.05;
};

void validate(const ScenarioSpec& spec);

struct Replicate {
  std::size_t index = 0;
  std::size_t m = 0;
  bool ok = false;
  double theta_hat = 0.0;
  double vartheta_hat = 0.0;
  bool boundary = false;
  bool reject = false;
  double statistic = 0.0;
  double p_value = 1.0;
  std::string error;
};

struct McStandardErrors {
  double bias_theta = 0.0;
  double bias_vartheta = 0.0;
  double var_theta = 0.0;
  double var_vartheta = 0.0;
  double rejection_rate = 0.0;
  double boundary_fraction = 0.0;
};

/// var_* follow the table convention (1/R) sum (est - truth)^2, i.e. the
/// Monte Carlo MSE; var_central_* are the central (1/R) sum (est - mean)^2, so
/// bias^2 + var_central = var.
struct McSummary {
  double bias_theta = 0.0;
  double bias_vartheta = 0.0;
  double var_theta = 0.0;
  double var_vartheta = 0.0;
  double var_central_theta = 0.0;
  double var_central_vartheta = 0.0;
  double rejection_rate = 0.0;
  double boundary_fraction = 0.0;
  McStandardErrors mc_se;
  std::size_t replications = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  double mean_m = 0.0;
};

struct McOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  FitOptions fit;
  std::function<void(const std::string&)> warn;  // receives per-failure messages
};

struct McRun {
  McSummary summary;
  std::vector<Replicate> replicates;  // in replication order
};

/// Replicate k uses the stream derive_seed(spec.seed, k), so results do not
/// depend on the thread count.
McRun run_scenario_detailed(const ScenarioSpec& spec, const McOptions& options = {});
McSummary run_scenario(const ScenarioSpec& spec, const McOptions& options = {});

/// Aggregation used by run_scenario; exposed for testing.
McSummary summarize(const ScenarioSpec& spec, const std::vector<Replicate>& replicates);

struct PowerPoint {
  double vartheta0 = 0.0;
  double rejection_rate = 0.0;
  double mc_se = 0.0;
};

/// One scenario per grid value, seeded derive_seed(base.seed, grid index).
std::vector<PowerPoint> power_curve(const ScenarioSpec& base, const std::vector<double>& grid,
                                    const McOptions& options = {});

struct DetScan {
  std::vector<double> thetas;
  std::vector<double> varthetas;
  std::vector<double> det;  // det[i * varthetas.size() + j] at (thetas[i], varthetas[j])

  double at(std::size_t i, std::size_t j) const { return det[i * varthetas.size() + j]; }
};

/// Determinant of the Monte Carlo average Jacobian of the Gumbel-Barnett
/// profile score over n_mc latent draws at each grid point.
DetScan hessian_det_scan(const std::vector<double>& theta_grid,
                         const std::vector<double>& vartheta_grid, const StudyDesign& design,
                         std::size_t n_mc, std::uint64_t seed, unsigned threads = 0);

/// Same expectation by tensor Gauss-Legendre quadrature over the truncation
/// region (`nodes` per axis) instead of sampling. Deterministic; resolves the
/// near-singular corner at small theta where Monte Carlo noise dominates.
DetScan hessian_det_scan_quadrature(const std::vector<double>& theta_grid,
                                    const std::vector<double>& vartheta_grid,
                                    const StudyDesign& design, int nodes = 200,
                                    unsigned threads = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace truncdep
