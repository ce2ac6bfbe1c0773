#pragma once

#include "truncdep/estimation.hpp"
#include "truncdep/sampling.hpp"

namespace truncdep {

struct TestResult {
  double statistic = 0.0;  // sqrt(n_hat) * vartheta_hat / sigma_vartheta_hat
  double p_value = 1.0;
  bool reject = false;
  double level = 0.05;
  double sigma_vartheta_hat = 0.0;
  bool boundary = false;
  std::size_t n_hat = 0;
};

struct TrendReport {
  double life_expectancy_at_mid = 0.0;  // years, E[X | T = G/2]
  double annual_change = 0.0;           // years of life expectancy lost per later founding year
  double annual_change_days = 0.0;
};

/// Upper tail P(Z > z) of the standard normal.
double normal_upper_tail(double z);

/// One-sided test of H0: vartheta = 0 for Gumbel-Barnett against vartheta > 0.
/// The null law of the estimate puts mass 1/2 on vartheta-hat = 0 (p = 0.5)
/// and half-normal mass above it, so p = P(Z > z) for z > 0. The variance
/// comes from the outer-product information at the restricted estimate.
TestResult wald_boundary_test(const FitResult& fit, const TruncatedSample& sample, double level,
                              const FitOptions& options = {});

/// As above with sigma_vartheta_hat supplied (skips the restricted fit).
TestResult wald_boundary_test(const FitResult& fit, double sigma_vartheta_hat, double level);

/// Two-sided z-test of vartheta = 0 for FGM using the information at the
/// unrestricted fit.
TestResult wald_interior_test_fgm(const FitResult& fit, const TruncatedSample& sample,
                                  double level);

/// E[X | T = t] = (1 - vartheta (1 - 2t/G) / 2) / theta and its slope in the
/// founding year.
TrendReport trend_report_fgm(const FitResult& fit, const StudyDesign& design,
                             double days_per_year = 365.25);
TrendReport trend_report_fgm(double theta_hat, double vartheta_hat, const StudyDesign& design,
                             double days_per_year = 365.25);

/// E[X | T = t] under the FGM model.
double fgm_conditional_mean(double theta, double vartheta, const StudyDesign& design, double t);

}  // namespace truncdep
