#include "truncdep/inference.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "truncdep/errors.hpp"

namespace truncdep {

namespace {

void require_level(double level, double upper) {
  if (!(level > 0.0 && level < upper)) {
    throw DomainError("test level " + std::to_string(level) + " outside (0, " +
                      std::to_string(upper) + ")");
  }
}

double inverse_22(const Eigen::Matrix2d& info) {
  const double det = info.determinant();
  if (!(det > 0.0) || !(info(0, 0) > 0.0)) {
    throw DomainError("information matrix estimate is not invertible");
  }
  return info(0, 0) / det;
}

}  // namespace

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

TestResult wald_boundary_test(const FitResult& fit, double sigma_vartheta_hat, double level) {
  if (fit.params_hat.family != CopulaFamily::GumbelBarnett) {
    throw DomainError("wald_boundary_test applies to the Gumbel-Barnett family");
  }
  require_level(level, 0.5);
  TestResult r;
  r.level = level;
  r.sigma_vartheta_hat = sigma_vartheta_hat;
  r.n_hat = fit.n_hat;
  r.boundary = fit.params_hat.vartheta == 0.0;
  if (r.boundary) {
    r.statistic = 0.0;
    r.p_value = 0.5;
    r.reject = false;
    return r;
  }
  r.statistic = std::sqrt(static_cast<double>(fit.n_hat)) * fit.params_hat.vartheta /
                sigma_vartheta_hat;
  r.p_value = std::max(normal_upper_tail(r.statistic), std::numeric_limits<double>::min());
  r.reject = r.p_value <= level;
  return r;
}

TestResult wald_boundary_test(const FitResult& fit, const TruncatedSample& sample, double level,
                              const FitOptions& options) {
  if (fit.params_hat.family != CopulaFamily::GumbelBarnett) {
    throw DomainError("wald_boundary_test applies to the Gumbel-Barnett family");
  }
  require_level(level, 0.5);
  const FitResult restricted = fit_restricted(sample, CopulaFamily::GumbelBarnett, options);
  const double sigma2 = inverse_22(fisher_info_hat(restricted.params_hat, sample));
  return wald_boundary_test(fit, std::sqrt(sigma2), level);
}

TestResult wald_interior_test_fgm(const FitResult& fit, const TruncatedSample& sample,
                                  double level) {
  if (fit.params_hat.family != CopulaFamily::FGM) {
    throw DomainError("wald_interior_test_fgm applies to the FGM family");
  }
  require_level(level, 1.0);
  const double sigma2 = inverse_22(fisher_info_hat(fit.params_hat, sample));
  TestResult r;
  r.level = level;
  r.n_hat = fit.n_hat;
  r.sigma_vartheta_hat = std::sqrt(sigma2);
  r.boundary = false;
  r.statistic = std::sqrt(static_cast<double>(fit.n_hat)) * fit.params_hat.vartheta /
                r.sigma_vartheta_hat;
  r.p_value = std::min(1.0, 2.0 * normal_upper_tail(std::abs(r.statistic)));
  r.reject = r.p_value <= level;
  return r;
}

double fgm_conditional_mean(double theta, double vartheta, const StudyDesign& design, double t) {
  return (1.0 - 0.5 * vartheta * (1.0 - 2.0 * t / design.big_g)) / theta;
}

TrendReport trend_report_fgm(double theta_hat, double vartheta_hat, const StudyDesign& design,
                             double days_per_year) {
  validate(design);
  if (!(theta_hat > 0.0)) throw DomainError("trend_report_fgm: theta must be positive");
  TrendReport r;
  r.life_expectancy_at_mid = fgm_conditional_mean(theta_hat, vartheta_hat, design,
                                                  0.5 * design.big_g);
  // T counts back from the study start, so a founding one year later lowers
  // t by one: the drop per year is dE/dt = vartheta / (theta G).
  r.annual_change = vartheta_hat / (theta_hat * design.big_g);
  r.annual_change_days = r.annual_change * days_per_year;
  return r;
}

TrendReport trend_report_fgm(const FitResult& fit, const StudyDesign& design,
                             double days_per_year) {
  if (fit.params_hat.family != CopulaFamily::FGM) {
    throw DomainError("trend_report_fgm needs an FGM fit");
  }
  return trend_report_fgm(fit.params_hat.theta, fit.params_hat.vartheta, design, days_per_year);
}

}  // namespace truncdep
