#pragma once

#include <string_view>

namespace truncdep {

enum class CopulaFamily { GumbelBarnett, FGM };

std::string_view to_string(CopulaFamily family);
/// Accepts "gb"/"gumbel-barnett" and "fgm" (case-insensitive).
CopulaFamily parse_family(std::string_view text);

/// Half-widths that keep the parameter box away from singular edges.
struct ParamBounds {
  double eps = 1e-4;           // theta in [eps, 1/eps]
  double eps_vartheta = 1e-6;  // vartheta kept 1 - eps_vartheta away from +-1

  double theta_lo() const { return eps; }
  double theta_hi() const { return 1.0 / eps; }
  double vartheta_lo(CopulaFamily family) const;
  double vartheta_hi(CopulaFamily) const { return 1.0 - eps_vartheta; }
};

/// Exponential rate theta (1/years) and copula dependence vartheta.
struct ModelParams {
  CopulaFamily family = CopulaFamily::GumbelBarnett;
  double theta = 0.1;
  double vartheta = 0.0;
};

/// Birth-period length G and observation-period length s, in years.
struct StudyDesign {
  double big_g = 24.0;
  double s = 3.0;
};

void validate(const ModelParams& params, const ParamBounds& bounds = {});
void validate(const StudyDesign& design);

// Copula C^vartheta(u, v) and the conditional CDF v -> dC/du.

double copula_cdf(CopulaFamily family, double u, double v, double vartheta);
double cond_cdf_given_u(CopulaFamily family, double u, double v, double vartheta);
/// Copula density d^2 C / du dv.
double copula_density(CopulaFamily family, double u, double v, double vartheta);

/// Solves cond_cdf_given_u(u, v) = p for v; residual at most 1e-12.
double inv_cond_cdf_given_u(CopulaFamily family, double u, double p, double vartheta);

/// Joint density of (X, T) with X ~ Exp(theta), T ~ Unif[0, G] coupled by the
/// copula. Requires x > 0 and 0 < t < G.
double joint_density(const ModelParams& params, const StudyDesign& design, double x, double t);

/// Joint CDF P{X <= x, T <= t}; total on the real plane.
double joint_cdf(const ModelParams& params, const StudyDesign& design, double x, double t);

/// Kendall's tau. FGM: 2 vartheta / 9. Gumbel-Barnett: tensor Gauss-Legendre
/// evaluation of 1 - 4 * int int C_u C_v du dv.
double kendall_tau(CopulaFamily family, double vartheta);

}  // namespace truncdep
