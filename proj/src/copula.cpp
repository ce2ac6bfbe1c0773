#include "truncdep/copula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "truncdep/detail/kernels.hpp"
#include "truncdep/errors.hpp"
#include "truncdep/quadrature.hpp"

namespace truncdep {

namespace {

void require_unit(double w, const char* name) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(w));
  }
}

void require_open_unit(double w, const char* name) {
  if (!(w > 0.0 && w < 1.0)) {
    throw DomainError(std::string(name) + " must lie in (0, 1), got " + std::to_string(w));
  }
}

void require_vartheta(CopulaFamily family, double vartheta) {
  const ParamBounds bounds;
  if (!(vartheta >= bounds.vartheta_lo(family) && vartheta <= bounds.vartheta_hi(family))) {
    throw DomainError("vartheta " + std::to_string(vartheta) + " outside the " +
                      std::string(to_string(family)) + " range");
  }
}

// v -> dC/du for Gumbel-Barnett: 1 - (1-v)^{1 - vt a} (1 - vt b), a = log(1-u),
// b = log(1-v).
double gb_cond(double log1mu, double v, double vartheta) {
  if (v >= 1.0) return 1.0;
  const double b = std::log1p(-v);
  return 1.0 - std::exp((1.0 - vartheta * log1mu) * b) * (1.0 - vartheta * b);
}

double gb_cond_density(double log1mu, double v, double vartheta) {
  const double b = std::log1p(-v);
  const double q = 1.0 - vartheta * log1mu;
  return -std::exp(-vartheta * log1mu * b) * (q * (vartheta * b - 1.0) + vartheta);
}

}  // namespace

std::string_view to_string(CopulaFamily family) {
  return family == CopulaFamily::GumbelBarnett ? "gb" : "fgm";
}

CopulaFamily parse_family(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "gb" || lower == "gumbel-barnett" || lower == "gumbelbarnett") {
    return CopulaFamily::GumbelBarnett;
  }
  if (lower == "fgm") return CopulaFamily::FGM;
  throw DomainError("unknown copula family '" + std::string(text) + "' (expected gb or fgm)");
}

double ParamBounds::vartheta_lo(CopulaFamily family) const {
  return family == CopulaFamily::GumbelBarnett ? 0.0 : eps_vartheta - 1.0;
}

void validate(const ModelParams& params, const ParamBounds& bounds) {
  if (!(params.theta >= bounds.theta_lo() && params.theta <= bounds.theta_hi())) {
    throw DomainError("theta " + std::to_string(params.theta) + " outside [" +
                      std::to_string(bounds.theta_lo()) + ", " +
                      std::to_string(bounds.theta_hi()) + "]");
  }
  const double lo = bounds.vartheta_lo(params.family);
  const double hi = bounds.vartheta_hi(params.family);
  if (!(params.vartheta >= lo && params.vartheta <= hi)) {
    throw DomainError("vartheta " + std::to_string(params.vartheta) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "] for family " +
                      std::string(to_string(params.family)));
  }
}

void validate(const StudyDesign& design) {
  if (!(design.big_g > 0.0 && std::isfinite(design.big_g))) {
    throw DomainError("G must be positive and finite");
  }
  if (!(design.s > 0.0 && std::isfinite(design.s))) {
    throw DomainError("s must be positive and finite");
  }
}

double copula_cdf(CopulaFamily family, double u, double v, double vartheta) {
  require_unit(u, "u");
  require_unit(v, "v");
  require_vartheta(family, vartheta);
  if (family == CopulaFamily::FGM) return u * v * (1.0 + vartheta * (1.0 - u) * (1.0 - v));
  if (u >= 1.0) return v;
  if (v >= 1.0) return u;
  const double a = std::log1p(-u);
  const double b = std::log1p(-v);
  return u + v - 1.0 + (1.0 - u) * (1.0 - v) * std::exp(-vartheta * a * b);
}

double cond_cdf_given_u(CopulaFamily family, double u, double v, double vartheta) {
  require_open_unit(u, "u");
  require_unit(v, "v");
  require_vartheta(family, vartheta);
  if (family == CopulaFamily::FGM) return v + vartheta * (1.0 - 2.0 * u) * v * (1.0 - v);
  return gb_cond(std::log1p(-u), v, vartheta);
}

double copula_density(CopulaFamily family, double u, double v, double vartheta) {
  require_open_unit(u, "u");
  require_open_unit(v, "v");
  require_vartheta(family, vartheta);
  if (family == CopulaFamily::FGM) return 1.0 + vartheta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
  return gb_cond_density(std::log1p(-u), v, vartheta);
}

double inv_cond_cdf_given_u(CopulaFamily family, double u, double p, double vartheta) {
  require_open_unit(u, "u");
  require_open_unit(p, "p");
  require_vartheta(family, vartheta);

  if (family == CopulaFamily::FGM) {
    // k v^2 - (1 + k) v + p = 0 with k = vartheta (1 - 2u); root in [0, 1].
    const double k = vartheta * (1.0 - 2.0 * u);
    const double disc = (1.0 + k) * (1.0 + k) - 4.0 * k * p;
    return 2.0 * p / ((1.0 + k) + std::sqrt(std::max(disc, 0.0)));
  }

  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 200;
  const double log1mu = std::log1p(-u);
  double lo = 0.0;
  double hi = 1.0 - 1e-15;
  if (gb_cond(log1mu, hi, vartheta) - p <= kTol) return hi;

  // Safeguarded Newton: keep a bracket, fall back to bisection when the
  // Newton step leaves it.
  double v = p;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const double r = gb_cond(log1mu, v, vartheta) - p;
    if (std::abs(r) <= kTol) return v;
    if (r > 0.0) {
      hi = v;
    } else {
      lo = v;
    }
    const double slope = gb_cond_density(log1mu, v, vartheta);
    double next = v - r / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == v) return v;
    v = next;
  }
  throw ConvergenceError("inv_cond_cdf_given_u did not converge for u=" + std::to_string(u) +
                         " p=" + std::to_string(p) + " vartheta=" + std::to_string(vartheta));
}

double joint_density(const ModelParams& params, const StudyDesign& design, double x, double t) {
  validate(params);
  validate(design);
  if (!(x > 0.0) || !(t > 0.0 && t < design.big_g)) {
    throw DomainError("joint_density: (x, t) = (" + std::to_string(x) + ", " + std::to_string(t) +
                      ") outside the support x > 0, 0 < t < G");
  }
  if (params.family == CopulaFamily::FGM) {
    return detail::fgm_density(params.theta, params.vartheta, design.big_g, x, t);
  }
  const double log1mt = std::log1p(-t / design.big_g);
  if (!(detail::gb_bracket(params.theta, params.vartheta, x, log1mt) < 0.0)) {
    throw InvariantError("Gumbel-Barnett density bracket is non-negative on the support");
  }
  return detail::gb_density(params.theta, params.vartheta, design.big_g, x, log1mt);
}

double joint_cdf(const ModelParams& params, const StudyDesign& design, double x, double t) {
  validate(params);
  validate(design);
  if (!(x > 0.0) || !(t > 0.0)) return 0.0;
  const double ex = std::exp(-params.theta * x);
  if (t >= design.big_g) return 1.0 - ex;
  const double v = t / design.big_g;
  if (params.family == CopulaFamily::FGM) {
    return copula_cdf(CopulaFamily::FGM, 1.0 - ex, v, params.vartheta);
  }
  return v - ex + ex * std::exp((params.vartheta * params.theta * x + 1.0) * std::log1p(-v));
}

double kendall_tau(CopulaFamily family, double vartheta) {
  require_vartheta(family, vartheta);
  if (family == CopulaFamily::FGM) return 2.0 * vartheta / 9.0;
  if (vartheta == 0.0) return 0.0;  // product copula

  // The integrand has logarithmic endpoint singularities at u, v -> 1; the
  // substitution u = 1 - (1 - w)^3 smooths them before the tensor rule.
  static const quad::GaussRule rule = quad::gauss_legendre(128);
  const std::size_t n = rule.nodes.size();
  std::vector<double> u(n);
  std::vector<double> logs(n);
  std::vector<double> wt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 * (rule.nodes[i] + 1.0);
    const double r = 1.0 - w;
    u[i] = 1.0 - r * r * r;
    logs[i] = 3.0 * std::log(r);
    wt[i] = 0.5 * rule.weights[i] * 3.0 * r * r;
  }
  // C_u(u, v) = gb_cond(log(1-u), v); C_v(u, v) = gb_cond(log(1-v), u).
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += wt[j] * gb_cond(logs[i], u[j], vartheta) * gb_cond(logs[j], u[i], vartheta);
    }
    acc += wt[i] * row;
  }
  return 1.0 - 4.0 * acc;
}

}  // namespace truncdep
