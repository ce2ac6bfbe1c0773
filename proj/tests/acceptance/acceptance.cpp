// Acceptance run: one [PASS]/[FAIL] line per criterion, with the numbers
// behind it. Tolerances and seeds are fixed here; nothing is tuned per run.
//
// Exit status is 0 when every failing criterion is listed in --expect-red
// (documented known-red items); an expected-red criterion still prints FAIL.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/LU>

#include "truncdep/copula.hpp"
#include "truncdep/estimation.hpp"
#include "truncdep/inference.hpp"
#include "truncdep/likelihood.hpp"
#include "truncdep/montecarlo.hpp"
#include "truncdep/sampling.hpp"
#include "truncdep/selection.hpp"

#include "oracles.hpp"

using namespace truncdep;

namespace {

constexpr auto kGB = CopulaFamily::GumbelBarnett;
constexpr auto kFGM = CopulaFamily::FGM;

// ---- pinned tolerances ---------------------------------------------------

constexpr double kAlphaTol = 5e-5;
constexpr double kAlphaOracleTol = 1e-8;  // quadrature vs copula-form oracle
constexpr double kAlphaSeconds = 5.0;
constexpr double kNormTol = 1e-6;
constexpr double kTauSmallTol = 1e-4;
constexpr double kTauLimit = -0.361;
constexpr double kTauLimitTol = 2e-3;
constexpr double kScoreFdRel = 1e-5;
constexpr double kLemmaSe = 3.0;
constexpr double kImeRel = 0.05;
constexpr double kTableSe = 3.0;
constexpr double kBoundaryMass = 0.5;
constexpr double kBoundaryTol = 0.07;
constexpr double kLevel = 0.05;
constexpr double kPowerLo = 0.15;
constexpr double kPowerHi = 0.35;
constexpr double kDaysLo = 18.0;
constexpr double kDaysHi = 19.0;
constexpr double kRecoverSe = 3.0;
constexpr std::size_t kApplicationM = 55279;

// ---- reporting -----------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::vector<std::string> lines;

  void note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    lines.emplace_back(buf);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1. selection table --------------------------------------------------

struct TableEntry {
  double big_g, s, theta, vartheta, published;
};

const std::vector<TableEntry>& selection_table() {
  static const std::vector<TableEntry> t = {
      {24, 3, 0.05, 0.001, 0.0648},  {24, 3, 0.05, 0.01, 0.0808},  {24, 3, 0.1, 0.001, 0.0982},
      {24, 3, 0.1, 0.01, 0.0978},    {24, 48, 0.05, 0.001, 0.5294}, {24, 48, 0.05, 0.01, 0.5286},
      {24, 48, 0.1, 0.001, 0.37575}, {24, 48, 0.1, 0.01, 0.37574}, {48, 3, 0.05, 0.001, 0.0528},
      {48, 3, 0.05, 0.01, 0.0525},   {48, 3, 0.1, 0.001, 0.0535},   {48, 3, 0.1, 0.01, 0.0534},
      {24, 2, 0.05, 0.001, 0.0554},  {24, 2, 0.05, 0.01, 0.0552},   {24, 2, 0.1, 0.001, 0.0686},
      {24, 2, 0.1, 0.01, 0.0684}};
  return t;
}

Outcome criterion_selection_table() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> ours;
  for (const auto& e : selection_table()) {
    ours.push_back(alpha({kGB, e.theta, e.vartheta}, {e.big_g, e.s}));
  }
  const double elapsed = seconds_since(t0);
  int matched = 0;
  bool discrepancies_validated = true;
  for (std::size_t i = 0; i < ours.size(); ++i) {
    const auto& e = selection_table()[i];
    const double diff = std::abs(ours[i] - e.published);
    if (diff <= kAlphaTol) {
      ++matched;
      continue;
    }
    const double check = oracle::alpha_copula_form(true, e.theta, e.vartheta, e.big_g, e.s);
    const bool validated = std::abs(check - ours[i]) <= kAlphaOracleTol;
    discrepancies_validated = discrepancies_validated && validated;
    o.note("table discrepancy at G=%g s=%g theta=%g vartheta=%g: published %.5g, computed "
           "%.7f, independent copula-form integral %.7f (%s)",
           e.big_g, e.s, e.theta, e.vartheta, e.published, ours[i], check,
           validated ? "agrees" : "DISAGREES");
  }
  o.note("%d of %zu entries within %.0e; %.3f s for all 16 (limit %.0f s)", matched, ours.size(),
         kAlphaTol, elapsed, kAlphaSeconds);
  o.pass = discrepancies_validated && elapsed < kAlphaSeconds;
  return o;
}

// ---- 2. density normalization -------------------------------------------

Outcome criterion_normalization() {
  Outcome o;
  o.pass = true;
  const StudyDesign d{24, 3};
  for (double theta : {0.05, 0.1}) {
    for (double vt : {0.0, 0.5, 0.9}) {
      const ModelParams p{kGB, theta, vt};
      const double mass = oracle::integrate(
          [&](double t) {
            return oracle::integrate([&](double x) { return joint_density(p, d, x, t); }, 0.0,
                                     std::numeric_limits<double>::infinity(), 1e-12);
          },
          0.0, d.big_g, 1e-11);
      const bool ok = std::abs(mass - 1.0) <= kNormTol;
      o.pass = o.pass && ok;
      o.note("GB theta=%g vartheta=%g: integral %.12f", theta, vt, mass);
    }
  }
  return o;
}

// ---- 3. Kendall's tau ----------------------------------------------------

Outcome criterion_tau() {
  Outcome o;
  const double t1 = kendall_tau(kGB, 0.001);
  const double t2 = kendall_tau(kGB, 0.01);
  const double t3 = kendall_tau(kGB, ParamBounds{}.vartheta_hi(kGB));
  bool fgm_exact = true;
  for (double v : {-1.0 + 1e-6, -0.5, 0.0, 0.1, 0.45, 0.9, 1.0 - 1e-6}) {
    fgm_exact = fgm_exact && kendall_tau(kFGM, v) == 2.0 * v / 9.0;
  }
  o.note("GB tau(0.001) = %.8f (target -0.0005), tau(0.01) = %.8f (target -0.005)", t1, t2);
  o.note("GB tau(1 - 1e-6) = %.6f (target %.3f +- %.3f); FGM tau = 2 vartheta/9 exactly: %s", t3,
         kTauLimit, kTauLimitTol, fgm_exact ? "yes" : "no");
  o.pass = std::abs(t1 + 0.0005) <= kTauSmallTol && std::abs(t2 + 0.005) <= kTauSmallTol &&
           std::abs(t3 - kTauLimit) <= kTauLimitTol && fgm_exact;
  return o;
}

// ---- 4. score correctness ------------------------------------------------

Outcome criterion_score() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(4001);
  std::uniform_real_distribution<double> uth(0.03, 0.15), uvt(0.05, 0.9), ufgm(-0.8, 0.8);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CopulaFamily fam = k % 2 ? kFGM : kGB;
    const ModelParams p{fam, uth(gen), fam == kGB ? uvt(gen) : ufgm(gen)};
    Rng rng(derive_seed(4001, k));
    const TruncatedSample s = simulate_truncated(p, {24, 3}, 20000, rng);
    const Eigen::Vector2d g = score_sum(p, s);
    auto obj = [&](double th, double vt) { return profile_objective({fam, th, vt}, s); };
    // Richardson-extrapolated central differences; steps large enough that
    // rounding in an objective of size ~n stays far below the tolerance.
    auto deriv = [&](auto&& f, double h) {
      const double d1 = (f(h) - f(-h)) / (2 * h);
      const double d2 = (f(h / 2) - f(-h / 2)) / h;
      return (4 * d2 - d1) / 3;
    };
    const Eigen::Vector2d fd(
        deriv([&](double e) { return obj(p.theta + e, p.vartheta); }, 1e-3 * p.theta),
        deriv([&](double e) { return obj(p.theta, p.vartheta + e); }, 1e-3));
    for (int i = 0; i < 2; ++i) {
      // Relative to the gradient scale so near-zero components are not
      // judged on cancellation noise.
      const double scale = std::max(std::abs(fd(i)), 1e-3 * static_cast<double>(s.size()));
      worst = std::max(worst, std::abs(g(i) - fd(i)) / scale);
    }
  }
  o.note("score vs central difference of the profile objective, 10 samples: worst relative "
         "error %.2e (limit %.0e)",
         worst, kScoreFdRel);
  bool lemma = true;
  for (const ModelParams& p0 : {ModelParams{kGB, 0.08, 0.4}, ModelParams{kFGM, 0.08, 0.3}}) {
    const StudyDesign d{24, 3};
    const AlphaBundle b = alpha_bundle(p0, d);
    Rng rng(4002);
    const std::size_t n = 1000000;
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    Eigen::Vector2d sum2 = Eigen::Vector2d::Zero();
    for (std::size_t j = 0; j < n; ++j) {
      const LatentPair lp = draw_latent(p0, d, rng);
      const ProfileScore sc = profile_score(p0, lp, d, b);
      const Eigen::Vector2d v(sc.s_theta, sc.s_vartheta);
      sum += v;
      sum2 += v.cwiseProduct(v);
    }
    const Eigen::Vector2d mean = sum / n;
    const Eigen::Vector2d se =
        ((sum2 / n - mean.cwiseProduct(mean)) / static_cast<double>(n - 1)).cwiseSqrt();
    const double z0 = mean(0) / se(0);
    const double z1 = mean(1) / se(1);
    lemma = lemma && std::abs(z0) <= kLemmaSe && std::abs(z1) <= kLemmaSe;
    o.note("%s mean psi over 1e6 latent draws: (%.3e, %.3e), z = (%.2f, %.2f)",
           std::string(to_string(p0.family)).c_str(), mean(0), mean(1), z0, z1);
  }
  o.note("%.1f s (limit 60 s)", seconds_since(t0));
  o.pass = worst <= kScoreFdRel && lemma;
  return o;
}

// ---- 5. information-matrix equality --------------------------------------

Outcome criterion_ime() {
  Outcome o;
  const StudyDesign d{24, 3};
  const ModelParams p0{kGB, 0.1, 0.3};
  Rng rng(5001);
  const TruncatedSample s = simulate_truncated(p0, d, 100000, rng);
  const FitResult f = fit(s, kGB);
  const ProfileProblem problem(s, kGB);
  const Eigen::Matrix2d neg_jac =
      -problem.score_jacobian(f.params_hat.theta, f.params_hat.vartheta) / f.n_hat;
  const Eigen::Matrix2d info = fisher_info_hat(f.params_hat, s);
  o.pass = f.converged;
  const char* names[2][2] = {{"theta,theta", "theta,vartheta"},
                             {"vartheta,theta", "vartheta,vartheta"}};
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      const double rel = std::abs(neg_jac(i, j) - info(i, j)) / std::abs(info(i, j));
      o.pass = o.pass && rel <= kImeRel;
      o.note("entry %s: -J/n %.6g, outer/n %.6g, relative gap %.4f (limit %.2f)", names[i][j],
             neg_jac(i, j), info(i, j), rel, kImeRel);
    }
  }
  // Expectation-level check, reported for context.
  const DetScan q = hessian_det_scan_quadrature({p0.theta}, {p0.vartheta}, d);
  o.note("context: expectation-level identity holds to ~1e-7 by quadrature (unit tests); "
         "sample off-diagonal correlation is ~0.2, so its n=1e5 average carries ~20%% noise; "
         "det E[psi-dot] at theta0 = %.6g",
         q.at(0, 0));
  return o;
}

// ---- 6. table reproduction -----------------------------------------------

struct PublishedRow {
  double s;
  std::uint64_t seed;
  double bias_theta, var_theta;
  double bias_vartheta, var_vartheta;
  // Half a unit in the last printed digit of the published numbers.
  double round_bias, round_var;
};

Outcome criterion_table(unsigned threads) {
  Outcome o;
  o.pass = true;
  const std::vector<PublishedRow> rows = {{3, 6001, 0.001456, 0.000026, 0.047852, 0.003987, 5e-7, 5e-7},
                                      {48, 6002, -0.000011, 0.000001, 0.005959, 0.000102, 5e-7, 5e-7}};
  for (const auto& row : rows) {
    ScenarioSpec spec;
    spec.design = {24, row.s};
    spec.n = 10000;
    spec.params0 = {kGB, 0.05, 0.001};
    spec.replications = 200;
    spec.seed = row.seed;
    const auto t0 = std::chrono::steady_clock::now();
    const McSummary m = run_scenario(spec, {.threads = threads});
    const double db = std::abs(m.bias_theta - row.bias_theta);
    const double dv = std::abs(m.var_theta - row.var_theta);
    const double tol_b = kTableSe * m.mc_se.bias_theta + row.round_bias;
    const double tol_v = kTableSe * m.mc_se.var_theta + row.round_var;
    const bool ok = db <= tol_b && dv <= tol_v && m.successes > 0;
    o.pass = o.pass && ok;
    o.note("G=24 s=%g theta0=0.05 vartheta0=0.001 n=1e4 R=200 seed=%llu (%.0f s, %zu failures)",
           row.s, static_cast<unsigned long long>(row.seed), seconds_since(t0), m.failures);
    o.note("  bias_theta %.6g vs %.6g: |diff| %.3g <= %.3g (3 MC SE + rounding) %s", m.bias_theta,
           row.bias_theta, db, tol_b, db <= tol_b ? "ok" : "NO");
    o.note("  var_theta  %.6g vs %.6g: |diff| %.3g <= %.3g (3 MC SE + rounding) %s", m.var_theta,
           row.var_theta, dv, tol_v, dv <= tol_v ? "ok" : "NO");
    o.note("  context: bias_vartheta %.6g (published %.6g), var_vartheta %.6g, central %.6g "
           "(published %.6g)",
           m.bias_vartheta, row.bias_vartheta, m.var_vartheta, m.var_central_vartheta,
           row.var_vartheta);
  }
  return o;
}

// ---- 7. boundary mass ----------------------------------------------------

Outcome criterion_boundary(unsigned threads) {
  Outcome o;
  ScenarioSpec spec;
  spec.design = {24, 3};
  spec.n = 10000;
  spec.params0 = {kGB, 0.08, 0.0};
  spec.replications = 500;
  spec.seed = 7001;
  const auto t0 = std::chrono::steady_clock::now();
  const McRun run = run_scenario_detailed(spec, {.threads = threads});
  const double frac = run.summary.boundary_fraction;
  o.pass = std::abs(frac - kBoundaryMass) <= kBoundaryTol;
  o.note("fraction with vartheta-hat = 0: %.3f over %zu fits (target %.2f +- %.2f), %.0f s", frac,
         run.summary.successes, kBoundaryMass, kBoundaryTol, seconds_since(t0));
  std::vector<double> z;
  for (const auto& r : run.replicates) {
    if (r.ok && !r.boundary) z.push_back(r.statistic);
  }
  const double ks = oracle::ks_statistic(z, [](double v) { return std::erf(v / std::sqrt(2.0)); });
  o.note("context: positive part vs half-normal, KS D = %.4f (1%% critical %.4f) over %zu fits", ks,
         oracle::ks_critical_1pct(z.size()), z.size());
  return o;
}

// ---- 8. calibration and power --------------------------------------------

Outcome criterion_power(unsigned threads) {
  Outcome o;
  ScenarioSpec base;
  base.design = {24, 3};
  base.params0 = {kGB, 0.08, 0.0};
  // Conditions of the business-closure application: 55,279 observed
  // lifetimes, so the latent size is profiled from that count under H0.
  base.n = profile_n(kApplicationM, alpha(base.params0, base.design));
  base.replications = 500;
  base.seed = 8001;
  base.level = kLevel;
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = power_curve(base, {0.0, 0.01}, {.threads = threads});
  const double size = curve[0].rejection_rate;
  const double size_limit = kLevel + 3.0 * std::sqrt(kLevel * (1 - kLevel) / base.replications);
  const double power = curve[1].rejection_rate;
  o.pass = size <= size_limit && power >= kPowerLo && power <= kPowerHi;
  o.note("n = %zu latent, R = %zu per point, theta0 = 0.08, G = 24, s = 3, %.0f s", base.n,
         base.replications, seconds_since(t0));
  o.note("vartheta0 = 0: rejection %.3f (SE %.3f), limit %.3f", size, curve[0].mc_se, size_limit);
  o.note("vartheta0 = 0.01: rejection %.3f (SE %.3f), band [%.2f, %.2f]", power, curve[1].mc_se,
         kPowerLo, kPowerHi);
  return o;
}

// ---- 9. trend formula and FGM recovery -----------------------------------

Outcome criterion_trend() {
  Outcome o;
  const StudyDesign d{24, 3};
  const TrendReport r = trend_report_fgm(0.0817, 0.10, d);
  const bool days_ok = r.annual_change_days >= kDaysLo && r.annual_change_days <= kDaysHi;
  o.note("trend at theta=0.0817, vartheta=0.10, G=24: %.4f years = %.2f days per year", r.annual_change,
         r.annual_change_days);
  Rng rng(9001);
  const ModelParams p0{kFGM, 0.0817, 0.10};
  const TruncatedSample s = simulate_truncated(p0, d, 1000000, rng);
  const FitResult f = fit(s, kFGM);
  const double zt = (f.params_hat.theta - p0.theta) / f.se(0);
  const double zv = (f.params_hat.vartheta - p0.vartheta) / f.se(1);
  o.note("FGM fit at n = 1e6 (M = %zu): theta %.5f (SE %.5f, z %.2f), vartheta %.4f (SE %.4f, z "
         "%.2f)",
         f.m, f.params_hat.theta, f.se(0), zt, f.params_hat.vartheta, f.se(1), zv);
  o.note("published empirical estimates are not reproducible without the original data");
  o.pass = days_ok && f.converged && std::abs(zt) <= kRecoverSe && std::abs(zv) <= kRecoverSe;
  return o;
}

// ---- 10. property suites --------------------------------------------------

bool copula_axioms(Outcome& o) {
  int violations = 0;
  const int g = 20;
  for (CopulaFamily fam : {kGB, kFGM}) {
    const std::vector<double> vts =
        fam == kGB ? std::vector<double>{0.0, 0.3, 0.7, 0.999} : std::vector<double>{-0.9, 0.0, 0.5, 0.9};
    for (double vt : vts) {
      for (int i = 0; i <= g; ++i) {
        const double u = static_cast<double>(i) / g;
        if (copula_cdf(fam, u, 0.0, vt) != 0.0 || copula_cdf(fam, 0.0, u, vt) != 0.0) ++violations;
        if (std::abs(copula_cdf(fam, u, 1.0, vt) - u) > 1e-15) ++violations;
        if (std::abs(copula_cdf(fam, 1.0, u, vt) - u) > 1e-15) ++violations;
        for (int j = 0; j < g && i < g; ++j) {
          const double u2 = (i + 1.0) / g;
          const double v1 = static_cast<double>(j) / g;
          const double v2 = (j + 1.0) / g;
          const double vol = copula_cdf(fam, u2, v2, vt) - copula_cdf(fam, u, v2, vt) -
                             copula_cdf(fam, u2, v1, vt) + copula_cdf(fam, u, v1, vt);
          if (vol < -1e-14) ++violations;
        }
      }
    }
  }
  o.note("copula axioms (grounded, uniform margins, 2-increasing on a 20x20 grid): %d violations",
         violations);
  return violations == 0;
}

bool inverse_roundtrips(Outcome& o) {
  double worst = 0.0;
  for (CopulaFamily fam : {kGB, kFGM}) {
    for (double vt : {0.0, 0.5, 0.9}) {
      for (int i = 1; i <= 20; ++i) {
        for (int j = 1; j <= 20; ++j) {
          const double u = i / 21.0;
          const double p = j / 21.0;
          const double v = inv_cond_cdf_given_u(fam, u, p, vt);
          worst = std::max(worst, std::abs(cond_cdf_given_u(fam, u, v, vt) - p));
        }
      }
    }
  }
  o.note("inverse round trips on a 20x20 grid: worst |c_u(inverse) - p| = %.2e (limit 1e-10)",
         worst);
  return worst <= 1e-10;
}

bool sampler_properties(Outcome& o) {
  bool ok = true;
  const StudyDesign d{24, 3};
  for (const ModelParams& p : {ModelParams{kGB, 0.08, 0.9}, ModelParams{kFGM, 0.08, 0.9}}) {
    Rng rng(10001);
    const std::size_t n = 100000;
    std::vector<double> xs(n), ts(n);
    std::vector<std::pair<double, double>> xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      const LatentPair lp = draw_latent(p, d, rng);
      xs[i] = lp.x;
      ts[i] = lp.t;
      xy[i] = {lp.x, lp.t};
    }
    const double ks_x =
        oracle::ks_statistic(xs, [&](double x) { return -std::expm1(-p.theta * x); });
    const double ks_t = oracle::ks_statistic(ts, [&](double t) { return t / d.big_g; });
    const auto tau = oracle::kendall_tau_with_se(xy);
    // T counts back from the study start, so the copula pairs F_E(X) with
    // F_T(T) directly.
    const double target = kendall_tau(p.family, p.vartheta);
    const bool good = ks_x <= oracle::ks_critical_1pct(n) && ks_t <= oracle::ks_critical_1pct(n) &&
                      std::abs(tau.tau - target) <= 3.0 * tau.se;
    ok = ok && good;
    o.note("sampler %s vartheta=0.9: KS(X) %.4f, KS(T) %.4f (1%% critical %.4f), tau %.4f vs %.4f "
           "(3 SE %.4f)",
           std::string(to_string(p.family)).c_str(), ks_x, ks_t, oracle::ks_critical_1pct(n),
           tau.tau, target, 3.0 * tau.se);
  }
  return ok;
}

bool profile_n_optimality(Outcome& o) {
  // Literal property: l(n*) >= l(n* - 1) and l(n*) >= l(n* + 1) for the
  // Poisson profile l(n) = M log n - n alpha.
  std::mt19937_64 gen(10002);
  std::uniform_int_distribution<std::size_t> um(1, 100000);
  std::uniform_real_distribution<double> ua(0.01, 0.99);
  int literal_fail = 0;
  int bracket_fail = 0;
  const int trials = 1000;
  for (int k = 0; k < trials; ++k) {
    const std::size_t m = um(gen);
    const double a = ua(gen);
    const double n = static_cast<double>(profile_n(m, a));
    auto ell = [&](double v) { return static_cast<double>(m) * std::log(v) - v * a; };
    if (ell(n) < ell(n - 1) || ell(n) < ell(n + 1)) ++literal_fail;
    // What the implemented ceil(m / alpha) - 1 does guarantee.
    const bool bracket = n < m / a && m / a <= n + 1 && ell(n) >= ell(n - 1) &&
                         std::max(ell(n), ell(n + 1)) >= ell(n + 2);
    if (!bracket) ++bracket_fail;
  }
  o.note("profile_n literal optimality l(n*) >= l(n* +- 1): %d of %d random (m, alpha) violate it",
         literal_fail, trials);
  o.note("  the integer maximizer is the largest n with m log(n/(n-1)) >= alpha, about m/alpha + "
         "1/2; ceil(m/alpha) - 1 is one below it about half the time");
  o.note("  bracket relations (n* < m/alpha <= n*+1, maximizer in {n*, n*+1}): %d violations",
         bracket_fail);
  return literal_fail == 0 && bracket_fail == 0;
}

bool thread_determinism(Outcome& o) {
  ScenarioSpec spec;
  spec.design = {24, 3};
  spec.n = 5000;
  spec.params0 = {kGB, 0.08, 0.2};
  spec.replications = 12;
  spec.seed = 10003;
  const McRun a = run_scenario_detailed(spec, {.threads = 1});
  const McRun b = run_scenario_detailed(spec, {.threads = 4});
  bool same = a.summary.var_theta == b.summary.var_theta &&
              a.summary.bias_vartheta == b.summary.bias_vartheta &&
              a.summary.rejection_rate == b.summary.rejection_rate;
  for (std::size_t k = 0; k < a.replicates.size(); ++k) {
    same = same && a.replicates[k].theta_hat == b.replicates[k].theta_hat &&
           a.replicates[k].vartheta_hat == b.replicates[k].vartheta_hat;
  }
  o.note("thread-count determinism (1 vs 4 workers, 12 replications): %s",
         same ? "identical" : "DIFFERENT");
  return same;
}

bool bias_shrinkage(Outcome& o, unsigned threads) {
  int shrinking = 0;
  const double pairs[4][2] = {{0.05, 0.001}, {0.05, 0.01}, {0.1, 0.001}, {0.1, 0.01}};
  for (int k = 0; k < 4; ++k) {
    double bt[3], bv[3];
    const std::size_t ns[3] = {1000, 10000, 100000};
    for (int j = 0; j < 3; ++j) {
      ScenarioSpec spec;
      spec.design = {24, 3};
      spec.n = ns[j];
      spec.params0 = {kGB, pairs[k][0], pairs[k][1]};
      spec.replications = 50;
      spec.seed = derive_seed(10004, 3 * k + j);
      const McSummary s = run_scenario(spec, {.threads = threads});
      bt[j] = std::abs(s.bias_theta);
      bv[j] = std::abs(s.bias_vartheta);
    }
    const bool shrinks = bv[0] > bv[1] && bv[1] > bv[2] && bt[2] < bt[0];
    shrinking += shrinks ? 1 : 0;
    o.note("  theta0=%g vartheta0=%g: |bias_theta| %.2e %.2e %.2e, |bias_vartheta| %.4f %.4f %.4f",
           pairs[k][0], pairs[k][1], bt[0], bt[1], bt[2], bv[0], bv[1], bv[2]);
  }
  o.note("bias shrinkage over n = 1e3, 1e4, 1e5 (R = 50): %d of 4 pairs (need 3)", shrinking);
  return shrinking >= 3;
}

Outcome criterion_properties(unsigned threads) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const bool a = copula_axioms(o);
  const bool b = inverse_roundtrips(o);
  const bool c = sampler_properties(o);
  const bool d = profile_n_optimality(o);
  const bool e = thread_determinism(o);
  const bool f = bias_shrinkage(o, threads);
  o.note("%.0f s (limit 300 s)", seconds_since(t0));
  o.pass = a && b && c && d && e && f;
  return o;
}

std::set<std::string> split_ids(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria A1..A10"};
  std::string expect_red;
  std::string only;
  unsigned threads = 0;
  app.add_option("--expect-red", expect_red, "Comma-separated criteria known to be red (e.g. A5)");
  app.add_option("--only", only, "Comma-separated subset to run");
  app.add_option("--threads", threads, "Worker threads for Monte Carlo criteria (0: all cores)");
  CLI11_PARSE(app, argc, argv);

  const std::set<std::string> red = split_ids(expect_red);
  const std::set<std::string> subset = split_ids(only);
  const std::vector<std::pair<std::string, std::pair<std::string, std::function<Outcome()>>>>
      criteria = {
          {"A1", {"selection-probability table", criterion_selection_table}},
          {"A2", {"density normalization", criterion_normalization}},
          {"A3", {"Kendall's tau", criterion_tau}},
          {"A4", {"score correctness", criterion_score}},
          {"A5", {"information-matrix equality at n = 1e5", criterion_ime}},
          {"A6", {"table reproduction at R = 200", [&] { return criterion_table(threads); }}},
          {"A7", {"boundary mass under H0", [&] { return criterion_boundary(threads); }}},
          {"A8", {"test calibration and power at the application size", [&] { return criterion_power(threads); }}},
          {"A9", {"trend formula and FGM recovery", criterion_trend}},
          {"A10", {"property suites", [&] { return criterion_properties(threads); }}},
      };

  int unexpected = 0;
  for (const auto& [id, entry] : criteria) {
    if (!subset.empty() && !subset.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entry.second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.note("exception: %s", e.what());
    }
    const bool known = red.count(id) > 0;
    std::printf("[%s] %s %s (%.1f s)%s\n", out.pass ? "PASS" : "FAIL", id.c_str(),
                entry.first.c_str(), seconds_since(t0),
                out.pass ? (known ? " [listed as expected red but passed]" : "")
                         : (known ? " [expected red, documented]" : ""));
    for (const auto& line : out.lines) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    if (!out.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
