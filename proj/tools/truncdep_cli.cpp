// Command-line front end: fit, test, simulate, Monte Carlo studies and
// scalar utilities. Exit codes: 0 success, 2 input/validation error,
// 3 non-convergence, 4 internal invariant violation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "truncdep/copula.hpp"
#include "truncdep/errors.hpp"
#include "truncdep/estimation.hpp"
#include "truncdep/inference.hpp"
#include "truncdep/io.hpp"
#include "truncdep/montecarlo.hpp"
#include "truncdep/sampling.hpp"
#include "truncdep/selection.hpp"

namespace {

using namespace truncdep;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitInternal = 4;

// Usage problems detected after parsing (e.g. cross-flag constraints).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes to a file, or to stdout for an empty path or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw DomainError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct DesignFlags {
  double big_g = 24.0;
  double s = 3.0;
  StudyDesign design() const {
    StudyDesign d{big_g, s};
    validate(d);
    return d;
  }
};

void add_design_flags(CLI::App* cmd, DesignFlags& flags, bool required) {
  auto* g = cmd->add_option("--G", flags.big_g, "Birth-period length G (years)");
  auto* s = cmd->add_option("--s", flags.s, "Observation-period length s (years)");
  if (required) {
    g->required();
    s->required();
  } else {
    g->capture_default_str();
    s->capture_default_str();
  }
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("TRUNCDEP_THREADS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw DomainError(std::string("TRUNCDEP_THREADS must be a positive integer, got '") + env +
                      "'");
  }
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw DomainError("cannot parse list value '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw DomainError("cannot parse list value '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_fit(std::ostream& out, const FitResult& f, const std::string& format) {
  if (format == "json") {
    out << io::to_json(f).dump(2) << '\n';
    return;
  }
  out << "family,theta_hat,vartheta_hat,m,n_hat,at_boundary,log_lik,se_theta,se_vartheta,"
         "converged\n";
  out << to_string(f.params_hat.family) << ',' << io::format_double(f.params_hat.theta) << ','
      << io::format_double(f.params_hat.vartheta) << ',' << f.m << ',' << f.n_hat << ','
      << (f.at_boundary ? "true" : "false") << ',' << io::format_double(f.log_lik) << ','
      << io::format_double(f.se(0)) << ',' << io::format_double(f.se(1)) << ','
      << (f.converged ? "true" : "false") << '\n';
}

// ---- fit ---------------------------------------------------------------

struct FitCmd {
  std::string input;
  std::string family = "gb";
  DesignFlags design;
  std::string out;
  std::string format = "json";
  bool single_start = false;
};

int run_fit(const FitCmd& c) {
  const CopulaFamily family = parse_family(c.family);
  const TruncatedSample sample = io::read_sample_csv_file(c.input, c.design.design());
  FitOptions options;
  options.multistart = !c.single_start;
  const FitResult f = fit(sample, family, options);
  Output out(c.out);
  write_fit(out.stream(), f, c.format);
  out.finish();
  if (!f.converged) {
    std::cerr << "error: optimizer did not converge\n";
    return kExitConvergence;
  }
  return kExitOk;
}

// ---- test --------------------------------------------------------------

struct TestCmd {
  std::string input;
  std::string family = "gb";
  DesignFlags design;
  double level = 0.05;
  std::string out;
  double days_per_year = 365.25;
};

int run_test(const TestCmd& c) {
  const CopulaFamily family = parse_family(c.family);
  if (!(c.level > 0.0 && c.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
  if (family == CopulaFamily::GumbelBarnett && c.level >= 0.5) {
    throw UsageError("--level must be below 0.5 for the boundary test: the null puts mass 0.5 "
                     "on vartheta-hat = 0");
  }
  const StudyDesign design = c.design.design();
  const TruncatedSample sample = io::read_sample_csv_file(c.input, design);
  const FitResult f = fit(sample, family);
  if (!f.converged) {
    std::cerr << "error: optimizer did not converge\n";
    return kExitConvergence;
  }
  ordered_json doc;
  doc["fit"] = io::to_json(f);
  if (family == CopulaFamily::GumbelBarnett) {
    const FitResult restricted = fit_restricted(sample, family);
    if (!restricted.converged) {
      std::cerr << "error: restricted optimizer did not converge\n";
      return kExitConvergence;
    }
    doc["restricted_theta_hat"] = restricted.params_hat.theta;
    doc["test"] = io::to_json(wald_boundary_test(f, sample, c.level));
    doc["test"]["kind"] = "one-sided boundary Wald test of vartheta = 0";
    doc["se_note"] =
        "se_theta is the unconditional inverse-information value; when vartheta_hat = 0 the "
        "conditional law of theta_hat differs";
  } else {
    doc["test"] = io::to_json(wald_interior_test_fgm(f, sample, c.level));
    doc["test"]["kind"] = "two-sided Wald test of vartheta = 0";
    doc["trend"] = io::to_json(trend_report_fgm(f, design, c.days_per_year));
  }
  Output out(c.out);
  out.stream() << doc.dump(2) << '\n';
  out.finish();
  return kExitOk;
}

// ---- simulate ----------------------------------------------------------

struct SimulateCmd {
  std::string family = "gb";
  double theta = 0.0;
  double vartheta = 0.0;
  DesignFlags design;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateCmd& c) {
  const ModelParams params{parse_family(c.family), c.theta, c.vartheta};
  validate(params);
  const StudyDesign design = c.design.design();
  if (c.n == 0) throw DomainError("--n must be positive");
  Rng rng(c.seed);
  const TruncatedSample sample = simulate_truncated(params, design, c.n, rng);
  Output out(c.out);
  io::write_sample_csv(out.stream(), sample);
  out.finish();
  std::cerr << "M=" << sample.size() << " M/n="
            << fmt10(static_cast<double>(sample.size()) / static_cast<double>(c.n)) << '\n';
  return kExitOk;
}

// ---- mc ----------------------------------------------------------------

struct McCmd {
  std::string scenarios;
  std::string family = "gb";
  double theta = 0.08;
  double vartheta = 0.0;
  DesignFlags design;
  std::size_t n = 100000;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  double level = 0.05;
  std::optional<unsigned> threads;
  std::string out;
  std::string format = "csv";
  std::string power_grid;
  std::string curve_out = "power_curve.csv";
  bool quiet = false;
};

ScenarioSpec flag_scenario(const McCmd& c) {
  ScenarioSpec spec;
  spec.design = {c.design.big_g, c.design.s};
  spec.n = c.n;
  spec.params0 = {parse_family(c.family), c.theta, c.vartheta};
  spec.replications = c.replications;
  spec.seed = c.seed;
  spec.level = c.level;
  validate(spec);
  return spec;
}

int run_mc(const McCmd& c) {
  McOptions options;
  options.threads = resolve_threads(c.threads);
  if (!c.quiet) options.warn = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };

  std::vector<ScenarioSpec> specs;
  std::optional<std::vector<double>> grid;
  if (!c.power_grid.empty()) grid = parse_list(c.power_grid);
  if (!c.scenarios.empty()) {
    std::ifstream in(c.scenarios);
    if (!in) throw DomainError("cannot open '" + c.scenarios + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw DomainError(c.scenarios + ": " + e.what());
    }
    specs = io::parse_scenarios(doc);
  } else if (!grid) {
    specs.push_back(flag_scenario(c));
  }

  bool any_failed = false;
  ordered_json rows = ordered_json::array();
  Output out(c.out);
  if (c.format == "csv" && !specs.empty()) io::write_summary_header(out.stream());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    try {
      const McSummary s = run_scenario(specs[i], options);
      if (c.format == "csv") {
        io::write_summary_row(out.stream(), specs[i], s);
      } else {
        rows.push_back({{"scenario", io::to_json(specs[i])}, {"summary", io::to_json(s)}});
      }
      if (!c.quiet) {
        std::cerr << "scenario " << i + 1 << "/" << specs.size() << " done (" << s.failures
                  << " failures)\n";
      }
    } catch (const ConvergenceError& e) {
      any_failed = true;
      std::cerr << "error: scenario " << i << ": " << e.what() << '\n';
    }
  }
  if (c.format == "json" && !specs.empty()) out.stream() << rows.dump(2) << '\n';
  out.finish();

  if (grid) {
    const ScenarioSpec base = flag_scenario(c);
    for (double v : *grid) validate(ModelParams{base.params0.family, base.params0.theta, v});
    try {
      const auto curve = power_curve(base, *grid, options);
      Output curve_out(c.curve_out);
      io::write_power_curve_csv(curve_out.stream(), curve);
      curve_out.finish();
      std::cerr << "power curve: n=" << base.n << " replications=" << base.replications
                << " written to " << (c.curve_out.empty() ? "stdout" : c.curve_out) << '\n';
    } catch (const ConvergenceError& e) {
      any_failed = true;
      std::cerr << "error: power curve: " << e.what() << '\n';
    }
  }
  return any_failed ? kExitConvergence : kExitOk;
}

// ---- alpha / tau / detscan ----------------------------------------------

struct AlphaCmd {
  std::string family;
  double theta = 0.0;
  double vartheta = 0.0;
  DesignFlags design;
};

int run_alpha(const AlphaCmd& c) {
  const ModelParams params{parse_family(c.family), c.theta, c.vartheta};
  validate(params);
  std::cout << fmt10(alpha(params, c.design.design())) << '\n';
  return kExitOk;
}

struct TauCmd {
  std::string family;
  double vartheta = 0.0;
};

int run_tau(const TauCmd& c) {
  const CopulaFamily family = parse_family(c.family);
  validate(ModelParams{family, 0.1, c.vartheta});
  std::cout << fmt10(kendall_tau(family, c.vartheta)) << '\n';
  return kExitOk;
}

struct DetscanCmd {
  std::string theta_grid;
  std::string vartheta_grid;
  DesignFlags design;
  std::size_t n_mc = 100000;
  std::uint64_t seed = 1;
  std::optional<unsigned> threads;
  std::string out;
  std::string method = "mc";
  int nodes = 200;
};

int run_detscan(const DetscanCmd& c) {
  const auto thetas = parse_list(c.theta_grid);
  const auto varthetas = parse_list(c.vartheta_grid);
  const DetScan scan =
      c.method == "quadrature"
          ? hessian_det_scan_quadrature(thetas, varthetas, c.design.design(), c.nodes,
                                        resolve_threads(c.threads))
          : hessian_det_scan(thetas, varthetas, c.design.design(), c.n_mc, c.seed,
                             resolve_threads(c.threads));
  Output out(c.out);
  out.stream() << "theta0,vartheta0,det\n";
  for (std::size_t i = 0; i < scan.thetas.size(); ++i) {
    for (std::size_t j = 0; j < scan.varthetas.size(); ++j) {
      out.stream() << io::format_double(scan.thetas[i]) << ','
                   << io::format_double(scan.varthetas[j]) << ','
                   << io::format_double(scan.at(i, j)) << '\n';
    }
  }
  out.finish();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation and independence testing for doubly truncated exponential lifetimes "
               "under copula dependence"};
  app.require_subcommand(1);
  const auto family_check = CLI::IsMember({"gb", "fgm"}, CLI::ignore_case);

  FitCmd fit_c;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model to a CSV sample (header x,t)");
  fit_cmd->add_option("input", fit_c.input, "Input CSV")->required();
  fit_cmd->add_option("--family", fit_c.family, "Copula family")
      ->check(family_check)
      ->capture_default_str();
  add_design_flags(fit_cmd, fit_c.design, true);
  fit_cmd->add_option("--out", fit_c.out, "Output path (default stdout)");
  fit_cmd->add_option("--format", fit_c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  fit_cmd->add_flag("--single-start", fit_c.single_start, "Disable the multistart grid");

  TestCmd test_c;
  auto* test_cmd = app.add_subcommand("test", "Test vartheta = 0 on a CSV sample");
  test_cmd->add_option("input", test_c.input, "Input CSV")->required();
  test_cmd->add_option("--family", test_c.family, "Copula family")
      ->check(family_check)
      ->capture_default_str();
  add_design_flags(test_cmd, test_c.design, true);
  test_cmd->add_option("--level", test_c.level, "Nominal level")->capture_default_str();
  test_cmd->add_option("--days-per-year", test_c.days_per_year, "Day count for the trend report")
      ->capture_default_str();
  test_cmd->add_option("--out", test_c.out, "Output path (default stdout)");
  test_cmd->add_option("--format", "Output format (json only)")
      ->check(CLI::IsMember({"json"}));

  SimulateCmd sim_c;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a truncated sample as CSV");
  sim_cmd->add_option("--family", sim_c.family, "Copula family")
      ->check(family_check)
      ->capture_default_str();
  sim_cmd->add_option("--theta", sim_c.theta, "Exponential rate")->required();
  sim_cmd->add_option("--vartheta", sim_c.vartheta, "Copula parameter")->required();
  add_design_flags(sim_cmd, sim_c.design, true);
  sim_cmd->add_option("--n", sim_c.n, "Latent sample size")->required();
  sim_cmd->add_option("--seed", sim_c.seed, "Seed")->required();
  sim_cmd->add_option("--out", sim_c.out, "Output path (default stdout)");

  McCmd mc_c;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo scenarios and power curves");
  mc_cmd->add_option("--scenarios", mc_c.scenarios, "Scenario JSON file");
  mc_cmd->add_option("--family", mc_c.family, "Copula family (single scenario)")
      ->check(family_check)
      ->capture_default_str();
  mc_cmd->add_option("--theta", mc_c.theta, "theta0")->capture_default_str();
  mc_cmd->add_option("--vartheta", mc_c.vartheta, "vartheta0")->capture_default_str();
  add_design_flags(mc_cmd, mc_c.design, false);
  mc_cmd->add_option("--n", mc_c.n, "Latent sample size")->capture_default_str();
  mc_cmd->add_option("--replications", mc_c.replications, "Replications")->capture_default_str();
  mc_cmd->add_option("--seed", mc_c.seed, "Master seed")->capture_default_str();
  mc_cmd->add_option("--level", mc_c.level, "Nominal level")->capture_default_str();
  mc_cmd->add_option("--threads", mc_c.threads, "Worker threads (default TRUNCDEP_THREADS or "
                                                "all cores)")
      ->check(CLI::PositiveNumber);
  mc_cmd->add_option("--out", mc_c.out, "Summary output path (default stdout)");
  mc_cmd->add_option("--format", mc_c.format, "Summary format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  mc_cmd->add_option("--power-grid", mc_c.power_grid, "Comma-separated vartheta0 values");
  mc_cmd->add_option("--curve-out", mc_c.curve_out, "Power curve CSV path")
      ->capture_default_str();
  mc_cmd->add_flag("--quiet", mc_c.quiet, "Suppress progress and warnings");

  AlphaCmd alpha_c;
  auto* alpha_cmd = app.add_subcommand("alpha", "Print the selection probability");
  alpha_cmd->add_option("family", alpha_c.family)->required()->check(family_check);
  alpha_cmd->add_option("theta", alpha_c.theta)->required();
  alpha_cmd->add_option("vartheta", alpha_c.vartheta)->required();
  add_design_flags(alpha_cmd, alpha_c.design, true);

  TauCmd tau_c;
  auto* tau_cmd = app.add_subcommand("tau", "Print Kendall's tau");
  tau_cmd->add_option("family", tau_c.family)->required()->check(family_check);
  tau_cmd->add_option("vartheta", tau_c.vartheta)->required();

  DetscanCmd det_c;
  auto* det_cmd = app.add_subcommand("detscan", "Determinant of the mean score Jacobian on a grid");
  det_cmd->add_option("--theta-grid", det_c.theta_grid, "Comma-separated theta0 values")
      ->required();
  det_cmd->add_option("--vartheta-grid", det_c.vartheta_grid, "Comma-separated vartheta0 values")
      ->required();
  add_design_flags(det_cmd, det_c.design, false);
  det_cmd->add_option("--n-mc", det_c.n_mc, "Latent draws per grid point")->capture_default_str();
  det_cmd->add_option("--seed", det_c.seed, "Seed")->capture_default_str();
  det_cmd->add_option("--threads", det_c.threads, "Worker threads")->check(CLI::PositiveNumber);
  det_cmd->add_option("--out", det_c.out, "Output path (default stdout)");
  det_cmd->add_option("--method", det_c.method, "Expectation by sampling or quadrature")
      ->check(CLI::IsMember({"mc", "quadrature"}))
      ->capture_default_str();
  det_cmd->add_option("--nodes", det_c.nodes, "Quadrature nodes per axis")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit_cmd) return run_fit(fit_c);
    if (*test_cmd) return run_test(test_c);
    if (*sim_cmd) return run_simulate(sim_c);
    if (*mc_cmd) return run_mc(mc_c);
    if (*alpha_cmd) return run_alpha(alpha_c);
    if (*tau_cmd) return run_tau(tau_c);
    if (*det_cmd) return run_detscan(det_c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
