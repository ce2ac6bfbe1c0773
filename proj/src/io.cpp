#include "truncdep/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "truncdep/errors.hpp"

namespace truncdep::io {

using nlohmann::ordered_json;

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_field(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || text.empty() || !std::isfinite(value)) {
    throw DomainError(where + ": cannot parse number '" + text + "'");
  }
  return value;
}

// Non-finite values are not representable in JSON; emit null instead.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json matrix(const Eigen::Matrix2d& m) {
  return ordered_json::array({ordered_json::array({num(m(0, 0)), num(m(0, 1))}),
                              ordered_json::array({num(m(1, 0)), num(m(1, 1))})});
}

}  // namespace

TruncatedSample read_sample_csv(std::istream& in, const StudyDesign& design,
                                const std::string& source) {
  validate(design);
  TruncatedSample sample;
  sample.design = design;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (!header_seen) {
      if (line_no == 1 && row.size() >= 3 && row.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        throw DomainError(source + ":1: byte-order mark not supported");
      }
      if (row != "x,t") {
        throw DomainError(source + ":" + std::to_string(line_no) +
                          ": expected header 'x,t', found '" + row + "'");
      }
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw DomainError(where + ": expected two comma-separated fields");
    }
    const double x = parse_field(trim(std::string_view(row).substr(0, comma)), where);
    const double t = parse_field(trim(std::string_view(row).substr(comma + 1)), where);
    if (!in_truncation_region(x, t, design)) {
      throw DomainError(where + ": pair (x=" + format_double(x) + ", t=" + format_double(t) +
                        ") violates 0 < t < G and t <= x <= t + s");
    }
    sample.observations.push_back({x, t});
  }
  if (!header_seen) throw DomainError(source + ": empty input, expected header 'x,t'");
  return sample;
}

TruncatedSample read_sample_csv_file(const std::string& path, const StudyDesign& design) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  return read_sample_csv(in, design, path);
}

void write_sample_csv(std::ostream& out, const TruncatedSample& sample) {
  out << "x,t\n";
  for (const auto& p : sample.observations) {
    out << format_double(p.x_tilde) << ',' << format_double(p.t_tilde) << '\n';
  }
}

ordered_json to_json(const ModelParams& params) {
  return {{"family", std::string(to_string(params.family))},
          {"theta", num(params.theta)},
          {"vartheta", num(params.vartheta)}};
}

ordered_json to_json(const StudyDesign& design) {
  return {{"big_g", num(design.big_g)}, {"s", num(design.s)}};
}

ordered_json to_json(const FitResult& fit) {
  return {
      {"family", std::string(to_string(fit.params_hat.family))},
      {"theta_hat", num(fit.params_hat.theta)},
      {"vartheta_hat", num(fit.params_hat.vartheta)},
      {"m", fit.m},
      {"n_hat", fit.n_hat},
      {"at_boundary", fit.at_boundary},
      {"log_lik", num(fit.log_lik)},
      {"profile_objective", num(fit.profile_objective)},
      {"score", ordered_json::array({num(fit.score(0)), num(fit.score(1))})},
      {"info_hat", matrix(fit.info_hat)},
      {"cov_hat", fit.cov_available ? matrix(fit.cov_hat) : ordered_json(nullptr)},
      {"se_theta", fit.cov_available ? num(fit.se(0)) : ordered_json(nullptr)},
      {"se_vartheta", fit.cov_available ? num(fit.se(1)) : ordered_json(nullptr)},
      {"converged", fit.converged},
      {"kkt_ok", fit.kkt_ok},
      {"iterations", fit.iterations},
  };
}

ordered_json to_json(const TestResult& test) {
  return {{"statistic", num(test.statistic)},
          {"p_value", num(test.p_value)},
          {"reject", test.reject},
          {"level", num(test.level)},
          {"sigma_vartheta_hat", num(test.sigma_vartheta_hat)},
          {"boundary", test.boundary},
          {"n_hat", test.n_hat}};
}

ordered_json to_json(const TrendReport& trend) {
  return {{"life_expectancy_at_mid", num(trend.life_expectancy_at_mid)},
          {"annual_change", num(trend.annual_change)},
          {"annual_change_days", num(trend.annual_change_days)}};
}

ordered_json to_json(const ScenarioSpec& spec) {
  return {{"design", to_json(spec.design)},
          {"n", spec.n},
          {"params0", to_json(spec.params0)},
          {"replications", spec.replications},
          {"seed", spec.seed},
          {"level", num(spec.level)}};
}

ordered_json to_json(const McSummary& s) {
  return {
      {"bias_theta", num(s.bias_theta)},
      {"bias_vartheta", num(s.bias_vartheta)},
      {"var_theta", num(s.var_theta)},
      {"var_vartheta", num(s.var_vartheta)},
      {"var_central_theta", num(s.var_central_theta)},
      {"var_central_vartheta", num(s.var_central_vartheta)},
      {"rejection_rate", num(s.rejection_rate)},
      {"boundary_fraction", num(s.boundary_fraction)},
      {"mc_se",
       {{"bias_theta", num(s.mc_se.bias_theta)},
        {"bias_vartheta", num(s.mc_se.bias_vartheta)},
        {"var_theta", num(s.mc_se.var_theta)},
        {"var_vartheta", num(s.mc_se.var_vartheta)},
        {"rejection_rate", num(s.mc_se.rejection_rate)},
        {"boundary_fraction", num(s.mc_se.boundary_fraction)}}},
      {"replications", s.replications},
      {"successes", s.successes},
      {"failures", s.failures},
      {"mean_m", num(s.mean_m)},
  };
}

ScenarioSpec parse_scenario(const nlohmann::json& obj) {
  if (!obj.is_object()) throw DomainError("scenario must be a JSON object");
  try {
    ScenarioSpec spec;
    const auto& design = obj.at("design");
    spec.design.big_g = design.at("big_g").get<double>();
    spec.design.s = design.at("s").get<double>();
    const auto& p = obj.at("params0");
    spec.params0.family = parse_family(p.at("family").get<std::string>());
    spec.params0.theta = p.at("theta").get<double>();
    spec.params0.vartheta = p.at("vartheta").get<double>();
    spec.n = obj.at("n").get<std::size_t>();
    spec.replications = obj.at("replications").get<std::size_t>();
    spec.seed = obj.at("seed").get<std::uint64_t>();
    spec.level = obj.value("level", 0.05);
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("invalid scenario: ") + e.what());
  }
}

std::vector<ScenarioSpec> parse_scenarios(const nlohmann::json& doc) {
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("scenarios")) throw DomainError("scenario file lacks a 'scenarios' array");
    list = &doc.at("scenarios");
  }
  if (!list->is_array()) throw DomainError("scenarios must be a JSON array");
  std::vector<ScenarioSpec> out;
  out.reserve(list->size());
  for (std::size_t i = 0; i < list->size(); ++i) {
    try {
      out.push_back(parse_scenario((*list)[i]));
    } catch (const DomainError& e) {
      throw DomainError("scenario " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "family", "big_g", "s", "n", "theta0", "vartheta0", "replications", "seed", "level",
      "bias_theta", "bias_vartheta", "var_theta", "var_vartheta", "var_central_theta",
      "var_central_vartheta", "rejection_rate", "boundary_fraction", "mc_se_bias_theta",
      "mc_se_bias_vartheta", "mc_se_var_theta", "mc_se_var_vartheta", "mc_se_rejection_rate",
      "mc_se_boundary_fraction", "successes", "failures", "mean_m"};
  return cols;
}

void write_summary_header(std::ostream& out) {
  const auto& cols = summary_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_summary_row(std::ostream& out, const ScenarioSpec& spec, const McSummary& s) {
  const auto f = format_double;
  out << to_string(spec.params0.family) << ',' << f(spec.design.big_g) << ',' << f(spec.design.s)
      << ',' << spec.n << ',' << f(spec.params0.theta) << ',' << f(spec.params0.vartheta) << ','
      << spec.replications << ',' << spec.seed << ',' << f(spec.level) << ',' << f(s.bias_theta)
      << ',' << f(s.bias_vartheta) << ',' << f(s.var_theta) << ',' << f(s.var_vartheta) << ','
      << f(s.var_central_theta) << ',' << f(s.var_central_vartheta) << ','
      << f(s.rejection_rate) << ',' << f(s.boundary_fraction) << ',' << f(s.mc_se.bias_theta)
      << ',' << f(s.mc_se.bias_vartheta) << ',' << f(s.mc_se.var_theta) << ','
      << f(s.mc_se.var_vartheta) << ',' << f(s.mc_se.rejection_rate) << ','
      << f(s.mc_se.boundary_fraction) << ',' << s.successes << ',' << s.failures << ','
      << f(s.mean_m) << '\n';
}

void write_power_curve_csv(std::ostream& out, const std::vector<PowerPoint>& curve) {
  out << "vartheta0,rejection_rate,mc_se\n";
  for (const auto& p : curve) {
    out << format_double(p.vartheta0) << ',' << format_double(p.rejection_rate) << ','
        << format_double(p.mc_se) << '\n';
  }
}

}  // namespace truncdep::io
