#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "truncdep/estimation.hpp"
#include "truncdep/inference.hpp"
#include "truncdep/montecarlo.hpp"
#include "truncdep/sampling.hpp"

namespace truncdep::io {

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

/// Reads a sample with header `x,t`. Every row is checked against the
/// truncation region of `design`; errors cite the 1-based line number.
TruncatedSample read_sample_csv(std::istream& in, const StudyDesign& design,
                                const std::string& source = "<input>");
TruncatedSample read_sample_csv_file(const std::string& path, const StudyDesign& design);

void write_sample_csv(std::ostream& out, const TruncatedSample& sample);

nlohmann::ordered_json to_json(const ModelParams& params);
nlohmann::ordered_json to_json(const StudyDesign& design);
nlohmann::ordered_json to_json(const FitResult& fit);
nlohmann::ordered_json to_json(const TestResult& test);
nlohmann::ordered_json to_json(const TrendReport& trend);
nlohmann::ordered_json to_json(const ScenarioSpec& spec);
nlohmann::ordered_json to_json(const McSummary& summary);

/// Accepts a JSON array of scenarios or an object with a "scenarios" array.
/// Field names follow ScenarioSpec; level defaults to 0.05.
std::vector<ScenarioSpec> parse_scenarios(const nlohmann::json& doc);
ScenarioSpec parse_scenario(const nlohmann::json& obj);

/// Column names of the scenario summary CSV, in order.
const std::vector<std::string>& summary_columns();
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const ScenarioSpec& spec, const McSummary& summary);

void write_power_curve_csv(std::ostream& out, const std::vector<PowerPoint>& curve);

}  // namespace truncdep::io
