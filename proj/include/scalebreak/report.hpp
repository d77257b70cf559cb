#pragma once

// Structured reports. Every document is JSON; non-finite numbers are written
// as the strings "inf", "-inf" and "nan" so the output stays standard JSON.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "scalebreak/changepoint.hpp"
#include "scalebreak/distributions.hpp"
#include "scalebreak/hypothesis.hpp"
#include "scalebreak/simlab.hpp"

namespace scalebreak {

using Json = nlohmann::json;

Json number_to_json(double v);
/// Inverse of number_to_json; throws ParseError for anything else.
double number_from_json(const Json& j);

Json to_json(const MarsModel& model);
Json to_json(const ChangePointResult& result);
Json to_json(const ScaleTestOutcome& outcome);
Json to_json(const TestOutcome& outcome);
Json to_json(const SegmentationReport& report);
Json to_json(const StableParams& params);
Json to_json(const GaussianParams& params);
Json to_json(const GofResult& result);
Json to_json(const SegmentGenerator& generator);
Json to_json(const ScenarioSpec& spec);
Json to_json(const ScenarioReport& report);
Json to_json(const ErrorTable& table);

SegmentGenerator segment_generator_from_json(const Json& j);
ScenarioSpec scenario_from_json(const Json& j);
/// A scenario file holds one scenario object or {"scenarios": [...]}.
std::vector<ScenarioSpec> load_scenario_file(const std::filesystem::path& path);

/// Reads a report written by write_report.
Json read_report(const std::filesystem::path& path);
void write_report(const Json& report, const std::filesystem::path& path);
std::string dump_report(const Json& report);

/// Columns j, V_j, C_j, fitted V line, fitted C line (empty when absent).
void write_plot_data(std::ostream& out, const TimeSeries& series,
                     const SegmentationReport& report);
/// One row per trial: scenario, trial, l_hat_v, l_hat_c, p_v, p_c.
void write_trial_table(std::ostream& out, const std::vector<ScenarioReport>& reports);

/// Plain-text table in the layout of the published error tables.
std::string format_error_table(const ErrorTable& table);

}  // namespace scalebreak
