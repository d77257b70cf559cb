#include "scalebreak/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "scalebreak/changepoint.hpp"
#include "scalebreak/distributions.hpp"
#include "scalebreak/errors.hpp"
#include "scalebreak/report.hpp"
#include "scalebreak/simlab.hpp"

namespace scalebreak {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view token) {
  if (!token.empty() && token.front() == '+') {
    token.remove_prefix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    return std::nullopt;
  }
  return v;
}

void emit(const Json& doc, const RunConfig& config, std::ostream& out) {
  if (config.output_path) {
    write_report(doc, *config.output_path);
  } else {
    out << dump_report(doc);
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  return f;
}

void run_detect(const RunConfig& config, std::ostream& out) {
  const TimeSeries series = load_series(*config.input_path);
  const SegmentationReport report = segment(series, config.alpha, config.mars);
  Json doc = to_json(report);
  doc["command"] = "detect";
  doc["input"] = config.input_path->string();
  doc["max_terms"] = config.mars.max_terms;
  doc["knot_stride"] = config.mars.knot_stride;
  emit(doc, config, out);
  if (config.plot_data_path) {
    auto f = open_output(*config.plot_data_path);
    write_plot_data(f, series, report);
  }
}

void run_test_scale(const RunConfig& config, std::ostream& out) {
  const TimeSeries series = load_series(*config.input_path);
  const std::size_t l = *config.split;
  split_ranges(series.size(), l);
  const auto values = series.values();
  const ScaleTestOutcome outcome = ansari_bradley(values.first(l), values.subspan(l), config.alpha);
  Json doc = to_json(outcome);
  doc["command"] = "test-scale";
  doc["input"] = config.input_path->string();
  doc["split"] = l;
  doc["alpha"] = config.alpha;
  emit(doc, config, out);
}

void run_fit_dist(const RunConfig& config, std::ostream& out) {
  const TimeSeries series = load_series(*config.input_path);
  std::size_t l = 0;
  std::string split_source;
  if (config.split) {
    l = *config.split;
    split_source = "user";
  } else {
    const SegmentationReport seg = segment(series, config.alpha, config.mars);
    l = seg.result_v ? seg.result_v->l_hat : seg.result_c.l_hat;
    split_source = seg.result_v ? "V_MARS" : "C_TWOLINE";
  }
  const auto [first, second] = split_ranges(series.size(), l);
  const RandomStream master(config.seed, 1);

  Json segments = Json::array();
  std::size_t index = 0;
  for (const IndexRange& range : {first, second}) {
    const TimeSeries part = series.slice(range.first - 1, range.last);
    const GofResult stable =
        bootstrap_gof_pvalue(part, Family::Stable, config.bootstrap_b, master.substream(2 * index));
    const GofResult gaussian = bootstrap_gof_pvalue(part, Family::Gaussian, config.bootstrap_b,
                                                    master.substream(2 * index + 1));
    segments.push_back({{"range", Json::array({range.first, range.last})},
                        {"stable", to_json(stable)},
                        {"gaussian", to_json(gaussian)}});
    ++index;
  }
  Json doc = {{"command", "fit-dist"},
              {"input", config.input_path->string()},
              {"split", l},
              {"split_source", split_source},
              {"seed", config.seed},
              {"segments", segments}};
  emit(doc, config, out);
}

void run_simulate(const RunConfig& config, std::ostream& out) {
  std::vector<ScenarioSpec> specs;
  const std::size_t trials = config.trials.value_or(1000);
  if (std::filesystem::exists(config.scenario)) {
    specs = load_scenario_file(config.scenario);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (config.trials) {
        specs[i].n_trials = *config.trials;
      }
      if (config.seed_given) {
        specs[i].seed = config.seed + i;
      }
    }
  } else {
    specs = preset_scenarios(config.scenario, trials, config.seed);
  }
  for (ScenarioSpec& s : specs) {
    s.alpha = config.alpha;
    s.mars = config.mars;
  }

  std::vector<ScenarioReport> reports;
  for (const ScenarioSpec& s : specs) {
    reports.push_back(run_scenario(s));
  }
  const ErrorTable table = error_summary(reports, natural_error_kind(specs));

  Json doc = {{"command", "simulate"}, {"scenario", config.scenario}, {"summary", to_json(table)}};
  Json scenarios = Json::array();
  for (const ScenarioReport& r : reports) {
    scenarios.push_back(to_json(r));
  }
  doc["scenarios"] = scenarios;
  if (config.output_path) {
    write_report(doc, *config.output_path);
    out << format_error_table(table);
  } else {
    out << dump_report(doc);
  }
  if (config.plot_data_path) {
    auto f = open_output(*config.plot_data_path);
    write_trial_table(f, reports);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("--alpha must lie in (0, 1)");
  }
  mars.validate();
  const bool needs_input = command != Command::Simulate;
  if (needs_input && !input_path) {
    throw InvalidInput("--input is required");
  }
  if (command == Command::TestScale && !split) {
    throw InvalidInput("--split is required for test-scale");
  }
  if (command == Command::Simulate && scenario.empty()) {
    throw InvalidInput("--scenario is required for simulate");
  }
  if (command == Command::FitDist && bootstrap_b < 100) {
    throw InvalidInput("--bootstrap-b must be at least 100");
  }
}

TimeSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::vector<double> values;
  std::string line;
  std::size_t record = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++record;
    const std::string_view token = trim(line);
    if (token.empty()) {
      continue;
    }
    const auto v = parse_number(token);
    if (!v) {
      if (first_record) {
        first_record = false;
        continue;
      }
      throw ParseError(record, "'" + std::string(token) + "' is not a number");
    }
    first_record = false;
    if (!std::isfinite(*v)) {
      throw ParseError(record, "non-finite value");
    }
    values.push_back(*v);
  }
  if (in.bad()) {
    throw IoError("read error on '" + path.string() + "'");
  }
  if (values.empty()) {
    throw InvalidInput("'" + path.string() + "' holds no observations");
  }
  return TimeSeries(std::move(values));
}

void run(const RunConfig& config, std::ostream& out) {
  config.validate();
  switch (config.command) {
    case Command::Detect:
      run_detect(config, out);
      break;
    case Command::Simulate:
      run_simulate(config, out);
      break;
    case Command::FitDist:
      run_fit_dist(config, out);
      break;
    case Command::TestScale:
      run_test_scale(config, out);
      break;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structural break detection for heavy-tailed signals", "scalebreak"};
  app.require_subcommand(1);

  RunConfig config;
  std::string input;
  std::string output;
  std::string plot;
  std::size_t split = 0;
  std::size_t trials = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", config.alpha, "Significance level")->capture_default_str();
    sub->add_option("--seed", config.seed, "Master random seed")->capture_default_str();
    sub->add_option("--max-terms", config.mars.max_terms, "Spline term budget")
        ->capture_default_str();
    sub->add_option("--knot-stride", config.mars.knot_stride, "Candidate knot thinning")
        ->capture_default_str();
    sub->add_option("--output", output, "Report file (default: standard output)");
  };

  auto* detect = app.add_subcommand("detect", "Estimate the break and test both regimes");
  add_common(detect);
  detect->add_option("--input", input, "Single-column data file")->required();
  detect->add_option("--plot-data", plot, "Write V, C and fitted lines as CSV");

  auto* simulate = app.add_subcommand("simulate", "Run Monte Carlo scenarios");
  add_common(simulate);
  simulate->add_option("--scenario", config.scenario, "Preset name or scenario file")
      ->required();
  simulate->add_option("--trials", trials, "Override the number of trials");
  simulate->add_option("--plot-data", plot, "Write per-trial estimates as CSV");

  auto* fit = app.add_subcommand("fit-dist", "Fit stable and Gaussian laws to both segments");
  add_common(fit);
  fit->add_option("--input", input, "Single-column data file")->required();
  fit->add_option("--split", split, "Last index of the first segment (default: estimated)");
  fit->add_option("--bootstrap-b", config.bootstrap_b, "Bootstrap replicates")
      ->capture_default_str();

  auto* scale = app.add_subcommand("test-scale", "Ansari-Bradley test at a given split");
  add_common(scale);
  scale->add_option("--input", input, "Single-column data file")->required();
  scale->add_option("--split", split, "Last index of the first segment")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen == detect) {
    config.command = Command::Detect;
  } else if (chosen == simulate) {
    config.command = Command::Simulate;
  } else if (chosen == fit) {
    config.command = Command::FitDist;
  } else {
    config.command = Command::TestScale;
  }
  config.seed_given = chosen->count("--seed") > 0;
  if (!input.empty()) {
    config.input_path = input;
  }
  if (!output.empty()) {
    config.output_path = output;
  }
  if (!plot.empty()) {
    config.plot_data_path = plot;
  }
  if (chosen->get_option_no_throw("--split") && chosen->count("--split") > 0) {
    config.split = split;
  }
  if (chosen == simulate && chosen->count("--trials") > 0) {
    config.trials = trials;
  }

  try {
    config.validate();
  } catch (const InvalidInput& e) {
    err << "scalebreak: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    run(config, out);
  } catch (const DegenerateModel& e) {
    err << "scalebreak: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    err << "scalebreak: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "scalebreak: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "scalebreak: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace scalebreak
