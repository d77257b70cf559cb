#include "scalebreak/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "scalebreak/errors.hpp"

namespace scalebreak {

namespace {

Json optional_index(const std::optional<std::size_t>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json range_json(const IndexRange& r) { return Json::array({r.first, r.last}); }

Json lines_json(const SegmentLines& l) {
  return {{"a1", number_to_json(l.a1)},
          {"b1", number_to_json(l.b1)},
          {"a2", number_to_json(l.a2)},
          {"b2", number_to_json(l.b2)}};
}

Json numbers_json(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) {
    out.push_back(number_to_json(x));
  }
  return out;
}

Json indices_json(const std::vector<std::optional<std::size_t>>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) {
    out.push_back(optional_index(x));
  }
  return out;
}

Json counts_json(const RejectCounts& c) { return {{"gsw_c", c.gsw_c}, {"kwz_v", c.kwz_v}}; }

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw ParseError(0, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

double line_at(const SegmentLines& l, std::size_t split, std::size_t j) {
  const auto x = static_cast<double>(j);
  return j <= split ? l.a1 + l.b1 * x : l.a2 + l.b2 * x;
}

}  // namespace

Json number_to_json(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  return v;
}

double number_from_json(const Json& j) {
  if (j.is_number()) {
    return j.get<double>();
  }
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
      return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan") {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  throw ParseError(0, "expected a number, got " + j.dump());
}

Json to_json(const MarsModel& model) {
  Json terms = Json::array();
  for (const MarsTerm& t : model.terms) {
    terms.push_back({{"knot", number_to_json(t.basis.knot)},
                     {"direction", t.basis.direction == HingeDirection::Plus ? "plus" : "minus"},
                     {"coefficient", number_to_json(t.coefficient)}});
  }
  return {{"intercept", number_to_json(model.intercept)},
          {"terms", terms},
          {"rss", number_to_json(model.rss)},
          {"gcv", number_to_json(model.gcv)},
          {"effective_params", number_to_json(model.effective_params)}};
}

Json to_json(const ChangePointResult& result) {
  Json j = {{"method", to_string(result.method)},
            {"l_hat", result.l_hat},
            {"lines", lines_json(result.lines)},
            {"objective", number_to_json(result.objective)}};
  if (result.hinge) {
    j["hinge"] = {{"knot", number_to_json(result.hinge->knot)},
                  {"beta0", number_to_json(result.hinge->beta0)},
                  {"beta1", number_to_json(result.hinge->beta1)},
                  {"beta2", number_to_json(result.hinge->beta2)},
                  {"sse", number_to_json(result.hinge->sse)}};
  }
  if (result.mars) {
    j["mars"] = to_json(*result.mars);
  }
  return j;
}

Json to_json(const ScaleTestOutcome& o) {
  return {{"test", "ansari_bradley"},
          {"w", number_to_json(o.w)},
          {"w_star", number_to_json(o.w_star)},
          {"p_value", number_to_json(o.p_value)},
          {"p_value_paper_onesided", number_to_json(o.p_value_paper_onesided)},
          {"reject", o.reject},
          {"n_first", o.n_first},
          {"n_second", o.n_second}};
}

Json to_json(const TestOutcome& o) {
  return {{"test", "quantile_binomial"},
          {"statistic", number_to_json(o.statistic)},
          {"p_value", number_to_json(o.p_value)},
          {"reject", o.reject},
          {"quantile_lo", number_to_json(o.quantile_lo)},
          {"quantile_hi", number_to_json(o.quantile_hi)},
          {"n_reference", o.n_reference},
          {"n_tested", o.n_tested},
          {"reference_segment", o.reference_is_first ? "first" : "second"}};
}

Json to_json(const SegmentationReport& report) {
  Json v;
  if (report.result_v) {
    v = to_json(*report.result_v);
    v["p_value"] = number_to_json(report.test_v->p_value);
    v["reject"] = report.test_v->reject;
    v["test"] = to_json(*report.test_v);
    v["segments"] = {range_json(report.segments_v->first), range_json(report.segments_v->second)};
  } else {
    v = {{"method", to_string(BreakMethod::VMars)},
         {"l_hat", nullptr},
         {"p_value", nullptr},
         {"reject", false},
         {"note", "no break candidate"}};
  }
  Json c = to_json(report.result_c);
  c["p_value"] = number_to_json(report.test_c.p_value);
  c["reject"] = report.test_c.reject;
  c["test"] = to_json(report.test_c);
  c["segments"] = {range_json(report.segments_c.first), range_json(report.segments_c.second)};
  return {{"n", report.n}, {"alpha", number_to_json(report.alpha)}, {"v", v}, {"c", c}};
}

Json to_json(const StableParams& p) {
  return {{"alpha", number_to_json(p.alpha)},
          {"beta", number_to_json(p.beta)},
          {"sigma", number_to_json(p.sigma)},
          {"mu", number_to_json(p.mu)}};
}

Json to_json(const GaussianParams& p) {
  return {{"mu", number_to_json(p.mu)}, {"sigma", number_to_json(p.sigma)}};
}

Json to_json(const GofResult& r) {
  Json fitted = std::visit([](const auto& p) { return to_json(p); }, r.fitted);
  return {{"family", to_string(r.family)},
          {"fitted", fitted},
          {"ks", number_to_json(r.ks)},
          {"ks_p", number_to_json(r.ks_p)},
          {"ad", number_to_json(r.ad)},
          {"ad_p", number_to_json(r.ad_p)},
          {"bootstrap_replicates", r.bootstrap_replicates},
          {"fit_converged", r.fit_converged}};
}

Json to_json(const SegmentGenerator& g) {
  Json j = {{"family", to_string(g.family)}, {"length", g.length}};
  if (g.family == Family::Gaussian) {
    j["mu"] = g.gaussian.mu;
    j["sigma"] = g.gaussian.sigma;
  } else {
    j["alpha"] = g.stable.alpha;
    j["beta"] = g.stable.beta;
    j["sigma"] = g.stable.sigma;
    j["mu"] = g.stable.mu;
  }
  return j;
}

Json to_json(const ScenarioSpec& s) {
  return {{"name", s.name},
          {"first", to_json(s.first_segment)},
          {"second", to_json(s.second_segment)},
          {"permute", s.permute},
          {"trials", s.n_trials},
          {"alpha", s.alpha},
          {"seed", s.seed},
          {"true_l", optional_index(s.true_l)},
          {"max_terms", s.mars.max_terms},
          {"knot_stride", s.mars.knot_stride}};
}

Json to_json(const ScenarioReport& r) {
  Json errors = Json::array();
  for (std::size_t t = 0; t < r.trial_errors.size(); ++t) {
    if (!r.trial_errors[t].empty()) {
      errors.push_back({{"trial", t}, {"error", r.trial_errors[t]}});
    }
  }
  return {{"spec", to_json(r.spec)},
          {"l_hat_v_samples", indices_json(r.l_hat_v_samples)},
          {"l_hat_c_samples", indices_json(r.l_hat_c_samples)},
          {"mean_split_v", optional_index(r.mean_split_v)},
          {"mean_split_c", optional_index(r.mean_split_c)},
          {"p_value_v_samples", numbers_json(r.p_value_v_samples)},
          {"p_value_c_samples", numbers_json(r.p_value_c_samples)},
          {"reject_counts", counts_json(r.reject_counts)},
          {"tested_trials", counts_json(r.tested_trials)},
          {"per_trial_p_value_v", numbers_json(r.per_trial_p_value_v)},
          {"per_trial_p_value_c", numbers_json(r.per_trial_p_value_c)},
          {"per_trial_reject_counts", counts_json(r.per_trial_reject_counts)},
          {"failed_trials", r.failed_trials},
          {"no_break_v", r.no_break_v},
          {"trial_errors", errors}};
}

Json to_json(const ErrorTable& table) {
  Json rows = Json::array();
  for (const ErrorRow& row : table.rows) {
    rows.push_back({{"scenario", row.scenario},
                    {"gsw_c", row.gsw_c},
                    {"kwz_v", row.kwz_v},
                    {"n_trials", row.n_trials}});
  }
  return {{"kind", table.kind == ErrorKind::TypeI ? "type_i" : "type_ii"}, {"rows", rows}};
}

SegmentGenerator segment_generator_from_json(const Json& j) {
  const auto family = field<std::string>(j, "family");
  const auto length = field<std::size_t>(j, "length");
  if (family == "gaussian" || family == "normal") {
    return SegmentGenerator::normal(field_or<double>(j, "mu", 0.0), field<double>(j, "sigma"),
                                    length);
  }
  if (family == "stable") {
    return SegmentGenerator::levy_stable(
        {field<double>(j, "alpha"), field_or<double>(j, "beta", 0.0), field<double>(j, "sigma"),
         field_or<double>(j, "mu", 0.0)},
        length);
  }
  throw ParseError(0, "unknown family '" + family + "'");
}

ScenarioSpec scenario_from_json(const Json& j) {
  if (!j.is_object()) {
    throw ParseError(0, "scenario must be an object");
  }
  ScenarioSpec s;
  s.name = field_or<std::string>(j, "name", "scenario");
  s.first_segment = segment_generator_from_json(field<Json>(j, "first"));
  s.second_segment = segment_generator_from_json(field<Json>(j, "second"));
  s.permute = field_or<bool>(j, "permute", false);
  s.n_trials = field_or<std::size_t>(j, "trials", 1000);
  s.alpha = field_or<double>(j, "alpha", 0.05);
  s.seed = field_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("true_l") && !j.at("true_l").is_null()) {
    s.true_l = field<std::size_t>(j, "true_l");
  }
  s.mars.max_terms = field_or<int>(j, "max_terms", s.mars.max_terms);
  s.mars.knot_stride = field_or<int>(j, "knot_stride", s.mars.knot_stride);
  s.validate();
  return s;
}

std::vector<ScenarioSpec> load_scenario_file(const std::filesystem::path& path) {
  const Json doc = read_report(path);
  std::vector<ScenarioSpec> out;
  if (doc.is_object() && doc.contains("scenarios")) {
    for (const Json& s : doc.at("scenarios")) {
      out.push_back(scenario_from_json(s));
    }
  } else {
    out.push_back(scenario_from_json(doc));
  }
  if (out.empty()) {
    throw InvalidInput("scenario file lists no scenarios");
  }
  return out;
}

Json read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, "malformed JSON in '" + path.string() + "': " + e.what());
  }
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

void write_report(const Json& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  out << dump_report(report);
  if (!out) {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

void write_plot_data(std::ostream& out, const TimeSeries& series,
                     const SegmentationReport& report) {
  const CumulativeStat v = v_statistics(series);
  const CumulativeStat c = c_statistics(series);
  out << std::setprecision(17);
  out << "j,V,C,V_fit,C_fit\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t j = i + 1;
    out << j << ',' << v.values[i] << ',' << c.values[i] << ',';
    if (report.result_v) {
      out << line_at(report.result_v->lines, report.result_v->l_hat, j);
    }
    out << ',' << line_at(report.result_c.lines, report.result_c.l_hat, j) << '\n';
  }
}

void write_trial_table(std::ostream& out, const std::vector<ScenarioReport>& reports) {
  out << std::setprecision(17);
  out << "scenario,trial,l_hat_v,l_hat_c,p_value_v,p_value_c\n";
  auto opt = [&](const std::optional<std::size_t>& v) {
    if (v) {
      out << *v;
    }
  };
  auto num = [&](double v) {
    if (!std::isnan(v)) {
      out << v;
    }
  };
  for (const ScenarioReport& r : reports) {
    for (std::size_t t = 0; t < r.l_hat_v_samples.size(); ++t) {
      out << '"' << r.spec.name << "\"," << t << ',';
      opt(r.l_hat_v_samples[t]);
      out << ',';
      opt(r.l_hat_c_samples[t]);
      out << ',';
      num(r.p_value_v_samples[t]);
      out << ',';
      num(r.p_value_c_samples[t]);
      out << '\n';
    }
  }
}

std::string format_error_table(const ErrorTable& table) {
  std::size_t width = 8;
  for (const ErrorRow& row : table.rows) {
    width = std::max(width, row.scenario.size());
  }
  std::ostringstream os;
  os << (table.kind == ErrorKind::TypeI ? "Type I errors (rejections)"
                                        : "Type II errors (acceptances)")
     << '\n';
  os << std::left << std::setw(static_cast<int>(width) + 2) << "scenario" << std::right
     << std::setw(8) << "GSW-C" << std::setw(8) << "KWZ-V" << std::setw(8) << "trials" << '\n';
  for (const ErrorRow& row : table.rows) {
    os << std::left << std::setw(static_cast<int>(width) + 2) << row.scenario << std::right
       << std::setw(8) << row.gsw_c << std::setw(8) << row.kwz_v << std::setw(8) << row.n_trials
       << '\n';
  }
  return os.str();
}

}  // namespace scalebreak
