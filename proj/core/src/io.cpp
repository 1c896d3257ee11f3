#include "biqrm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace biqrm {

namespace {

using nlohmann::json;

ChoiceRule rule_from_string(const std::string& s) {
  if (s == "manual") return ChoiceRule::manual;
  if (s == "apriori") return ChoiceRule::apriori;
  if (s == "aposteriori") return ChoiceRule::aposteriori;
  throw std::invalid_argument("unknown rule: " + s);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_escape(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  line += '\n';
  return line;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string rate_report_csv(const RateReport& report) {
  std::string csv = csv_line({"delta", "alpha", "error", "bound", "slope_partial"});
  for (const auto& point : report.points) {
    if (point.skipped) continue;
    csv += csv_line({format_double(point.delta), format_double(point.alpha_mean),
                     format_double(point.error_mean), format_double(point.bound),
                     format_double(point.slope_partial)});
  }
  return csv;
}

std::string rate_report_plot(const RateReport& report) {
  std::string out = "# log10_delta log10_error\n";
  for (const auto& point : report.points) {
    if (point.skipped) continue;
    out += format_double(std::log10(point.delta)) + " " +
           format_double(std::log10(point.error_mean)) + "\n";
  }
  return out;
}

std::string rate_report_json(const RateReport& report) {
  json j;
  j["label"] = report.label;
  j["rule"] = to_string(report.rule);
  j["order_b"] = report.order_b;
  j["p"] = report.p;
  j["rho"] = report.rho;
  j["xi"] = report.xi;
  j["sigma"] = report.sigma;
  j["theoretical_exponent"] = report.theoretical_exponent;
  j["fitted_slope"] = report.fitted_slope;
  j["fit_residual"] = report.fit_residual;
  j["points_used"] = report.points_used;
  j["pass"] = report.pass;
  j["verdict_notes"] = report.verdict_notes;
  j["runtime_seconds"] = report.runtime_seconds;
  j["truncation_tail"] = report.truncation_tail;
  j["points"] = json::array();
  for (const auto& point : report.points) {
    json p;
    p["delta"] = point.delta;
    p["alpha_mean"] = point.alpha_mean;
    p["error_mean"] = point.error_mean;
    p["error_max"] = point.error_max;
    p["bound"] = std::isfinite(point.bound) ? json(point.bound) : json();
    p["slope_partial"] =
        std::isfinite(point.slope_partial) ? json(point.slope_partial) : json();
    p["morozov_residual_rel"] = point.morozov_residual_rel;
    p["skipped"] = point.skipped;
    j["points"].push_back(p);
  }
  return j.dump(2) + "\n";
}

RateReport parse_rate_report_json(const std::string& text) {
  const json j = json::parse(text);
  RateReport report;
  report.label = j.at("label").get<std::string>();
  report.rule = rule_from_string(j.at("rule").get<std::string>());
  report.order_b = j.at("order_b").get<double>();
  report.p = j.at("p").get<double>();
  report.rho = j.at("rho").get<double>();
  report.xi = j.at("xi").get<double>();
  report.sigma = j.at("sigma").get<double>();
  report.theoretical_exponent = j.at("theoretical_exponent").get<double>();
  report.fitted_slope = j.at("fitted_slope").get<double>();
  report.fit_residual = j.at("fit_residual").get<double>();
  report.points_used = j.at("points_used").get<int>();
  report.pass = j.at("pass").get<bool>();
  report.verdict_notes = j.at("verdict_notes").get<std::string>();
  report.runtime_seconds = j.at("runtime_seconds").get<double>();
  report.truncation_tail = j.at("truncation_tail").get<double>();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : j.at("points")) {
    RatePoint point;
    point.delta = p.at("delta").get<double>();
    point.alpha_mean = p.at("alpha_mean").get<double>();
    point.error_mean = p.at("error_mean").get<double>();
    point.error_max = p.at("error_max").get<double>();
    point.bound = p.at("bound").is_null() ? nan : p.at("bound").get<double>();
    point.slope_partial =
        p.at("slope_partial").is_null() ? nan : p.at("slope_partial").get<double>();
    point.morozov_residual_rel = p.at("morozov_residual_rel").get<double>();
    point.skipped = p.at("skipped").get<bool>();
    report.points.push_back(point);
  }
  return report;
}

std::string illposedness_csv(const std::vector<IllPosednessRow>& rows) {
  std::string csv =
      csv_line({"k", "lambda", "observation_norm", "source_norm", "ratio"});
  for (const auto& row : rows) {
    csv += csv_line({std::to_string(row.k), format_double(row.lambda),
                     format_double(row.observation_norm),
                     format_double(row.source_norm), format_double(row.ratio)});
  }
  return csv;
}

std::string inversion_summary_json(const InversionSummary& summary) {
  json j;
  j["label"] = summary.label;
  j["rule"] = to_string(summary.rule);
  j["order"] = summary.order;
  j["alpha"] = summary.alpha;
  j["delta"] = summary.delta;
  j["error"] = summary.error;
  j["bias"] = summary.bias;
  j["bias_cap"] = summary.bias_cap;
  j["noise_part"] = summary.noise_part;
  j["noise_cap"] = summary.noise_cap;
  j["discrepancy_value"] = summary.discrepancy_value;
  j["stability_constant"] = summary.stability_constant;
  j["residual_norm"] = summary.residual_norm;
  return j.dump(2) + "\n";
}

InversionSummary parse_inversion_summary_json(const std::string& text) {
  const json j = json::parse(text);
  InversionSummary summary;
  summary.label = j.at("label").get<std::string>();
  summary.rule = rule_from_string(j.at("rule").get<std::string>());
  summary.order = j.at("order").get<double>();
  summary.alpha = j.at("alpha").get<double>();
  summary.delta = j.at("delta").get<double>();
  summary.error = j.at("error").get<double>();
  summary.bias = j.at("bias").get<double>();
  summary.bias_cap = j.at("bias_cap").get<double>();
  summary.noise_part = j.at("noise_part").get<double>();
  summary.noise_cap = j.at("noise_cap").get<double>();
  summary.discrepancy_value = j.at("discrepancy_value").get<double>();
  summary.stability_constant = j.at("stability_constant").get<double>();
  summary.residual_norm = j.at("residual_norm").get<double>();
  return summary;
}

std::string morozov_result_json(const MorozovResult& result) {
  json j;
  j["order"] = result.config.order;
  j["alpha"] = result.config.alpha;
  j["delta"] = result.config.delta;
  j["xi"] = result.config.xi;
  j["sigma"] = result.config.sigma;
  j["target"] = result.target;
  j["achieved"] = result.achieved;
  j["iterations"] = result.iterations;
  return j.dump(2) + "\n";
}

MorozovResult parse_morozov_result_json(const std::string& text) {
  const json j = json::parse(text);
  MorozovResult result;
  result.config.rule = ChoiceRule::aposteriori;
  result.config.order = j.at("order").get<double>();
  result.config.alpha = j.at("alpha").get<double>();
  result.config.delta = j.at("delta").get<double>();
  result.config.xi = j.at("xi").get<double>();
  result.config.sigma = j.at("sigma").get<double>();
  result.target = j.at("target").get<double>();
  result.achieved = j.at("achieved").get<double>();
  result.iterations = j.at("iterations").get<int>();
  return result;
}

std::string optimality_report_json(const OptimalityReport& report) {
  json j;
  j["r2"] = report.r2;
  j["ratio_min"] = report.ratio_min;
  j["ratio_max"] = report.ratio_max;
  j["embedding_ok"] = report.embedding_ok;
  j["pass"] = report.pass;
  j["convention"] = report.convention;
  j["points"] = json::array();
  for (const auto& point : report.points) {
    json p;
    p["delta"] = point.delta;
    p["worst_error"] = point.worst_error;
    p["omega_lower"] = point.omega_lower;
    p["omega_upper"] = point.omega_upper;
    p["ratio"] = point.ratio;
    p["ratio_ceiling"] = point.ratio_ceiling;
    j["points"].push_back(p);
  }
  return j.dump(2) + "\n";
}

OptimalityReport parse_optimality_report_json(const std::string& text) {
  const json j = json::parse(text);
  OptimalityReport report;
  report.r2 = j.at("r2").get<double>();
  report.ratio_min = j.at("ratio_min").get<double>();
  report.ratio_max = j.at("ratio_max").get<double>();
  report.embedding_ok = j.at("embedding_ok").get<bool>();
  report.pass = j.at("pass").get<bool>();
  report.convention = j.at("convention").get<std::string>();
  for (const auto& p : j.at("points")) {
    OptimalityPoint point;
    point.delta = p.at("delta").get<double>();
    point.worst_error = p.at("worst_error").get<double>();
    point.omega_lower = p.at("omega_lower").get<double>();
    point.omega_upper = p.at("omega_upper").get<double>();
    point.ratio = p.at("ratio").get<double>();
    point.ratio_ceiling = p.at("ratio_ceiling").get<double>();
    report.points.push_back(point);
  }
  return report;
}

std::string admissibility_report_json(const AdmissibilityReport& report) {
  json j;
  switch (report.satisfied) {
    case AdmissibilityCase::fixed_sign: j["case"] = "fixed_sign"; break;
    case AdmissibilityCase::sign_changing: j["case"] = "sign_changing"; break;
    case AdmissibilityCase::fails: j["case"] = "fails"; break;
  }
  j["horizon"] = report.horizon;
  j["tau0"] = report.tau0;
  j["kappa1"] = report.kappa1;
  j["kappa2"] = report.kappa2;
  j["tau1"] = report.tau1;
  j["sign_change_bound"] = report.sign_change_bound;
  j["sign_change_max_abs"] = report.sign_change_max_abs;
  j["c_tilde"] = report.c_tilde;
  j["psi_at_0"] = report.psi_at_0;
  j["psi_at_horizon"] = report.psi_at_horizon;
  j["sup_norm"] = report.sup_norm;
  j["integral_abs_tau1_tau0"] = report.integral_abs_tau1_tau0;
  j["lambda1_hint"] = report.lambda1_hint;
  j["lower_bound_hint"] = report.lower_bound_hint;
  j["failure_reason"] = report.failure_reason;
  j["sign_change_set"] = json::array();
  for (const auto& iv : report.sign_change_set) {
    j["sign_change_set"].push_back({{"from", iv.from}, {"to", iv.to}});
  }
  return j.dump(2) + "\n";
}

AdmissibilityReport parse_admissibility_report_json(const std::string& text) {
  const json j = json::parse(text);
  AdmissibilityReport report;
  const std::string satisfied = j.at("case").get<std::string>();
  if (satisfied == "fixed_sign")
    report.satisfied = AdmissibilityCase::fixed_sign;
  else if (satisfied == "sign_changing")
    report.satisfied = AdmissibilityCase::sign_changing;
  else
    report.satisfied = AdmissibilityCase::fails;
  report.horizon = j.at("horizon").get<double>();
  report.tau0 = j.at("tau0").get<double>();
  report.kappa1 = j.at("kappa1").get<double>();
  report.kappa2 = j.at("kappa2").get<double>();
  report.tau1 = j.at("tau1").get<double>();
  report.sign_change_bound = j.at("sign_change_bound").get<double>();
  report.sign_change_max_abs = j.at("sign_change_max_abs").get<double>();
  report.c_tilde = j.at("c_tilde").get<double>();
  report.psi_at_0 = j.at("psi_at_0").get<double>();
  report.psi_at_horizon = j.at("psi_at_horizon").get<double>();
  report.sup_norm = j.at("sup_norm").get<double>();
  report.integral_abs_tau1_tau0 = j.at("integral_abs_tau1_tau0").get<double>();
  report.lambda1_hint = j.at("lambda1_hint").get<double>();
  report.lower_bound_hint = j.at("lower_bound_hint").get<double>();
  report.failure_reason = j.at("failure_reason").get<std::string>();
  for (const auto& iv : j.at("sign_change_set")) {
    report.sign_change_set.push_back(
        {iv.at("from").get<double>(), iv.at("to").get<double>()});
  }
  return report;
}

}  // namespace biqrm
