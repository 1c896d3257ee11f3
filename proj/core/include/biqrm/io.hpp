#pragma once

#include <string>
#include <vector>

#include "biqrm/harness.hpp"
#include "biqrm/operators.hpp"

namespace biqrm {

// Shortest round-trip decimal form ("%.17g" trimmed); identical inputs
// format to identical bytes.
std::string format_double(double x);

// RFC 4180 quoting: fields containing comma, quote, CR or LF are quoted and
// inner quotes doubled.
std::string csv_escape(const std::string& field);
std::string csv_line(const std::vector<std::string>& fields);

void write_text_file(const std::string& path, const std::string& content);

// rate CSV: delta,alpha,error,bound,slope_partial
std::string rate_report_csv(const RateReport& report);
// two-column log10(delta) log10(error) for log-log figures
std::string rate_report_plot(const RateReport& report);
std::string rate_report_json(const RateReport& report);
RateReport parse_rate_report_json(const std::string& text);

std::string illposedness_csv(const std::vector<IllPosednessRow>& rows);

// One inversion run: the reconstruction diagnostics plus the realized
// error split used by the CLI verdicts.
struct InversionSummary {
  std::string label;
  ChoiceRule rule = ChoiceRule::manual;
  double order = 2.0;
  double alpha = 0.0;
  double delta = 0.0;
  double error = 0.0;       // ||f - f_alpha^delta||
  double bias = 0.0;        // ||f - f_alpha||
  double bias_cap = 0.0;
  double noise_part = 0.0;  // ||f_alpha - f_alpha^delta||
  double noise_cap = 0.0;
  double discrepancy_value = 0.0;
  double stability_constant = 0.0;
  double residual_norm = 0.0;
};

std::string inversion_summary_json(const InversionSummary& summary);
InversionSummary parse_inversion_summary_json(const std::string& text);

std::string morozov_result_json(const MorozovResult& result);
MorozovResult parse_morozov_result_json(const std::string& text);
std::string optimality_report_json(const OptimalityReport& report);
OptimalityReport parse_optimality_report_json(const std::string& text);
std::string admissibility_report_json(const AdmissibilityReport& report);
AdmissibilityReport parse_admissibility_report_json(const std::string& text);

}  // namespace biqrm
