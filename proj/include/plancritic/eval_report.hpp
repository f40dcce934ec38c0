#pragma once

// Scoring of persisted run records against ground truth, plus the text,
// CSV and JSON renderings of the result.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "plancritic/orchestrator.hpp"

namespace plancritic::eval {

class MissingProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyRecords : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Positive = the critic said correct; truth = the validator said correct.
struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  std::optional<double> precision() const;
  std::optional<double> recall() const;
  std::optional<double> accuracy() const;
  std::optional<double> false_positive_rate() const;
  std::optional<double> false_negative_rate() const;
};

struct StepMetrics {
  std::size_t step = 0;
  /// Problems whose plan as of this step validates.
  std::size_t n_correct = 0;
  double accuracy = 0;
  /// Critiques issued at this step.
  Confusion confusion;
};

struct Metrics {
  std::size_t n = 0;
  std::size_t n_correct = 0;
  double accuracy = 0;
  double ci = 0;
  std::size_t k = 0;
  /// k+1 entries.
  std::vector<StepMetrics> steps;
  Confusion overall;
  double mean_llm_calls = 0;
  double mean_rounds = 0;
  std::size_t unparseable_final = 0;
  std::map<std::string, std::size_t> stop_reasons;
};

/// 1.96 * sqrt(p(1-p)/n).
double wald_ci(double p, std::size_t n);

/// "85.5±2.8": percentages with one decimal.
std::string format_summary(double accuracy, double ci);

/// Re-validates every plan text in the records; pure in (records, instances).
/// The step series runs to the largest k found in the records.
Metrics score(const std::vector<orchestrator::RunRecord>& records,
              const std::vector<orchestrator::Instance>& instances);

enum class ReportFormat { TableText, Csv, Structured };
std::string to_string(ReportFormat format);
ReportFormat parse_report_format(const std::string& name);

nlohmann::json to_json(const Metrics& metrics);
Metrics metrics_from_json(const nlohmann::json& json);

std::string render_report(const Metrics& metrics, ReportFormat format);

/// Writes render_report output to path. Throws IoError.
void emit_report(const Metrics& metrics, ReportFormat format, const std::string& path);

}  // namespace plancritic::eval
