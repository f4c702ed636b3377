#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qsd/cli/config.hpp"

namespace qsd::cli {

/// A measured number and the uncertainty it carries: a 95% half-width for
/// Monte Carlo estimates, a bracket or residual bound for deterministic ones.
struct Metric {
  double value = 0.0;
  double tolerance = 0.0;
  bool operator==(const Metric&) const = default;
};

using MetricMap = std::map<std::string, Metric>;

struct CheckResult {
  CheckConfig check;
  double measured = 0.0;
  double expected = 0.0;  // after resolving `reference`
  double allowed = 0.0;   // the bound the check compared against
  bool pass = false;
  std::string note;       // set when a metric is missing
};

struct ExperimentReport {
  int schema = 1;
  std::string experiment;
  std::string inputs_hash;  // FNV-1a 64 of the canonical config
  std::uint64_t seed = 0;
  MetricMap metrics;
  std::vector<CheckResult> checks;
  bool pass = true;
  // Not part of summary.json: they vary between otherwise identical runs.
  int threads = 1;
  double wall_seconds = 0.0;
};

/// Checks against the metric map:
///   abs        |m - e| <= tol
///   rel        |m - e| <= tol |e|
///   max        m <= e + tol
///   min        m >= e - tol
///   within_ci  |m - e| <= tol + tolerance(m) + tolerance(reference)
/// `e` is the value of `reference` when one is named, else `expected`.
/// A missing metric fails its check.
std::vector<CheckResult> evaluate_checks(const std::vector<CheckConfig>& checks, const MetricMap& metrics);

/// Hash of the canonical config with the fields that cannot change results
/// (thread count and output directory) removed.
std::string inputs_hash(const RunConfig& config);

Json summary_json(const ExperimentReport& report);
ExperimentReport parse_summary(const Json& j);
ExperimentReport load_summary(const std::string& path);

struct DiffRow {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;     // b - a
  double combined = 0.0;  // tolerance(a) + tolerance(b)
  bool flagged = false;   // |delta| > combined, or present on one side only
  std::string note;
};

/// Metrics whose values differ (or exist on one side only). Throws
/// MismatchedExperiments for different experiment types.
std::vector<DiffRow> compare(const ExperimentReport& a, const ExperimentReport& b);

std::string format_diff(const std::vector<DiffRow>& rows);

}  // namespace qsd::cli
