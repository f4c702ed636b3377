#include "qsd/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qsd/cli/csv.hpp"
#include "qsd/errors.hpp"

namespace qsd::cli {
namespace {

// JSON has no infinities; they travel as strings.
Json number_json(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double json_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError("summary holds a non-numeric value");
}

}  // namespace

std::vector<CheckResult> evaluate_checks(const std::vector<CheckConfig>& checks, const MetricMap& metrics) {
  std::vector<CheckResult> out;
  for (const auto& c : checks) {
    CheckResult r;
    r.check = c;
    const auto m = metrics.find(c.metric);
    if (m == metrics.end()) {
      r.note = "metric not produced";
      out.push_back(r);
      continue;
    }
    r.measured = m->second.value;
    double ref_tol = 0.0;
    r.expected = c.expected;
    if (!c.reference.empty()) {
      const auto ref = metrics.find(c.reference);
      if (ref == metrics.end()) {
        r.note = "reference metric not produced";
        out.push_back(r);
        continue;
      }
      r.expected = ref->second.value;
      ref_tol = ref->second.tolerance;
    }
    const double diff = std::abs(r.measured - r.expected);
    if (c.kind == "abs") {
      r.allowed = c.tolerance;
      r.pass = diff <= r.allowed;
    } else if (c.kind == "rel") {
      r.allowed = c.tolerance * std::abs(r.expected);
      r.pass = diff <= r.allowed;
    } else if (c.kind == "max") {
      r.allowed = r.expected + c.tolerance;
      r.pass = r.measured <= r.allowed;
    } else if (c.kind == "min") {
      r.allowed = r.expected - c.tolerance;
      r.pass = r.measured >= r.allowed;
    } else {
      r.allowed = c.tolerance + m->second.tolerance + ref_tol;
      r.pass = diff <= r.allowed;
    }
    out.push_back(r);
  }
  return out;
}

std::string inputs_hash(const RunConfig& config) {
  Json j = to_json(config);
  j.erase("threads");
  j.erase("output_dir");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json summary_json(const ExperimentReport& report) {
  Json metrics = Json::object();
  for (const auto& [name, m] : report.metrics) {
    metrics[name] = {{"value", number_json(m.value)}, {"tolerance", number_json(m.tolerance)}};
  }
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json k = {{"name", c.check.name},         {"metric", c.check.metric},
              {"kind", c.check.kind},         {"measured", number_json(c.measured)},
              {"expected", number_json(c.expected)}, {"tolerance", number_json(c.check.tolerance)},
              {"allowed", number_json(c.allowed)},   {"pass", c.pass}};
    if (!c.check.reference.empty()) k["reference"] = c.check.reference;
    if (!c.note.empty()) k["note"] = c.note;
    checks.push_back(k);
  }
  return {{"schema", report.schema},
          {"experiment", report.experiment},
          {"inputs_hash", report.inputs_hash},
          {"seed", report.seed},
          {"metrics", metrics},
          {"checks", checks},
          {"pass", report.pass}};
}

ExperimentReport parse_summary(const Json& j) {
  ExperimentReport r;
  try {
    r.schema = j.at("schema").get<int>();
    r.experiment = j.at("experiment").get<std::string>();
    r.inputs_hash = j.at("inputs_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [name, m] : j.at("metrics").items()) {
      r.metrics[name] = Metric{json_number(m.at("value")), json_number(m.at("tolerance"))};
    }
    for (const auto& k : j.at("checks")) {
      CheckResult c;
      c.check.name = k.at("name").get<std::string>();
      c.check.metric = k.at("metric").get<std::string>();
      c.check.kind = k.at("kind").get<std::string>();
      c.check.tolerance = json_number(k.at("tolerance"));
      if (k.contains("reference")) c.check.reference = k.at("reference").get<std::string>();
      c.measured = json_number(k.at("measured"));
      c.expected = json_number(k.at("expected"));
      c.allowed = json_number(k.at("allowed"));
      c.pass = k.at("pass").get<bool>();
      if (k.contains("note")) c.note = k.at("note").get<std::string>();
      r.checks.push_back(c);
    }
    r.pass = j.at("pass").get<bool>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed summary: ") + e.what());
  }
  return r;
}

ExperimentReport load_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open report " + path);
  try {
    return parse_summary(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path + ": " + e.what());
  }
}

std::vector<DiffRow> compare(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.experiment != b.experiment) {
    throw MismatchedExperiments("cannot compare a " + a.experiment + " report with a " + b.experiment + " report");
  }
  std::vector<DiffRow> rows;
  auto ia = a.metrics.begin();
  auto ib = b.metrics.begin();
  while (ia != a.metrics.end() || ib != b.metrics.end()) {
    DiffRow row;
    if (ib == b.metrics.end() || (ia != a.metrics.end() && ia->first < ib->first)) {
      row.metric = ia->first;
      row.a = ia->second.value;
      row.flagged = true;
      row.note = "only in first";
      ++ia;
    } else if (ia == a.metrics.end() || ib->first < ia->first) {
      row.metric = ib->first;
      row.b = ib->second.value;
      row.flagged = true;
      row.note = "only in second";
      ++ib;
    } else {
      row.metric = ia->first;
      row.a = ia->second.value;
      row.b = ib->second.value;
      row.combined = ia->second.tolerance + ib->second.tolerance;
      const bool same = row.a == row.b || (std::isnan(row.a) && std::isnan(row.b));
      ++ia;
      ++ib;
      if (same) continue;
      row.delta = row.b - row.a;
      row.flagged = !(std::abs(row.delta) <= row.combined);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_diff(const std::vector<DiffRow>& rows) {
  if (rows.empty()) return "no differences\n";
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %14s %14s %12s %12s  %s\n", "metric", "a", "b", "delta", "combined_tol",
                "flag");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-40s %14.7g %14.7g %12.4g %12.4g  %s\n", r.metric.c_str(), r.a, r.b, r.delta,
                  r.combined, r.flagged ? (r.note.empty() ? "EXCEEDS" : r.note.c_str()) : "ok");
    os << line;
  }
  return os.str();
}

}  // namespace qsd::cli
