// Command-line front end: one subcommand per experiment plus `compare`.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "qsd/cli/experiments.hpp"
#include "qsd/cli/report.hpp"
#include "qsd/errors.hpp"

namespace {

void print_checks(const qsd::cli::ExperimentReport& r) {
  for (const auto& c : r.checks) {
    std::printf("%s  %-36s measured %.10g  expected %.10g  (%s, bound %.4g)%s%s\n", c.pass ? "PASS" : "FAIL",
                c.check.name.c_str(), c.measured, c.expected, c.check.kind.c_str(), c.allowed,
                c.note.empty() ? "" : "  ", c.note.c_str());
  }
  std::printf("%s: %zu metrics, %zu checks, %s (%.2f s, %d threads)\n", r.experiment.c_str(), r.metrics.size(),
              r.checks.size(), r.pass ? "all passed" : "FAILED", r.wall_seconds, r.threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-stationary and quasi-ergodic distributions of killed processes"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 0;
  std::vector<CLI::App*> runs;
  for (const char* name : {"spectral", "simulate", "ldp", "validate"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment of a config");
    sub->add_option("--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    runs.push_back(sub);
  }
  std::string report_a, report_b;
  auto* cmp = app.add_subcommand("compare", "tabulate metric deltas between two summary.json files");
  cmp->add_option("report_a", report_a)->required()->check(CLI::ExistingFile);
  cmp->add_option("report_b", report_b)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmp->parsed()) {
      const auto rows = qsd::cli::compare(qsd::cli::load_summary(report_a), qsd::cli::load_summary(report_b));
      std::cout << qsd::cli::format_diff(rows);
      for (const auto& r : rows) {
        if (r.flagged) return 1;
      }
      return 0;
    }
    for (auto* sub : runs) {
      if (!sub->parsed()) continue;
      qsd::cli::Overrides o;
      o.experiment = sub->get_name();
      if (sub->count("--seed")) o.seed = seed;
      if (sub->count("--out")) o.output_dir = out;
      if (sub->count("--threads")) o.threads = threads;
      const auto config = qsd::cli::apply_overrides(qsd::cli::load_config(config_path), o);
      const auto report = qsd::cli::run(config);
      print_checks(report);
      return report.pass ? 0 : 1;
    }
  } catch (const qsd::Error& e) {
    std::fprintf(stderr, "error [%s] %s\n", e.module().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error %s\n", e.what());
    return 2;
  }
  return 0;
}
