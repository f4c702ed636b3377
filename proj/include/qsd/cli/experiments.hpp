#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "qsd/cli/config.hpp"
#include "qsd/cli/report.hpp"
#include "qsd/model/grid.hpp"
#include "qsd/simulate/empirical.hpp"

namespace qsd::cli {

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> threads;
};

/// Applies the overrides and re-validates the result.
RunConfig apply_overrides(const RunConfig& config, const Overrides& overrides);

/// Runs the named experiment and writes its artifacts to config.output_dir:
///
///   spectral  eigentriple.csv, gap.csv, operator.txt
///   simulate  ensemble.csv, survival.csv, fk.csv, fv.csv
///   ldp       qed.csv, rate.csv
///   validate  everything the config enables
///
/// plus summary.json (byte-stable for a fixed config and seed) and
/// timing.txt (thread count and wall-clock, which are not).
ExperimentReport run(const RunConfig& config);

/// Transfers masses given on interior lattice nodes to histogram cells by
/// splitting each node's dual cell [x - h/2, x + h/2] over the bins it
/// overlaps. Axes beyond binning.dim() are summed out. Normalized to sum 1.
simulate::EmpiricalMeasure bin_node_measure(const model::GridSpec& grid, const Eigen::VectorXd& interior_mass,
                                            const simulate::Histogram& binning);

}  // namespace qsd::cli
