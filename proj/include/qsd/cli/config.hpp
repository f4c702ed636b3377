#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsd/model/domain.hpp"
#include "qsd/model/fields.hpp"
#include "qsd/model/generator.hpp"
#include "qsd/model/process.hpp"

namespace qsd::cli {

using Json = nlohmann::json;

struct ProcessConfig {
  std::string type = "overdamped";  // overdamped | kinetic | stable
  double gamma = 1.0;
  double alpha = 1.0;
  double c_alpha = 1.0;
  bool operator==(const ProcessConfig&) const = default;
};

struct DomainConfig {
  std::vector<model::Interval> box;
  std::string region = "box";  // box | ball
  std::vector<model::Interval> sides;  // region box; empty means the simulation box
  std::vector<double> center;
  double radius = 0.0;
  bool operator==(const DomainConfig&) const = default;
};

struct GridConfig {
  std::vector<int> cells;
  std::optional<double> truncation_radius;
  bool operator==(const GridConfig&) const = default;
};

struct WeightConfig {
  std::string type = "unit";  // unit | exponential | stable_lyapunov
  double a = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double p = 2.0;
  bool operator==(const WeightConfig&) const = default;
};

struct ModelConfig {
  ProcessConfig process;
  DomainConfig domain;
  GridConfig grid;
  std::vector<model::FieldTerm> potential;  // U
  WeightConfig weight;
  bool operator==(const ModelConfig&) const = default;
};

struct SolverConfig {
  double tol = 1e-10;
  int max_iterations = 2000;
  std::vector<model::FieldTerm> twist;  // V for the spectral experiment
  double gap_horizon = 0.0;             // 0 disables the gap estimate
  double survival_horizon = 0.0;        // 0 disables the survival fit
  std::vector<double> start;            // node used by the survival fit
  bool export_operator = false;
  bool operator==(const SolverConfig&) const = default;
};

struct TaggedPotential {
  std::string tag;
  std::vector<model::FieldTerm> terms;
  bool operator==(const TaggedPotential&) const = default;
};

struct SimulationConfig {
  double dt = 1e-3;
  double T = 1.0;
  std::size_t n_paths = 0;  // 0 disables the path experiments
  std::vector<double> x0;
  std::vector<int> bins;
  std::size_t records = 20;
  std::size_t min_survivors = 100;
  std::vector<TaggedPotential> potentials;
  double extrapolation_ratio = 0.0;  // > 1 reruns Feynman-Kac at ratio * dt
  std::size_t fv_particles = 0;      // 0 disables Fleming-Viot
  double fv_burn_in = 0.0;
  bool operator==(const SimulationConfig&) const = default;
};

struct BetaConfig {
  std::string tag;
  std::string kind = "qed";  // qed | uniform | mixture | dirac | density
  double weight = 1.0;       // mixture: weight * qed + (1 - weight) * uniform
  std::vector<double> point;
  std::vector<model::FieldTerm> terms;  // density: g
  bool square = false;                  // density uses g^2
  bool gibbs = false;                   // density is multiplied by exp(-2U)
  bool operator==(const BetaConfig&) const = default;
};

struct LdpConfig {
  double bound = 20.0;
  double tol = 1e-9;
  int max_iterations = 20000;
  bool reversible = false;
  std::size_t gateaux_pairs = 0;
  std::vector<BetaConfig> betas;
  bool operator==(const LdpConfig&) const = default;
};

struct CheckConfig {
  std::string name;
  std::string metric;
  std::string kind = "abs";  // abs | rel | max | min | within_ci
  double expected = 0.0;
  std::string reference;     // metric whose value replaces `expected`
  double tolerance = 0.0;
  bool operator==(const CheckConfig&) const = default;
};

struct RunConfig {
  int schema = 1;
  std::string experiment = "spectral";  // spectral | simulate | ldp | validate
  ModelConfig model;
  SolverConfig solver;
  SimulationConfig simulation;
  LdpConfig ldp;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::string output_dir = "out";
  std::vector<CheckConfig> checks;
  bool operator==(const RunConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError before any computation.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::string& path);
Json to_json(const RunConfig& c);

/// Model objects described by a config.
model::ProcessSpec make_process(const ModelConfig& m);
model::DomainSpec make_domain(const ModelConfig& m);
model::ScalarField make_field(const std::vector<model::FieldTerm>& terms);

}  // namespace qsd::cli
