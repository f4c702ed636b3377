#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "qsd/model/domain.hpp"
#include "qsd/model/process.hpp"
#include "qsd/simulate/rng.hpp"

namespace qsd::simulate {

/// Finitely supported initial law. A single atom is sampled without
/// consuming randomness.
class InitialLaw {
 public:
  static InitialLaw dirac(std::vector<double> x);
  InitialLaw(std::vector<std::vector<double>> atoms, std::vector<double> weights);

  int dim() const { return static_cast<int>(atoms_.front().size()); }
  const std::vector<std::vector<double>>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  void sample(Rng& rng, std::span<double> out) const;

 private:
  std::vector<std::vector<double>> atoms_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Number of Euler steps covering [0, T]; the step actually used is T / n.
std::size_t step_count(double T, double dt);

/// Recorded states x_0, ..., x_k (row-major, `state_dim` per row).
struct PathSample {
  std::vector<double> states;
  int state_dim = 1;
  double dt = 0.0;
  double exit_time = std::numeric_limits<double>::infinity();
  bool exited = false;

  std::size_t size() const { return states.size() / static_cast<std::size_t>(state_dim); }
  std::span<const double> state(std::size_t k) const {
    return {states.data() + k * static_cast<std::size_t>(state_dim), static_cast<std::size_t>(state_dim)};
  }
};

/// Steps from x0 until the first state outside D or time T. Exit is tested
/// only at step times. A final state that left the simulation box is
/// projected onto the box, which keeps it outside D. Throws InvalidSpec if
/// x0 is not in D.
PathSample sample_killed_path(const model::ProcessSpec& process, const model::DomainSpec& domain,
                              std::span<const double> x0, double dt, double T, Rng& rng);

}  // namespace qsd::simulate
