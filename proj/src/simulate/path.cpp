#include "qsd/simulate/path.hpp"

#include <algorithm>
#include <cmath>

#include "qsd/errors.hpp"
#include "qsd/simulate/steppers.hpp"

namespace qsd::simulate {

InitialLaw InitialLaw::dirac(std::vector<double> x) { return InitialLaw({std::move(x)}, {1.0}); }

InitialLaw::InitialLaw(std::vector<std::vector<double>> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size()) throw InvalidSpec("initial law needs one weight per atom");
  double total = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (atoms_[k].size() != atoms_.front().size()) throw InvalidSpec("initial law atoms differ in dimension");
    if (!(weights_[k] >= 0.0)) throw InvalidSpec("initial law weights must be nonnegative");
    total += weights_[k];
    cumulative_.push_back(total);
  }
  if (!(total > 0.0)) throw InvalidSpec("initial law has no mass");
  for (double& w : weights_) w /= total;
  for (double& c : cumulative_) c /= total;
}

void InitialLaw::sample(Rng& rng, std::span<double> out) const {
  std::size_t k = 0;
  if (atoms_.size() > 1) {
    const double u = rng.uniform();
    k = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
    k = std::min(k, atoms_.size() - 1);
  }
  std::copy(atoms_[k].begin(), atoms_[k].end(), out.begin());
}

std::size_t step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw InvalidSpec("time step and horizon must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / dt)));
}

PathSample sample_killed_path(const model::ProcessSpec& process, const model::DomainSpec& domain,
                              std::span<const double> x0, double dt, double T, Rng& rng) {
  if (!domain.contains(x0)) throw InvalidSpec("path must start inside D");
  const std::size_t n = step_count(T, dt);
  PathSample p;
  p.state_dim = static_cast<int>(x0.size());
  p.dt = T / static_cast<double>(n);
  std::vector<double> x(x0.begin(), x0.end());
  p.states.assign(x.begin(), x.end());
  for (std::size_t k = 1; k <= n; ++k) {
    step_process(process, x, p.dt, rng);
    if (!domain.contains(x)) {
      const auto& b = domain.bounds();
      for (std::size_t a = 0; a < x.size(); ++a) x[a] = std::clamp(x[a], b[a].lo, b[a].hi);
      p.states.insert(p.states.end(), x.begin(), x.end());
      p.exited = true;
      p.exit_time = static_cast<double>(k) * p.dt;
      return p;
    }
    p.states.insert(p.states.end(), x.begin(), x.end());
  }
  return p;
}

}  // namespace qsd::simulate
