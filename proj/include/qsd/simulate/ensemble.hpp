#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qsd/model/domain.hpp"
#include "qsd/model/fields.hpp"
#include "qsd/model/process.hpp"
#include "qsd/simulate/empirical.hpp"
#include "qsd/simulate/path.hpp"
#include "qsd/simulate/rng.hpp"

namespace qsd::simulate {

/// Shared Monte Carlo parameters. Path i always uses stream i of `rng`, and
/// paths are split into `threads` contiguous chunks, so results never depend
/// on the worker count.
struct McOptions {
  double dt = 1e-3;
  double T = 1.0;
  std::size_t n_paths = 1000;
  RngPolicy rng{};
  int threads = 1;
};

constexpr double kZ95 = 1.959963984540054;

struct EnsembleStats {
  std::size_t n_paths = 0;
  std::size_t n_survivors = 0;
  double survival_prob = 0.0;
  double survival_ci = 0.0;  // 95% half-width, normal approximation
  EmpiricalMeasure mean_occupation;    // E[L_T | T < sigma_D]
  EmpiricalMeasure terminal_marginal;  // P[X_T in . | T < sigma_D]
  bool too_few_survivors = false;      // fewer than `min_survivors`
};

/// Rejection estimator of the conditioned occupation measure and the
/// conditioned marginal. The histogram bins the leading binning.dim()
/// coordinates of the state (positions only for a kinetic process with a
/// position histogram). Occupation uses left-endpoint quadrature, i.e. the
/// states at steps 0..n-1.
EnsembleStats rejection_conditional_ensemble(const model::ProcessSpec& process, const model::DomainSpec& domain,
                                             const InitialLaw& nu, const McOptions& options,
                                             const Histogram& binning, std::size_t min_survivors = 100);

struct RateEstimate {
  double value = 0.0;
  double ci = 0.0;  // 95% half-width
};

struct SurvivalCurve {
  std::vector<double> times;            // record times, times[0] = 0
  std::vector<std::size_t> survivors;   // paths alive at each record time
  std::size_t n_paths = 0;

  double survival(std::size_t j) const;
  /// log survival and the 95% delta-method half-width of it.
  RateEstimate log_survival(std::size_t j) const;
  /// (log S(t_b) - log S(t_a)) / (t_b - t_a) with a delta-method CI that
  /// accounts for the nesting of the two events.
  RateEstimate slope(std::size_t a, std::size_t b) const;
};

/// Survival counts at `records` equally spaced times in (0, T].
SurvivalCurve survival_curve(const model::ProcessSpec& process, const model::DomainSpec& domain,
                             const InitialLaw& nu, const McOptions& options, std::size_t records);

struct FeynmanKacEstimate {
  std::size_t n_paths = 0;
  std::size_t n_survivors = 0;
  double T = 0.0;
  double log_mean = 0.0;  // log E[exp(int_0^T V) 1{T < sigma_D}]
  RateEstimate rate;      // log_mean / T
  RateEstimate slope;     // (log E_T - log E_{T/2}) / (T/2)
};

/// Estimates for several potentials from the same paths. The integral of V is
/// the left-endpoint sum along each path; the log-mean is a log-sum-exp of
/// per-path weights reduced in path order. Throws AllPathsKilled.
std::vector<FeynmanKacEstimate> feynman_kac_mc(const model::ProcessSpec& process, const model::DomainSpec& domain,
                                               const std::vector<model::ScalarField>& potentials,
                                               const InitialLaw& nu, const McOptions& options);

FeynmanKacEstimate feynman_kac_mc(const model::ProcessSpec& process, const model::DomainSpec& domain,
                                  const model::ScalarField& potential, const InitialLaw& nu,
                                  const McOptions& options);

/// Removes the leading sqrt(dt) bias of discrete exit detection from two
/// independent estimates at steps dt (fine) and ratio*dt (coarse).
RateEstimate extrapolate_sqrt_dt(const RateEstimate& fine, const RateEstimate& coarse, double ratio);

struct FlemingViotOptions {
  std::size_t n_particles = 1000;
  double dt = 1e-3;
  double T = 1.0;
  double burn_in = 0.0;          // start of the time-average window
  std::size_t snapshots = 10;    // equally spaced recordings of the empirical measure
  RngPolicy rng{};
};

struct FlemingViotResult {
  EmpiricalMeasure terminal;      // estimates P[X_T in . | T < sigma_D]
  EmpiricalMeasure occupation;    // time average over [burn_in, T]
  std::vector<double> snapshot_times;
  std::vector<EmpiricalMeasure> snapshots;
  std::uint64_t branch_count = 0;  // resamplings inside the averaging window
  double killing_rate = 0.0;       // branch_count / (n_particles * window); tends to -Lambda_D(0)
  bool mass_collapse = false;      // all particles in one cell at the end
  std::uint64_t blocked_steps = 0; // steps where every particle exited and the step was discarded
};

/// N-particle system: each particle exiting D jumps onto a survivor chosen
/// uniformly (exits processed in particle-index order). Particle k uses
/// stream k and the resampling uses stream n_particles.
FlemingViotResult fleming_viot(const model::ProcessSpec& process, const model::DomainSpec& domain,
                               const InitialLaw& nu, const FlemingViotOptions& options, const Histogram& binning);

}  // namespace qsd::simulate
