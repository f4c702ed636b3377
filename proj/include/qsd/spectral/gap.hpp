#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qsd/model/fields.hpp"
#include "qsd/model/grid_operator.hpp"
#include "qsd/spectral/eigentriple.hpp"
#include "qsd/spectral/fit.hpp"

namespace qsd::spectral {

/// rho_f(t) = ||e^{-Lambda t} P_t f - mu(f) phi||_W / ||f||_W on a time grid.
struct ResidualCurve {
  std::vector<double> times;
  std::vector<double> rho;
  std::size_t valid_count = 0;  // leading samples above the numerical floor
};

/// Measured constants of  rho_f(t) <= C e^{-delta t}.
struct GapEstimate {
  double delta = 0.0;
  double C = 1.0;
  double fit_start = 0.0;  // fit window in time units
  double fit_end = 0.0;
  std::vector<ResidualCurve> curves;  // one per probe
  std::vector<double> probe_delta;    // fitted rate per probe (NaN when no fit)
};

struct GapOptions {
  std::size_t log_points = 40;
  std::size_t linear_points = 80;
  double floor = 1e-9;          // samples below this are numerical noise
  double residual_tol = 0.05;   // max deviation of log rho from the fitted line
  double min_decades = 2.0;     // decay the fit window must span
};

/// Time grid used by gap_estimate: a log grid on [1e-3 horizon, horizon]
/// merged with a uniform grid, plus t = 0.
std::vector<double> gap_time_grid(double horizon, const GapOptions& options = {});

ResidualCurve gap_residuals(const model::GridOperator& op, const model::PotentialField& potential,
                            const model::WeightFunction& weight, const EigenTriple& triple,
                            const Eigen::VectorXd& probe, const std::vector<double>& times);

/// Fits log rho_f against t on the linear regime of every probe; delta is the
/// smallest fitted rate and C the smallest constant >= 1 with
/// rho_f(t) <= C e^{-delta t} on every sample above the numerical floor. Probes that start
/// at the numerical floor (e.g. f = phi) carry no rate. Throws NoLinearRegime
/// if no probe has a window spanning `min_decades`.
GapEstimate gap_estimate(const model::GridOperator& op, const model::PotentialField& potential,
                         const model::WeightFunction& weight, const EigenTriple& triple,
                         const std::vector<Eigen::VectorXd>& probes, double horizon, const GapOptions& options = {});

struct SurvivalFit {
  double slope = 0.0;      // decay rate of log (P_t^D 1)(x0); equals Lambda_D(0)
  double intercept = 0.0;
  double fit_start = 0.0;
  double fit_end = 0.0;
  std::vector<double> times;
  std::vector<double> log_survival;
};

/// Fitted slope of t -> log (P_t^D 1)(x0) over its linear regime on [0, horizon].
SurvivalFit survival_decay(const model::GridOperator& op, std::size_t x0, double horizon,
                           std::size_t samples = 200, double residual_tol = 1e-6);

}  // namespace qsd::spectral
