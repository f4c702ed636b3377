#include "qsd/spectral/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsd/spectral/semigroup.hpp"

namespace qsd::spectral {

std::vector<double> gap_time_grid(double horizon, const GapOptions& options) {
  std::vector<double> t{0.0};
  const double lo = 1e-3 * horizon;
  for (std::size_t j = 0; j < options.log_points; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(options.log_points - 1);
    t.push_back(lo * std::pow(horizon / lo, frac));
  }
  for (std::size_t j = 1; j <= options.linear_points; ++j) {
    t.push_back(horizon * static_cast<double>(j) / static_cast<double>(options.linear_points));
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end(), [](double a, double b) { return std::abs(a - b) < 1e-12 * (1 + b); }),
          t.end());
  return t;
}

ResidualCurve gap_residuals(const model::GridOperator& op, const model::PotentialField& potential,
                            const model::WeightFunction& weight, const EigenTriple& triple,
                            const Eigen::VectorXd& probe, const std::vector<double>& times) {
  const FeynmanKacSemigroup sg(op, potential);
  const WeightedNorm norm(weight);
  const double fnorm = norm(probe);
  const Eigen::VectorXd target = triple.mu.dot(probe) * triple.phi;
  ResidualCurve c;
  Eigen::VectorXd g = probe;
  double t_prev = 0.0;
  for (double t : times) {
    g = sg.apply(g, t - t_prev);
    t_prev = t;
    c.times.push_back(t);
    c.rho.push_back(norm(std::exp(-triple.lambda * t) * g - target) / fnorm);
  }
  return c;
}

GapEstimate gap_estimate(const model::GridOperator& op, const model::PotentialField& potential,
                         const model::WeightFunction& weight, const EigenTriple& triple,
                         const std::vector<Eigen::VectorXd>& probes, double horizon, const GapOptions& options) {
  const auto times = gap_time_grid(horizon, options);
  GapEstimate est;
  est.delta = std::numeric_limits<double>::infinity();
  const double min_drop = options.min_decades * std::log(10.0);
  for (const auto& f : probes) {
    auto curve = gap_residuals(op, potential, weight, triple, f, times);
    std::size_t last = 0;
    while (last + 1 < curve.rho.size() && curve.rho[last + 1] >= options.floor) ++last;
    double rate = std::numeric_limits<double>::quiet_NaN();
    if (curve.rho.front() >= options.floor && last > 0) {
      std::vector<double> logr(curve.rho.size());
      for (std::size_t j = 0; j <= last; ++j) logr[j] = std::log(curve.rho[j]);
      LineFit fit;
      if (fit_linear_tail(curve.times, logr, last, options.residual_tol, min_drop, 4, fit) && fit.slope < 0.0) {
        rate = -fit.slope;
        if (rate < est.delta) {
          est.delta = rate;
          est.fit_start = curve.times[fit.first];
          est.fit_end = curve.times[fit.last];
        }
      }
    }
    est.probe_delta.push_back(rate);
    curve.valid_count = last + 1;
    est.curves.push_back(std::move(curve));
  }
  if (!std::isfinite(est.delta)) throw NoLinearRegime("no probe shows a decaying window of the required span");
  for (const auto& c : est.curves) {
    for (std::size_t j = 0; j < c.valid_count; ++j) {
      est.C = std::max(est.C, c.rho[j] * std::exp(est.delta * c.times[j]));
    }
  }
  return est;
}

SurvivalFit survival_decay(const model::GridOperator& op, std::size_t x0, double horizon, std::size_t samples,
                           double residual_tol) {
  if (x0 >= op.dim()) throw InvalidSpec("survival start node is not interior");
  if (!(horizon > 0.0) || samples < 4) throw InvalidSpec("survival fit needs a positive horizon and >= 4 samples");
  const FeynmanKacSemigroup sg(op, model::PotentialField::zeros(op.dim()));
  SurvivalFit out;
  Eigen::VectorXd g = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(op.dim()));
  const auto i0 = static_cast<Eigen::Index>(x0);
  double log_scale = 0.0;  // P_t 1 = e^{log_scale} g
  out.times.push_back(0.0);
  out.log_survival.push_back(0.0);
  const double dt = horizon / static_cast<double>(samples);
  for (std::size_t j = 1; j <= samples; ++j) {
    g = sg.apply(g, dt);
    const double scale = g.maxCoeff();
    if (!(g[i0] > 0.0)) throw NoLinearRegime("survival function vanished at the start node");
    out.times.push_back(dt * static_cast<double>(j));
    out.log_survival.push_back(log_scale + std::log(g[i0]));
    log_scale += std::log(scale);
    g /= scale;
  }
  LineFit fit;
  if (!fit_linear_tail(out.times, out.log_survival, samples, residual_tol, 0.0, 4, fit)) {
    throw NoLinearRegime("log survival has no linear regime on the horizon");
  }
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.fit_start = out.times[fit.first];
  out.fit_end = out.times[fit.last];
  return out;
}

}  // namespace qsd::spectral
