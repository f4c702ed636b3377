#include "qsd/model/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsd/errors.hpp"

namespace qsd::model {
namespace {

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

}  // namespace

LyapunovReport lyapunov_check(const GridOperator& op, const GridSpec& grid, const WeightFunction& weight, double p,
                              std::span<const double> radii, double growth_factor) {
  if (!(p > 1.0)) throw InvalidSpec("Lyapunov check needs p > 1");
  if (radii.size() < 2) throw InvalidSpec("Lyapunov check needs at least two radii");
  if (!std::is_sorted(radii.begin(), radii.end())) throw InvalidSpec("radii must be increasing");
  const std::size_t n = op.dim();
  if (weight.size() != n) throw InvalidSpec("weight size does not match operator");

  const auto wp_vec = weight.power(p);
  const Eigen::Map<const Eigen::VectorXd> wp(wp_vec.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd lwp = op.apply(wp);

  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = grid.interior_coordinates(i);
    double r2 = 0.0;
    for (double xa : x) r2 += xa * xa;
    norm[i] = std::sqrt(r2);
  }

  LyapunovReport rep;
  rep.growth_constant = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) rep.growth_constant = std::max(rep.growth_constant, lwp[i] / wp[i]);

  const double outer = radii.back();
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    double rk = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (norm[i] > radii[k] && norm[i] <= outer) rk = std::min(rk, -lwp[i] / wp[i]);
    }
    if (!std::isfinite(rk)) continue;
    double bk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (norm[i] <= radii[k]) bk = std::max(bk, rk * wp[i] + lwp[i]);
    }
    rep.radii.push_back(radii[k]);
    rep.r.push_back(rk);
    rep.b.push_back(bk);
  }

  bool monotone = rep.r.size() >= 2;
  for (std::size_t k = 1; k < rep.r.size(); ++k) monotone = monotone && rep.r[k] >= rep.r[k - 1];
  rep.diverges = monotone && rep.r.front() > 0.0 && rep.r.back() >= growth_factor * rep.r.front();

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n; ++i) {
    if (norm[i] >= radii.front() && norm[i] <= outer && -lwp[i] > 0.0) {
      lx.push_back(std::log(norm[i]));
      ly.push_back(std::log(-lwp[i]));
    }
  }
  rep.drift_exponent = slope(lx, ly);

  lx.clear();
  ly.clear();
  for (std::size_t k = 0; k < rep.r.size(); ++k) {
    if (rep.r[k] > 0.0 && rep.radii[k] > 0.0) {
      lx.push_back(std::log(rep.radii[k]));
      ly.push_back(std::log(rep.r[k]));
    }
  }
  rep.ratio_exponent = slope(lx, ly);
  return rep;
}

}  // namespace qsd::model
