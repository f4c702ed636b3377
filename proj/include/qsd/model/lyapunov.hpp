#pragma once

#include <span>
#include <vector>

#include "qsd/model/fields.hpp"
#include "qsd/model/grid.hpp"
#include "qsd/model/grid_operator.hpp"

namespace qsd::model {

struct LyapunovReport {
  std::vector<double> radii;  // K_n = {|x| <= radii[n]}
  std::vector<double> r;      // min_{x outside K_n} (-L W^p)/W^p
  std::vector<double> b;      // max_{x in K_n} (r_n W^p + L W^p)_+
  bool diverges = false;      // r_n nondecreasing and r_last >= growth_factor * r_0 > 0
  /// Slope of log(-L W^p) against log|x| over the analysis annulus.
  double drift_exponent = 0.0;
  /// Slope of log r_n against log radii[n].
  double ratio_exponent = 0.0;
  /// max_x (L W^p)(x) / W^p(x): the growth constant c1 with L W^p <= c1 W^p.
  double growth_constant = 0.0;
};

/// Checks  -L W^p >= r_n W^p - b_n 1_{K_n}  on the lattice for the nested
/// balls K_n of the given (increasing) radii. Only nodes with
/// |x| <= radii.back() are inspected, which keeps the truncation boundary of
/// the box out of the annuli. Report only; never throws on failure.
LyapunovReport lyapunov_check(const GridOperator& op, const GridSpec& grid, const WeightFunction& weight, double p,
                              std::span<const double> radii, double growth_factor = 10.0);

}  // namespace qsd::model
