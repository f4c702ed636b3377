#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "qsd/model/domain.hpp"
#include "qsd/model/generator.hpp"
#include "qsd/model/grid.hpp"

namespace qsd::test {

constexpr double kPi = std::numbers::pi;

/// Brownian motion killed outside (0, pi).
struct IntervalBrownian {
  model::DomainSpec domain;
  model::GridSpec grid;
  model::GridOperator op;

  explicit IntervalBrownian(int cells = 400)
      : domain(model::open_box_domain({{0.0, kPi}})),
        grid(domain, {cells}),
        op(model::build_generator(model::OverdampedLangevin{}, grid, domain)) {}

  double h() const { return grid.spacing()[0]; }
  double x(std::size_t i) const { return grid.interior_coordinates(i)[0]; }

  /// Samples f on the interior nodes.
  template <class F>
  Eigen::VectorXd sample(F&& f) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.interior_count()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f(x(static_cast<std::size_t>(i)));
    return v;
  }
};

/// L1 distance between a node vector normalized to unit mass and a density
/// integrated with the node (trapezoid) weight h.
template <class F>
double l1_to_density(const Eigen::VectorXd& masses, double h, const std::vector<double>& nodes, F&& density) {
  const double total = masses.sum();
  double err = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    err += std::abs(masses[static_cast<Eigen::Index>(i)] / total - density(nodes[i]) * h);
  }
  return err;
}

/// C^3 bump supported on (c - r, c + r).
inline double bump(double x, double c, double r) {
  const double u = (x - c) / r;
  return std::abs(u) < 1.0 ? std::pow(1.0 - u * u, 4) : 0.0;
}

inline double bump_d1(double x, double c, double r) {
  const double u = (x - c) / r;
  return std::abs(u) < 1.0 ? -8.0 * u * std::pow(1.0 - u * u, 3) / r : 0.0;
}

inline double bump_d2(double x, double c, double r) {
  const double u = (x - c) / r;
  if (std::abs(u) >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  return (-8.0 * q * q * q + 48.0 * u * u * q * q) / (r * r);
}

}  // namespace qsd::test
