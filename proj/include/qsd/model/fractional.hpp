#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qsd/model/grid.hpp"

namespace qsd::model {

/// Lattice quadrature of the compensated jump integral
///
///   int [psi(x+z) - psi(x) - grad psi(x).z 1{|z|<=1}] c_alpha |z|^{-d-alpha} dz
///
/// as  sum_k w_k (psi(x + z_k) - psi(x))  +  D sum_a D2_a psi(x)
///       + tail_rate (psi_far - psi(x)).
///
/// The weights are translation invariant and symmetric in k -> -k, so the
/// gradient compensator integrates to zero. In 1D the weights come from the
/// piecewise-linear interpolant of psi on |z| >= h and D is fixed so that the
/// stencil reproduces quadratics exactly; in 2D the weights integrate the
/// kernel over each lattice cell and D collects the second moment of the
/// central cell.
struct JumpStencil {
  int dim = 1;
  double alpha = 1.0;
  double c_alpha = 1.0;
  double spacing = 1.0;
  std::vector<std::vector<long>> offsets;
  std::vector<double> weights;
  double local_diffusion = 0.0;  // D, multiplies the centered second difference
  double tail_rate = 0.0;        // kernel mass beyond the stencil reach
  double reach = 0.0;            // radius covered by the offsets

  /// Total rate of jumps that the stencil resolves plus the tail.
  double total_jump_rate() const;

  /// Applies the stencil to a function on R^d at the point x; jumps beyond
  /// the reach land where psi takes the value `tail_value`.
  double apply(const std::function<double(std::span<const double>)>& psi, std::span<const double> x,
               double tail_value) const;
};

/// Throws AlphaOutOfRange unless 0 < alpha < 2, and InvalidSpec for a
/// truncation radius below two lattice spacings, d > 2, or anisotropic
/// spacing in 2D.
JumpStencil fractional_quadrature(double alpha, double c_alpha, const GridSpec& grid, double truncation_radius);

}  // namespace qsd::model
