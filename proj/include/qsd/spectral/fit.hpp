#pragma once

#include <cstddef>
#include <span>

namespace qsd::spectral {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t first = 0;  // window [first, last] in sample indices
  std::size_t last = 0;
  double max_residual = 0.0;
};

/// Ordinary least squares over samples [first, last].
LineFit fit_line(std::span<const double> t, std::span<const double> y, std::size_t first, std::size_t last);

/// Largest trailing window [s, last] whose least-squares line deviates from
/// every sample by at most `residual_tol`, with at least `min_points`
/// samples and a total drop in y of at least `min_drop`. Returns false when
/// no window qualifies.
bool fit_linear_tail(std::span<const double> t, std::span<const double> y, std::size_t last, double residual_tol,
                     double min_drop, std::size_t min_points, LineFit& out);

}  // namespace qsd::spectral
