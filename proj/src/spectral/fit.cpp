#include "qsd/spectral/fit.hpp"

#include <algorithm>
#include <cmath>

namespace qsd::spectral {

LineFit fit_line(std::span<const double> t, std::span<const double> y, std::size_t first, std::size_t last) {
  LineFit f;
  f.first = first;
  f.last = last;
  const double n = static_cast<double>(last - first + 1);
  // Center the abscissa for conditioning.
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  f.slope = stt > 0.0 ? sty / stt : 0.0;
  f.intercept = ym - f.slope * tm;
  for (std::size_t i = first; i <= last; ++i) {
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - (f.intercept + f.slope * t[i])));
  }
  return f;
}

bool fit_linear_tail(std::span<const double> t, std::span<const double> y, std::size_t last, double residual_tol,
                     double min_drop, std::size_t min_points, LineFit& out) {
  if (last >= t.size() || last + 1 < min_points) return false;
  for (std::size_t s = 0; s + min_points <= last + 1; ++s) {
    const auto f = fit_line(t, y, s, last);
    if (f.max_residual > residual_tol) continue;
    const auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(s),
                                              y.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    if (*hi - *lo < min_drop) return false;
    out = f;
    return true;
  }
  return false;
}

}  // namespace qsd::spectral
