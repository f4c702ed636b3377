#include "qsd/model/fractional.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "qsd/errors.hpp"

namespace qsd::model {
namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

JumpStencil stencil_1d(double alpha, double c, double h, double radius) {
  JumpStencil s;
  s.dim = 1;
  s.alpha = alpha;
  s.c_alpha = c;
  s.spacing = h;
  const long K = std::max<long>(2, static_cast<long>(std::ceil(radius / h - 1e-9)));
  s.reach = static_cast<double>(K) * h;

  const auto kernel = [&](double z) { return c * std::pow(z, -1.0 - alpha); };
  // Hat weights on the positive half line; interval [k h, (k+1) h], k >= 1.
  std::vector<double> w(static_cast<std::size_t>(K) + 1, 0.0);
  for (long k = 1; k < K; ++k) {
    const double a = static_cast<double>(k) * h;
    const double b = a + h;
    w[k] += Gauss::integrate([&](double z) { return (b - z) / h * kernel(z); }, a, b);
    w[k + 1] += Gauss::integrate([&](double z) { return (z - a) / h * kernel(z); }, a, b);
  }
  double second_moment = 0.0;
  for (long k = 1; k <= K; ++k) {
    const double z = static_cast<double>(k) * h;
    for (long sign : {-1L, 1L}) {
      s.offsets.push_back({sign * k});
      s.weights.push_back(w[k]);
    }
    second_moment += 2.0 * w[k] * z * z;
  }
  const double exact_moment = 2.0 * c * std::pow(s.reach, 2.0 - alpha) / (2.0 - alpha);
  // Centered second difference of z^2 is 2, hence the factor 1/2.
  s.local_diffusion = std::max(0.0, 0.5 * (exact_moment - second_moment));
  s.tail_rate = 2.0 * c * std::pow(s.reach, -alpha) / alpha;
  return s;
}

JumpStencil stencil_2d(double alpha, double c, double h, double radius) {
  JumpStencil s;
  s.dim = 2;
  s.alpha = alpha;
  s.c_alpha = c;
  s.spacing = h;
  const long K = std::max<long>(2, static_cast<long>(std::ceil(radius / h - 1e-9)));
  s.reach = radius;
  const auto kernel = [&](double z1, double z2) { return c * std::pow(z1 * z1 + z2 * z2, -1.0 - 0.5 * alpha); };

  double moment_defect = 0.0;  // sum_k int_cell (z1^2 - zk1^2) F
  for (long i = -K; i <= K; ++i) {
    for (long j = -K; j <= K; ++j) {
      if (i == 0 && j == 0) continue;
      const double zi = static_cast<double>(i) * h;
      const double zj = static_cast<double>(j) * h;
      if (std::hypot(zi, zj) > radius) continue;
      const auto cell = [&](auto&& f) {
        return Gauss::integrate(
            [&](double y1) {
              return Gauss::integrate([&](double y2) { return f(y1, y2); }, zj - 0.5 * h, zj + 0.5 * h);
            },
            zi - 0.5 * h, zi + 0.5 * h);
      };
      const double wk = cell([&](double y1, double y2) { return kernel(y1, y2); });
      moment_defect += cell([&](double y1, double y2) { return (y1 * y1 - zi * zi) * kernel(y1, y2); });
      s.offsets.push_back({i, j});
      s.weights.push_back(wk);
    }
  }
  // Second moment of the central cell: int_{[-h/2,h/2]^2} z1^2 F = 1/2 int |z|^{-alpha}
  // = 4 int_0^{pi/4} (h / (2 cos t))^{2-alpha} / (2-alpha) dt.
  const double central =
      4.0 * c / (2.0 - alpha) *
      Gauss::integrate([&](double t) { return std::pow(0.5 * h / std::cos(t), 2.0 - alpha); }, 0.0,
                       std::numbers::pi / 4.0);
  s.local_diffusion = std::max(0.0, 0.5 * (central + moment_defect));
  s.tail_rate = 2.0 * std::numbers::pi * c * std::pow(radius, -alpha) / alpha;
  return s;
}

}  // namespace

double JumpStencil::total_jump_rate() const {
  double r = tail_rate;
  for (double w : weights) r += w;
  return r;
}

double JumpStencil::apply(const std::function<double(std::span<const double>)>& psi, std::span<const double> x,
                          double tail_value) const {
  const double p0 = psi(x);
  std::vector<double> y(x.begin(), x.end());
  double out = tail_rate * (tail_value - p0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    for (int a = 0; a < dim; ++a) y[a] = x[a] + static_cast<double>(offsets[k][a]) * spacing;
    out += weights[k] * (psi(y) - p0);
  }
  for (int a = 0; a < dim; ++a) {
    std::copy(x.begin(), x.end(), y.begin());
    y[a] = x[a] + spacing;
    const double up = psi(y);
    y[a] = x[a] - spacing;
    const double down = psi(y);
    out += local_diffusion * (up - 2.0 * p0 + down) / (spacing * spacing);
  }
  return out;
}

JumpStencil fractional_quadrature(double alpha, double c_alpha, const GridSpec& grid, double truncation_radius) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw AlphaOutOfRange("alpha must lie in (0, 2)");
  if (!(c_alpha > 0.0)) throw InvalidSpec("c_alpha must be positive");
  const int d = grid.dim();
  if (d > 2) throw InvalidSpec("jump stencils are available for d <= 2");
  const double h = grid.spacing()[0];
  if (d == 2 && std::abs(grid.spacing()[1] - h) > 1e-12 * h) {
    throw InvalidSpec("2D jump stencil needs equal spacing on both axes");
  }
  if (!(truncation_radius >= 2.0 * h)) throw InvalidSpec("truncation radius must cover two lattice spacings");
  return d == 1 ? stencil_1d(alpha, c_alpha, h, truncation_radius) : stencil_2d(alpha, c_alpha, h, truncation_radius);
}

}  // namespace qsd::model
