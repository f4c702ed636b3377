#include "qsd/simulate/steppers.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qsd/errors.hpp"

namespace qsd::simulate {
namespace {

constexpr int kMaxDim = 8;

bool is_free(const model::ScalarField& f) { return !f.is_custom() && f.terms().empty(); }

}  // namespace

std::uint64_t RngPolicy::mix(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t RngPolicy::stream_seed(std::uint64_t stream) const { return mix(master_seed ^ mix(stream)); }

void step_overdamped(const model::OverdampedLangevin& p, std::span<double> x, double dt, Rng& rng) {
  const double sq = std::sqrt(dt);
  if (!p.drift && is_free(p.potential)) {
    for (double& xi : x) xi += sq * rng.gaussian();
    return;
  }
  std::array<double, kMaxDim> c{};
  p.drift_at(x, std::span<double>(c.data(), x.size()));
  for (std::size_t a = 0; a < x.size(); ++a) x[a] += c[a] * dt + sq * rng.gaussian();
}

void step_kinetic(const model::KineticLangevin& p, std::span<double> x, std::span<double> v, double dt, Rng& rng) {
  if (dt == 0.0) return;
  const double sq = std::sqrt(dt);
  std::array<double, kMaxDim> g{};
  p.potential.gradient(x, std::span<double>(g.data(), x.size()));
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double va = v[a];
    x[a] += va * dt;
    v[a] += (-g[a] - p.gamma * va) * dt + sq * rng.gaussian();
  }
}

double stable_symbol_constant(double alpha, int dim) {
  const double d = static_cast<double>(dim);
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) /
         (std::pow(std::numbers::pi, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

double positive_stable(double rho, Rng& rng) {
  double u;
  do {
    u = std::numbers::pi * rng.uniform();
  } while (u == 0.0);
  double e;
  do {
    e = rng.exponential();
  } while (e == 0.0);
  return std::sin(rho * u) / std::pow(std::sin(u), 1.0 / rho) *
         std::pow(std::sin((1.0 - rho) * u) / e, (1.0 - rho) / rho);
}

void stable_increment(double alpha, double c_alpha, double dt, std::span<double> out, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw AlphaOutOfRange("alpha must lie in (0, 2)");
  const int d = static_cast<int>(out.size());
  const double kappa = dt * c_alpha / stable_symbol_constant(alpha, d);
  const double s = 2.0 * std::pow(kappa, 2.0 / alpha) * positive_stable(0.5 * alpha, rng);
  const double scale = std::sqrt(s);
  for (double& o : out) o = scale * rng.gaussian();
}

std::vector<double> stable_increment(double alpha, double dt, int dim, Rng& rng, double c_alpha) {
  std::vector<double> out(static_cast<std::size_t>(dim));
  stable_increment(alpha, c_alpha, dt, out, rng);
  return out;
}

void step_stable(const model::StableSDE& p, std::span<double> x, double dt, Rng& rng) {
  std::array<double, kMaxDim> g{};
  std::array<double, kMaxDim> jump{};
  const auto n = x.size();
  if (!is_free(p.potential)) p.potential.gradient(x, std::span<double>(g.data(), n));
  stable_increment(p.alpha, p.c_alpha, dt, std::span<double>(jump.data(), n), rng);
  for (std::size_t a = 0; a < n; ++a) x[a] += -g[a] * dt + jump[a];
}

void step_process(const model::ProcessSpec& p, std::span<double> state, double dt, Rng& rng) {
  switch (p.index()) {
    case 0:
      step_overdamped(std::get<model::OverdampedLangevin>(p), state, dt, rng);
      break;
    case 1: {
      const auto half = state.size() / 2;
      step_kinetic(std::get<model::KineticLangevin>(p), state.first(half), state.subspan(half), dt, rng);
      break;
    }
    default:
      step_stable(std::get<model::StableSDE>(p), state, dt, rng);
  }
}

int state_dim(const model::ProcessSpec& p, int position_dim) {
  return std::holds_alternative<model::KineticLangevin>(p) ? 2 * position_dim : position_dim;
}

}  // namespace qsd::simulate
