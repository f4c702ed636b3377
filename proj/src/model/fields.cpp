#include "qsd/model/fields.hpp"

#include <algorithm>
#include <cmath>

#include "qsd/errors.hpp"

namespace qsd::model {
namespace {

double poly_value(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

double poly_derivative(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (std::size_t p = c.size(); p-- > 1;) v = v * x + static_cast<double>(p) * c[p];
  return v;
}

double indicator_factor(const Interval& s, double x) {
  const double tol = 1e-12 * std::max({1.0, std::abs(s.lo), std::abs(s.hi)});
  if (std::abs(x - s.lo) <= tol || std::abs(x - s.hi) <= tol) return 0.5;
  return (x > s.lo && x < s.hi) ? 1.0 : 0.0;
}

double int_power(double b, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= b;
  return r;
}

struct ValueVisitor {
  std::span<const double> x;
  double operator()(const ConstantTerm& t) const { return t.value; }
  double operator()(const PolynomialTerm& t) const {
    if (t.axis >= 0) return poly_value(t.coeffs, x[t.axis]);
    double s = 0.0;
    for (double xa : x) s += poly_value(t.coeffs, xa);
    return s;
  }
  double operator()(const SineTerm& t) const {
    return t.amplitude * int_power(std::sin(t.frequency * x[t.axis] + t.phase), t.power);
  }
  double operator()(const IndicatorTerm& t) const {
    double f = 1.0;
    for (std::size_t a = 0; a < t.sides.size(); ++a) f *= indicator_factor(t.sides[a], x[a]);
    return t.value * f;
  }
};

struct GradientVisitor {
  std::span<const double> x;
  std::span<double> g;
  void operator()(const ConstantTerm&) const {}
  void operator()(const PolynomialTerm& t) const {
    if (t.axis >= 0) {
      g[t.axis] += poly_derivative(t.coeffs, x[t.axis]);
      return;
    }
    for (std::size_t a = 0; a < x.size(); ++a) g[a] += poly_derivative(t.coeffs, x[a]);
  }
  void operator()(const SineTerm& t) const {
    const double arg = t.frequency * x[t.axis] + t.phase;
    const double s = std::sin(arg);
    g[t.axis] += t.amplitude * t.power * int_power(s, t.power - 1) * std::cos(arg) * t.frequency;
  }
  void operator()(const IndicatorTerm&) const {}
};

}  // namespace

ScalarField ScalarField::custom(Fn value, GradFn gradient) {
  ScalarField f;
  f.custom_value_ = std::move(value);
  f.custom_gradient_ = std::move(gradient);
  return f;
}

double ScalarField::value(std::span<const double> x) const {
  if (custom_value_) return custom_value_(x);
  double v = 0.0;
  for (const auto& term : terms_) v += std::visit(ValueVisitor{x}, term);
  return v;
}

void ScalarField::gradient(std::span<const double> x, std::span<double> g) const {
  std::fill(g.begin(), g.end(), 0.0);
  if (custom_value_) {
    if (!custom_gradient_) throw InvalidSpec("custom field has no gradient");
    custom_gradient_(x, g);
    return;
  }
  for (const auto& term : terms_) std::visit(GradientVisitor{x, g}, term);
}

PotentialField::PotentialField(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidSpec("potential values must be finite");
    sup_norm_ = std::max(sup_norm_, std::abs(v));
  }
}

PotentialField PotentialField::sample(const ScalarField& field, const GridSpec& grid) {
  std::vector<double> v(grid.interior_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = field.value(grid.interior_coordinates(i));
  return PotentialField(std::move(v));
}

double PotentialField::max() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double PotentialField::min() const {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

PotentialField PotentialField::shifted(double c) const {
  auto v = values_;
  for (double& x : v) x += c;
  return PotentialField(std::move(v));
}

PotentialField PotentialField::axpy(double t, const PotentialField& other) const {
  if (other.size() != size()) throw InvalidSpec("potential size mismatch");
  auto v = values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += t * other.values_[i];
  return PotentialField(std::move(v));
}

WeightFunction::WeightFunction(std::vector<double> values, std::optional<StableLyapunovParams> params)
    : values_(std::move(values)), params_(params) {
  for (double w : values_) {
    if (!(w >= 1.0) || !std::isfinite(w)) throw InvalidSpec("weight function must be finite and >= 1");
  }
}

WeightFunction WeightFunction::unit(std::size_t n) { return WeightFunction(std::vector<double>(n, 1.0)); }

WeightFunction WeightFunction::exponential(const GridSpec& grid, double a) {
  std::vector<double> w(grid.interior_count());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto x = grid.interior_coordinates(i);
    double r2 = 0.0;
    for (double xa : x) r2 += xa * xa;
    w[i] = std::exp(std::abs(a) * std::sqrt(r2));
  }
  return WeightFunction(std::move(w));
}

double stable_lyapunov_base(std::span<const double> x, double k) {
  double r2 = 0.0;
  for (double xa : x) r2 += xa * xa;
  const double r = std::sqrt(r2);
  if (r >= 1.0) return 2.0 + std::pow(r, k);
  // a + b r^2 + c r^4 matching value, slope and curvature of r^k at r = 1.
  const double c = k * (k - 2.0) / 8.0;
  const double b = k * (4.0 - k) / 4.0;
  const double a = 1.0 - b - c;
  return 2.0 + a + b * r2 + c * r2 * r2;
}

WeightFunction WeightFunction::stable_lyapunov(const GridSpec& grid, const StableLyapunovParams& params,
                                               double alpha) {
  if (!(params.p > 1.0)) throw InvalidSpec("Lyapunov exponent p must exceed 1");
  if (!(params.beta > 0.0 && params.theta > 0.0)) throw InvalidSpec("beta and theta must be positive");
  if (!(2.0 * params.beta * params.theta < std::min(alpha, 1.0))) {
    throw InvalidSpec("stable Lyapunov weight needs 2*beta*theta < min(alpha, 1)");
  }
  const double k = params.beta * params.theta;
  std::vector<double> w(grid.interior_count());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::pow(stable_lyapunov_base(grid.interior_coordinates(i), k), 1.0 / params.p);
  }
  return WeightFunction(std::move(w), params);
}

std::vector<double> WeightFunction::power(double p) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(values_[i], p);
  return out;
}

}  // namespace qsd::model
