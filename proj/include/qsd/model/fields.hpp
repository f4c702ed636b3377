#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qsd/model/domain.hpp"
#include "qsd/model/grid.hpp"

namespace qsd::model {

// Closed-form scalar fields built from a few term types. They describe the
// potential U of a process, Feynman-Kac twists V and reference densities,
// and serialize to the JSON configuration.

struct ConstantTerm {
  double value = 0.0;
  bool operator==(const ConstantTerm&) const = default;
};

/// sum_p coeffs[p] * x_a^p, applied to one axis or (axis = -1) summed over
/// all axes.
struct PolynomialTerm {
  std::vector<double> coeffs;
  int axis = -1;
  bool operator==(const PolynomialTerm&) const = default;
};

/// amplitude * sin(frequency * x_axis + phase)^power
struct SineTerm {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  int axis = 0;
  int power = 1;
  bool operator==(const SineTerm&) const = default;
};

/// value on the box, value/2 on each face it touches (so that a half-domain
/// indicator integrates symmetric densities exactly on a node lattice).
struct IndicatorTerm {
  std::vector<Interval> sides;
  double value = 1.0;
  bool operator==(const IndicatorTerm&) const = default;
};

using FieldTerm = std::variant<ConstantTerm, PolynomialTerm, SineTerm, IndicatorTerm>;

class ScalarField {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

  ScalarField() = default;
  explicit ScalarField(std::vector<FieldTerm> terms) : terms_(std::move(terms)) {}

  /// Field given by arbitrary callables; not serializable.
  static ScalarField custom(Fn value, GradFn gradient = {});

  double value(std::span<const double> x) const;
  /// Writes grad(x) into g; IndicatorTerm contributes zero.
  void gradient(std::span<const double> x, std::span<double> g) const;

  const std::vector<FieldTerm>& terms() const { return terms_; }
  bool is_custom() const { return static_cast<bool>(custom_value_); }

 private:
  std::vector<FieldTerm> terms_;
  Fn custom_value_;
  GradFn custom_gradient_;
};

/// Bounded potential sampled on the interior nodes of a grid.
class PotentialField {
 public:
  PotentialField() = default;
  explicit PotentialField(std::vector<double> values);

  static PotentialField zeros(std::size_t n) { return PotentialField(std::vector<double>(n, 0.0)); }
  static PotentialField sample(const ScalarField& field, const GridSpec& grid);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double sup_norm() const { return sup_norm_; }
  double max() const;
  double min() const;

  PotentialField shifted(double c) const;
  /// this + t * other
  PotentialField axpy(double t, const PotentialField& other) const;

 private:
  std::vector<double> values_;
  double sup_norm_ = 0.0;
};

struct StableLyapunovParams {
  double beta = 2.0;
  double theta = 0.1;
  double p = 2.0;
};

/// Lyapunov weight W >= 1 on the interior nodes.
class WeightFunction {
 public:
  WeightFunction() = default;
  explicit WeightFunction(std::vector<double> values,
                          std::optional<StableLyapunovParams> params = std::nullopt);

  /// W = 1: the bounded-domain default.
  static WeightFunction unit(std::size_t n);
  /// W = exp(a |x|).
  static WeightFunction exponential(const GridSpec& grid, double a);
  /// W = Vs^{1/p} with Vs = 2 + |x|^{beta*theta} for |x| > 1, smooth inside.
  /// Requires 2*beta*theta < min(alpha, 1).
  static WeightFunction stable_lyapunov(const GridSpec& grid, const StableLyapunovParams& params,
                                        double alpha);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::optional<StableLyapunovParams>& params() const { return params_; }

  /// W^p on the interior nodes.
  std::vector<double> power(double p) const;

 private:
  std::vector<double> values_;
  std::optional<StableLyapunovParams> params_;
};

/// The smooth radial function 2 + g(|x|) with g(r) = r^k for r >= 1 and an
/// even quartic C^2 continuation for r < 1 (k = beta*theta).
double stable_lyapunov_base(std::span<const double> x, double k);

}  // namespace qsd::model
