#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>

#include "qsd/model/fields.hpp"

namespace qsd::model {

/// dX = c(X) dt + dB with c = -grad U unless a general drift is supplied.
struct OverdampedLangevin {
  ScalarField potential;
  std::function<void(std::span<const double>, std::span<double>)> drift;  // optional override

  void drift_at(std::span<const double> x, std::span<double> c) const;
};

/// dx = v dt, dv = -grad U(x) dt - gamma v dt + dB. State is (x, v), so the
/// ambient dimension is twice the position dimension.
struct KineticLangevin {
  ScalarField potential;
  double gamma = 1.0;
};

/// dX = -grad U(X) dt + dL, L rotationally invariant alpha-stable with Levy
/// measure c_alpha |z|^{-d-alpha} dz.
struct StableSDE {
  ScalarField potential;
  double alpha = 1.0;
  double c_alpha = 1.0;
};

using ProcessSpec = std::variant<OverdampedLangevin, KineticLangevin, StableSDE>;

/// Throws InvalidSpec / AlphaOutOfRange on parameters outside their range.
void validate(const ProcessSpec& process);

std::string process_name(const ProcessSpec& process);

}  // namespace qsd::model
