#include "qsd/model/process.hpp"

#include <cmath>

#include "qsd/errors.hpp"

namespace qsd::model {

void OverdampedLangevin::drift_at(std::span<const double> x, std::span<double> c) const {
  if (drift) {
    drift(x, c);
    return;
  }
  potential.gradient(x, c);
  for (double& ci : c) ci = -ci;
}

void validate(const ProcessSpec& process) {
  if (const auto* k = std::get_if<KineticLangevin>(&process)) {
    if (!(k->gamma > 0.0) || !std::isfinite(k->gamma)) {
      throw InvalidSpec("kinetic Langevin friction gamma must be > 0");
    }
  }
  if (const auto* s = std::get_if<StableSDE>(&process)) {
    if (!(s->alpha > 0.0 && s->alpha < 2.0)) throw AlphaOutOfRange("alpha must lie in (0, 2)");
    if (!(s->c_alpha > 0.0) || !std::isfinite(s->c_alpha)) throw InvalidSpec("c_alpha must be > 0");
  }
}

std::string process_name(const ProcessSpec& process) {
  switch (process.index()) {
    case 0: return "overdamped_langevin";
    case 1: return "kinetic_langevin";
    default: return "stable_sde";
  }
}

}  // namespace qsd::model
