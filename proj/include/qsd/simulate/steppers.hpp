#pragma once

#include <span>
#include <vector>

#include "qsd/model/process.hpp"
#include "qsd/simulate/rng.hpp"

namespace qsd::simulate {

/// Euler-Maruyama step  x += c(x) dt + sqrt(dt) N(0, I).
void step_overdamped(const model::OverdampedLangevin& p, std::span<double> x, double dt, Rng& rng);

/// Euler step  x += v dt,  v += (-grad U(x) - gamma v) dt + sqrt(dt) N(0, I),
/// both drifts evaluated at the old state.
void step_kinetic(const model::KineticLangevin& p, std::span<double> x, std::span<double> v, double dt, Rng& rng);

/// Constant relating the Levy-measure density to the symbol:
/// c_alpha |z|^{-d-alpha} dz has exponent (c_alpha / k) |xi|^alpha with
/// k = alpha 2^{alpha-1} Gamma((d+alpha)/2) / (pi^{d/2} Gamma(1-alpha/2)).
double stable_symbol_constant(double alpha, int dim);

/// Positive (alpha/2)-stable variable with Laplace transform exp(-s^{alpha/2})
/// (Kanter's representation).
double positive_stable(double rho, Rng& rng);

/// Increment of the rotationally invariant alpha-stable process with Levy
/// measure c_alpha |z|^{-d-alpha} dz over time dt, as sqrt(S) N(0, I) with
/// S = 2 (dt c_alpha / k)^{2/alpha} times a positive (alpha/2)-stable
/// variable. Throws AlphaOutOfRange.
void stable_increment(double alpha, double c_alpha, double dt, std::span<double> out, Rng& rng);
std::vector<double> stable_increment(double alpha, double dt, int dim, Rng& rng, double c_alpha = 1.0);

/// Euler step  x += -grad U(x) dt + L_dt.
void step_stable(const model::StableSDE& p, std::span<double> x, double dt, Rng& rng);

/// Dispatches on the process; for the kinetic process the state is (x, v).
void step_process(const model::ProcessSpec& p, std::span<double> state, double dt, Rng& rng);

/// Dimension of the simulated state (2d for the kinetic process).
int state_dim(const model::ProcessSpec& p, int position_dim);

}  // namespace qsd::simulate
