#pragma once

#include <optional>

#include "qsd/model/domain.hpp"
#include "qsd/model/fractional.hpp"
#include "qsd/model/grid.hpp"
#include "qsd/model/grid_operator.hpp"
#include "qsd/model/process.hpp"

namespace qsd::model {

struct GeneratorOptions {
  /// Reach of the jump stencil for StableSDE; defaults to the box diameter.
  std::optional<double> truncation_radius;
};

/// Assembles the killed generator L_D on the interior nodes of `grid`.
///
/// Diffusion uses centered second differences. Drift uses centered
/// differences where that keeps the off-diagonals nonnegative and first-order
/// upwinding elsewhere (always for the position transport of the kinetic
/// process, which carries no diffusion). Absorbing nodes are dropped.
GridOperator build_generator(const ProcessSpec& process, const GridSpec& grid, const DomainSpec& domain,
                             const GeneratorOptions& options = {});

/// The stencil used by build_generator for a stable process.
JumpStencil stable_stencil(const StableSDE& process, const GridSpec& grid, const DomainSpec& domain,
                           const GeneratorOptions& options = {});

}  // namespace qsd::model
