#include "qsd/model/generator.hpp"

#include <cmath>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd::model {
namespace {

class Assembler {
 public:
  explicit Assembler(const GridSpec& grid) : grid_(grid), diag_(grid.interior_count(), 0.0) {}

  /// Rate from interior row i to lattice node at `idx`; absorbed if that node
  /// is off the lattice or exterior.
  void add_rate(std::size_t row, std::span<const long> idx, double rate) {
    if (rate == 0.0) return;
    diag_[row] -= rate;
    const auto node = grid_.node_at(idx);
    if (!node) return;
    const long col = grid_.interior_index(*node);
    if (col < 0) return;
    triplets_.emplace_back(static_cast<int>(row), static_cast<int>(col), rate);
  }

  void add_diagonal(std::size_t row, double value) { diag_[row] += value; }

  /// Second-order diffusion `coeff * d^2/dx_a^2` plus drift `b d/dx_a`.
  void add_axis(std::size_t row, std::vector<long>& idx, int axis, double coeff, double b) {
    if (!std::isfinite(b) || !std::isfinite(coeff)) {
      throw NonMonotoneScheme("non-finite drift or diffusion at interior node " + std::to_string(row));
    }
    const double h = grid_.spacing()[axis];
    const double diff = coeff / (h * h);
    double up, down;
    if (diff - std::abs(b) / (2.0 * h) >= 0.0) {
      up = diff + b / (2.0 * h);
      down = diff - b / (2.0 * h);
    } else {
      up = diff + std::max(b, 0.0) / h;
      down = diff + std::max(-b, 0.0) / h;
    }
    if (!(up >= 0.0 && down >= 0.0)) throw NonMonotoneScheme("upwinding failed to give nonnegative rates");
    const long k = idx[axis];
    idx[axis] = k + 1;
    add_rate(row, idx, up);
    idx[axis] = k - 1;
    add_rate(row, idx, down);
    idx[axis] = k;
  }

  GridOperator finish() {
    for (std::size_t i = 0; i < diag_.size(); ++i) {
      triplets_.emplace_back(static_cast<int>(i), static_cast<int>(i), diag_[i]);
    }
    const auto n = static_cast<Eigen::Index>(diag_.size());
    SparseRowMatrix m(n, n);
    m.setFromTriplets(triplets_.begin(), triplets_.end());
    return GridOperator(std::move(m));
  }

  std::vector<long> index_of(std::size_t row) const {
    const auto mi = grid_.multi_index(grid_.interior_node(row));
    return {mi.begin(), mi.end()};
  }

 private:
  const GridSpec& grid_;
  std::vector<double> diag_;
  std::vector<Eigen::Triplet<double>> triplets_;
};

void assemble(const OverdampedLangevin& p, const GridSpec& grid, Assembler& as) {
  const int d = grid.dim();
  std::vector<double> c(d);
  for (std::size_t i = 0; i < grid.interior_count(); ++i) {
    const auto x = grid.interior_coordinates(i);
    p.drift_at(x, c);
    auto idx = as.index_of(i);
    for (int a = 0; a < d; ++a) as.add_axis(i, idx, a, 0.5, c[a]);
  }
}

void assemble(const KineticLangevin& p, const GridSpec& grid, Assembler& as) {
  const int d2 = grid.dim();
  if (d2 % 2 != 0) throw InvalidSpec("kinetic Langevin needs an even phase-space dimension");
  const int d = d2 / 2;
  std::vector<double> grad(d);
  for (std::size_t i = 0; i < grid.interior_count(); ++i) {
    const auto z = grid.interior_coordinates(i);
    const std::span<const double> x(z.data(), d);
    p.potential.gradient(x, grad);
    auto idx = as.index_of(i);
    for (int a = 0; a < d; ++a) {
      as.add_axis(i, idx, a, 0.0, z[d + a]);
      as.add_axis(i, idx, d + a, 0.5, -grad[a] - p.gamma * z[d + a]);
    }
  }
}

void assemble(const StableSDE& p, const GridSpec& grid, const DomainSpec& domain, const GeneratorOptions& options,
              Assembler& as) {
  const auto stencil = stable_stencil(p, grid, domain, options);
  const int d = grid.dim();
  std::vector<double> grad(d);
  std::vector<long> target(d);
  for (std::size_t i = 0; i < grid.interior_count(); ++i) {
    const auto x = grid.interior_coordinates(i);
    p.potential.gradient(x, grad);
    auto idx = as.index_of(i);
    for (int a = 0; a < d; ++a) as.add_axis(i, idx, a, stencil.local_diffusion, -grad[a]);
    for (std::size_t k = 0; k < stencil.weights.size(); ++k) {
      for (int a = 0; a < d; ++a) target[a] = idx[a] + stencil.offsets[k][a];
      as.add_rate(i, target, stencil.weights[k]);
    }
    as.add_diagonal(i, -stencil.tail_rate);
  }
}

}  // namespace

JumpStencil stable_stencil(const StableSDE& process, const GridSpec& grid, const DomainSpec& domain,
                           const GeneratorOptions& options) {
  const double radius = options.truncation_radius.value_or(domain.box_diameter());
  if (radius < domain.box_diameter() * (1.0 - 1e-12)) {
    throw InvalidSpec("truncation radius must be at least the domain diameter");
  }
  return fractional_quadrature(process.alpha, process.c_alpha, grid, radius);
}

GridOperator build_generator(const ProcessSpec& process, const GridSpec& grid, const DomainSpec& domain,
                             const GeneratorOptions& options) {
  validate(process);
  if (grid.dim() != domain.ambient_dim()) throw InvalidSpec("grid and domain dimensions differ");
  if (grid.interior_count() == 0) throw EmptyInterior("no interior nodes");
  Assembler as(grid);
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, StableSDE>) {
          assemble(p, grid, domain, options, as);
        } else {
          assemble(p, grid, as);
        }
      },
      process);
  return as.finish();
}

}  // namespace qsd::model
