#include "qsd/model/grid.hpp"

#include <cmath>

#include "qsd/errors.hpp"

namespace qsd::model {

GridSpec::GridSpec(const DomainSpec& domain, std::vector<int> cells) : cells_(std::move(cells)) {
  const int d = domain.ambient_dim();
  if (static_cast<int>(cells_.size()) != d) throw InvalidSpec("grid dimension does not match domain");
  total_nodes_ = 1;
  for (int a = 0; a < d; ++a) {
    if (cells_[a] < 1) throw InvalidSpec("grid needs at least one cell per axis");
    const auto& iv = domain.bounds()[a];
    spacing_.push_back(iv.length() / cells_[a]);
    origin_.push_back(iv.lo);
    stride_.push_back(total_nodes_);
    total_nodes_ *= static_cast<std::size_t>(cells_[a] + 1);
  }
  interior_index_.assign(total_nodes_, -1);
  for (std::size_t node = 0; node < total_nodes_; ++node) {
    if (domain.contains(coordinates(node))) {
      interior_index_[node] = static_cast<long>(interior_nodes_.size());
      interior_nodes_.push_back(node);
    }
  }
  if (interior_nodes_.empty()) throw EmptyInterior("no lattice node lies inside D");
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (double h : spacing_) v *= h;
  return v;
}

std::vector<int> GridSpec::multi_index(std::size_t node) const {
  std::vector<int> idx(cells_.size());
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    idx[a] = static_cast<int>((node / stride_[a]) % static_cast<std::size_t>(cells_[a] + 1));
  }
  return idx;
}

std::optional<std::size_t> GridSpec::node_at(std::span<const long> idx) const {
  std::size_t node = 0;
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    if (idx[a] < 0 || idx[a] > cells_[a]) return std::nullopt;
    node += static_cast<std::size_t>(idx[a]) * stride_[a];
  }
  return node;
}

double GridSpec::coordinate(std::size_t node, int axis) const {
  const auto k = (node / stride_[axis]) % static_cast<std::size_t>(cells_[axis] + 1);
  return origin_[axis] + static_cast<double>(k) * spacing_[axis];
}

std::vector<double> GridSpec::coordinates(std::size_t node) const {
  std::vector<double> x(cells_.size());
  for (std::size_t a = 0; a < cells_.size(); ++a) x[a] = coordinate(node, static_cast<int>(a));
  return x;
}

std::optional<std::size_t> GridSpec::nearest_node(std::span<const double> x) const {
  std::vector<long> idx(cells_.size());
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    const double k = std::floor((x[a] - origin_[a]) / spacing_[a] + 0.5);
    if (!std::isfinite(k)) return std::nullopt;
    idx[a] = static_cast<long>(k);
  }
  return node_at(idx);
}

}  // namespace qsd::model
