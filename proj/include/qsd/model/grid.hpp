#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qsd/model/domain.hpp"

namespace qsd::model {

/// Uniform lattice over the simulation box. Axis a carries cells[a]+1 nodes
/// x = lo + k*h, k = 0..cells[a], so the box faces are lattice lines. Nodes
/// strictly inside D are "interior" and get a dense index 0..n-1; every
/// other node is absorbing.
class GridSpec {
 public:
  GridSpec(const DomainSpec& domain, std::vector<int> cells);

  int dim() const { return static_cast<int>(cells_.size()); }
  const std::vector<int>& cells() const { return cells_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<double>& origin() const { return origin_; }
  double cell_volume() const;

  std::size_t node_count() const { return total_nodes_; }
  std::size_t interior_count() const { return interior_nodes_.size(); }

  /// Number of lattice nodes along axis a.
  int nodes_along(int a) const { return cells_[a] + 1; }

  std::vector<int> multi_index(std::size_t node) const;
  /// Flat node id of a multi-index, or nullopt if it falls off the lattice.
  std::optional<std::size_t> node_at(std::span<const long> idx) const;

  std::vector<double> coordinates(std::size_t node) const;
  double coordinate(std::size_t node, int axis) const;

  /// Dense interior index of a node, or -1 when the node is absorbing.
  long interior_index(std::size_t node) const { return interior_index_[node]; }
  std::size_t interior_node(std::size_t dense) const { return interior_nodes_[dense]; }
  std::vector<double> interior_coordinates(std::size_t dense) const {
    return coordinates(interior_nodes_[dense]);
  }

  /// Node whose cell [x - h/2, x + h/2) contains the point, if any.
  std::optional<std::size_t> nearest_node(std::span<const double> x) const;

 private:
  std::vector<int> cells_;
  std::vector<double> spacing_;
  std::vector<double> origin_;
  std::vector<std::size_t> stride_;
  std::size_t total_nodes_ = 0;
  std::vector<long> interior_index_;
  std::vector<std::size_t> interior_nodes_;
};

}  // namespace qsd::model
