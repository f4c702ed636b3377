#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <span>
#include <vector>

namespace qsd::model {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discretized killed generator L_D acting on interior nodes. Absorbing
/// nodes are deleted, so mass that jumps or diffuses onto them is lost and
/// appears as a negative row sum. Immutable once built.
class GridOperator {
 public:
  GridOperator() = default;
  explicit GridOperator(SparseRowMatrix matrix);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const SparseRowMatrix& matrix() const { return matrix_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const { return matrix_ * f; }
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& f) const { return matrix_.transpose() * f; }

  const Eigen::VectorXd& diagonal() const { return diagonal_; }
  /// Row sums; <= 0 for a sub-Markov generator.
  const Eigen::VectorXd& row_sums() const { return row_sums_; }
  double min_offdiagonal() const { return min_offdiag_; }
  double max_abs_diagonal() const { return diagonal_.cwiseAbs().maxCoeff(); }

  /// Off-diagonals >= 0 and row sums <= tol * (1 + |diag|).
  bool is_sub_markov(double tol = 1e-12) const;

  /// Coordinate-triplet text: one "row col value" line per stored entry,
  /// values with 17 significant digits.
  void write_triplets(std::ostream& os) const;

 private:
  SparseRowMatrix matrix_;
  Eigen::VectorXd diagonal_;
  Eigen::VectorXd row_sums_;
  double min_offdiag_ = 0.0;
};

}  // namespace qsd::model
