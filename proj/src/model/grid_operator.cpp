#include "qsd/model/grid_operator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "qsd/errors.hpp"

namespace qsd::model {

GridOperator::GridOperator(SparseRowMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw InvalidSpec("generator must be square");
  if (matrix_.rows() == 0) throw EmptyInterior("generator has no interior rows");
  matrix_.makeCompressed();
  const auto n = matrix_.rows();
  diagonal_ = Eigen::VectorXd::Zero(n);
  row_sums_ = Eigen::VectorXd::Zero(n);
  min_offdiag_ = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < n; ++r) {
    for (SparseRowMatrix::InnerIterator it(matrix_, r); it; ++it) {
      row_sums_[r] += it.value();
      if (it.col() == r) {
        diagonal_[r] += it.value();
      } else {
        min_offdiag_ = std::min(min_offdiag_, it.value());
      }
    }
  }
  if (!std::isfinite(min_offdiag_)) min_offdiag_ = 0.0;
}

bool GridOperator::is_sub_markov(double tol) const {
  if (min_offdiag_ < 0.0) return false;
  for (Eigen::Index r = 0; r < row_sums_.size(); ++r) {
    if (row_sums_[r] > tol * (1.0 + std::abs(diagonal_[r]))) return false;
  }
  return true;
}

void GridOperator::write_triplets(std::ostream& os) const {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < matrix_.rows(); ++r) {
    for (SparseRowMatrix::InnerIterator it(matrix_, r); it; ++it) {
      os << r << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace qsd::model
