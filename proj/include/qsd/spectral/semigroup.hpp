#pragma once

#include <Eigen/Dense>

#include "qsd/model/fields.hpp"
#include "qsd/model/grid_operator.hpp"

namespace qsd::spectral {

/// Action of exp(t (L_D + V)) by uniformization.
///
/// With m = max row sum of A = L_D + V and sigma = max_i (m - A_ii), the
/// matrix P = (A - m + sigma) / sigma is entrywise nonnegative with row sums
/// <= 1, and
///
///   exp(tA) f = e^{mt} sum_k Poisson(sigma t; k) P^k f.
///
/// The series is truncated once the Poisson tail mass drops below `tol`,
/// which bounds the error by tol * e^{mt} ||f||_inf. Every term is a
/// nonnegative combination, so f >= 0 gives an output >= 0 exactly.
class FeynmanKacSemigroup {
 public:
  FeynmanKacSemigroup(const model::GridOperator& op, const model::PotentialField& potential, double tol = 1e-13);

  /// Throws NonConvergence if t < 0 or the truncation fails.
  Eigen::VectorXd apply(const Eigen::VectorXd& f, double t) const;

  double max_row_sum() const { return shift_; }
  double uniformization_rate() const { return sigma_; }

 private:
  model::SparseRowMatrix uniformized_;
  double shift_ = 0.0;
  double sigma_ = 0.0;
  double tol_;
};

Eigen::VectorXd semigroup_apply(const model::GridOperator& op, const model::PotentialField& potential,
                                const Eigen::VectorXd& f, double t);

/// L_D + diag(V) as a sparse matrix.
model::SparseRowMatrix twisted_generator(const model::GridOperator& op, const model::PotentialField& potential);

}  // namespace qsd::spectral
