#include "qsd/spectral/semigroup.hpp"

#include <cmath>

#include "qsd/errors.hpp"

namespace qsd::spectral {

model::SparseRowMatrix twisted_generator(const model::GridOperator& op, const model::PotentialField& potential) {
  if (potential.size() != op.dim()) throw InvalidSpec("potential size does not match operator");
  model::SparseRowMatrix a = op.matrix();
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    for (model::SparseRowMatrix::InnerIterator it(a, r); it; ++it) {
      if (it.col() == r) it.valueRef() += potential[static_cast<std::size_t>(r)];
    }
  }
  return a;
}

FeynmanKacSemigroup::FeynmanKacSemigroup(const model::GridOperator& op, const model::PotentialField& potential,
                                         double tol)
    : tol_(tol) {
  const Eigen::Index n = static_cast<Eigen::Index>(op.dim());
  // Row sums and diagonal of A = L + V, read off the operator.
  Eigen::VectorXd row = op.row_sums();
  Eigen::VectorXd diag = op.diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    row[i] += potential[static_cast<std::size_t>(i)];
    diag[i] += potential[static_cast<std::size_t>(i)];
  }
  shift_ = row.maxCoeff();
  sigma_ = (shift_ - diag.array()).maxCoeff();
  uniformized_ = op.matrix();
  if (sigma_ <= 0.0) {
    sigma_ = 0.0;
    return;
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    for (model::SparseRowMatrix::InnerIterator it(uniformized_, r); it; ++it) {
      if (it.col() == r) {
        it.valueRef() = std::max(0.0, (diag[r] - shift_ + sigma_) / sigma_);
      } else {
        it.valueRef() /= sigma_;
      }
    }
  }
}

Eigen::VectorXd FeynmanKacSemigroup::apply(const Eigen::VectorXd& f, double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw NonConvergence("semigroup time must be finite and >= 0");
  if (t == 0.0) return f;
  const double growth = std::exp(shift_ * t);
  if (sigma_ == 0.0) return growth * f;

  const double lambda = sigma_ * t;
  const double log_lambda = std::log(lambda);
  const auto max_terms = static_cast<long>(lambda + 40.0 * std::sqrt(lambda) + 400.0);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.size());
  Eigen::VectorXd v = f;
  Eigen::VectorXd next(f.size());
  for (long k = 0;; ++k) {
    const double logw = -lambda + static_cast<double>(k) * log_lambda - std::lgamma(static_cast<double>(k) + 1.0);
    const double w = std::exp(logw);
    if (w > 0.0) acc.noalias() += w * v;
    if (static_cast<double>(k) > lambda) {
      const double q = lambda / static_cast<double>(k + 1);
      if (w * q / (1.0 - q) < tol_) break;
    }
    if (k > max_terms) throw NonConvergence("uniformization series failed to contract");
    next.noalias() = uniformized_ * v;
    v.swap(next);
    if (!v.allFinite()) throw NonConvergence("non-finite iterate in semigroup action");
  }
  return growth * acc;
}

Eigen::VectorXd semigroup_apply(const model::GridOperator& op, const model::PotentialField& potential,
                                const Eigen::VectorXd& f, double t) {
  return FeynmanKacSemigroup(op, potential).apply(f, t);
}

}  // namespace qsd::spectral
