#pragma once

#include <Eigen/Dense>

#include "qsd/model/fields.hpp"
#include "qsd/model/grid_operator.hpp"
#include "qsd/spectral/eigentriple.hpp"

namespace qsd::ldp {

/// V -> Lambda_D(V) - Lambda_D(0) on a fixed operator. Every evaluation uses
/// the same eigen tolerance as the reference value.
class CramerFunctional {
 public:
  explicit CramerFunctional(const model::GridOperator& op, spectral::EigenOptions options = {});

  const model::GridOperator& op() const { return *op_; }
  std::size_t dim() const { return op_->dim(); }
  double reference_lambda0() const { return reference_.triple.lambda; }
  const spectral::EigenReport& reference() const { return reference_; }
  const spectral::EigenOptions& options() const { return options_; }

  double operator()(const model::PotentialField& V) const;

  /// Eigen solve at V, optionally warm-started from a nearby triple.
  spectral::EigenReport solve(const model::PotentialField& V, const spectral::EigenTriple* warm = nullptr) const;

 private:
  const model::GridOperator* op_;
  spectral::EigenOptions options_;
  spectral::EigenReport reference_;
};

/// pi_{D,V} = phi * mu cellwise, normalized to sum 1.
struct QuasiErgodicDistribution {
  Eigen::VectorXd density;
};

QuasiErgodicDistribution qed(const spectral::EigenTriple& triple);

struct GateauxResult {
  double identity = 0.0;            // pi_{D,V0}(V1)
  double central_difference = 0.0;  // (F(V0 + t V1) - F(V0 - t V1)) / 2t
  double relative_error = 0.0;
};

/// Derivative of the Cramer functional at V0 in direction V1 by the
/// q.e.d. identity, checked against a central difference with step t.
/// Throws DerivativeMismatch when the relative disagreement exceeds rel_tol.
GateauxResult gateaux(const CramerFunctional& F, const model::PotentialField& V0, const model::PotentialField& V1,
                      double t = 1e-3, double rel_tol = 1e-6);

}  // namespace qsd::ldp
