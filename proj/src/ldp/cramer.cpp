#include "qsd/ldp/cramer.hpp"

#include <cmath>

namespace qsd::ldp {

CramerFunctional::CramerFunctional(const model::GridOperator& op, spectral::EigenOptions options)
    : op_(&op), options_(std::move(options)) {
  options_.initial_phi.reset();
  options_.initial_mu.reset();
  reference_ = spectral::principal_eigentriple(op, model::PotentialField::zeros(op.dim()), options_);
}

spectral::EigenReport CramerFunctional::solve(const model::PotentialField& V, const spectral::EigenTriple* warm) const {
  if (V.size() != dim()) throw InvalidSpec("potential size does not match the operator");
  auto opts = options_;
  if (warm) {
    opts.initial_phi = warm->phi;
    opts.initial_mu = warm->mu;
  }
  return spectral::principal_eigentriple(*op_, V, opts);
}

double CramerFunctional::operator()(const model::PotentialField& V) const {
  // Constants shift Lambda exactly; answering without a solve keeps F(0) = 0
  // free of round-off, so the rate function is never slightly negative.
  if (V.size() == dim() && V.size() > 0 && V.max() == V.min()) return V.max();
  return solve(V, &reference_.triple).triple.lambda - reference_lambda0();
}

QuasiErgodicDistribution qed(const spectral::EigenTriple& triple) {
  Eigen::VectorXd d = triple.phi.cwiseProduct(triple.mu);
  const double s = d.sum();
  if (!(s > 0.0)) throw InvalidSpec("eigentriple has no positive overlap");
  return {d / s};
}

GateauxResult gateaux(const CramerFunctional& F, const model::PotentialField& V0, const model::PotentialField& V1,
                      double t, double rel_tol) {
  if (!(t > 0.0)) throw InvalidSpec("finite-difference step must be positive");
  const auto base = F.solve(V0, &F.reference().triple);
  const auto pi = qed(base.triple).density;
  GateauxResult r;
  const Eigen::Map<const Eigen::VectorXd> v1(V1.values().data(), static_cast<Eigen::Index>(V1.size()));
  r.identity = pi.dot(v1);
  const double up = F.solve(V0.axpy(t, V1), &base.triple).triple.lambda;
  const double down = F.solve(V0.axpy(-t, V1), &base.triple).triple.lambda;
  r.central_difference = (up - down) / (2.0 * t);
  const double scale = std::max(std::abs(r.identity), std::abs(r.central_difference));
  r.relative_error = scale > 0.0 ? std::abs(r.identity - r.central_difference) / scale : 0.0;
  if (r.relative_error > rel_tol) {
    throw DerivativeMismatch("q.e.d. identity " + std::to_string(r.identity) + " vs central difference " +
                             std::to_string(r.central_difference));
  }
  return r;
}

}  // namespace qsd::ldp
