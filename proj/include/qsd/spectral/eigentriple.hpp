#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <optional>
#include <string>

#include "qsd/errors.hpp"
#include "qsd/model/fields.hpp"
#include "qsd/model/grid_operator.hpp"

namespace qsd::spectral {

/// (Lambda, mu, phi) with sum(mu) = 1 and mu . phi = 1.
struct EigenTriple {
  double lambda = 0.0;
  Eigen::VectorXd mu;
  Eigen::VectorXd phi;
};

/// sup_i |f_i| / W_i and its dual  sum_i |nu_i| W_i.
class WeightedNorm {
 public:
  explicit WeightedNorm(const model::WeightFunction& w);
  double operator()(const Eigen::VectorXd& f) const;
  double dual(const Eigen::VectorXd& nu) const;

 private:
  Eigen::VectorXd w_;
};

struct EigenOptions {
  double tol = 1e-10;
  int max_iterations = 2000;
  /// Starting vectors (e.g. a previous solve at a nearby potential).
  std::optional<Eigen::VectorXd> initial_phi;
  std::optional<Eigen::VectorXd> initial_mu;
};

struct EigenReport {
  EigenTriple triple;
  double right_residual = 0.0;      // ||(s-Lambda) R_s phi - phi||_W / ||phi||_W
  double left_residual = 0.0;       // same for mu in the dual norm
  double generator_residual = 0.0;  // ||(A - Lambda) phi||_W / ||phi||_W
  double lower_bound = 0.0;         // Collatz-Wielandt bracket of Lambda
  double upper_bound = 0.0;
  double shift = 0.0;               // final resolvent shift s
  int iterations = 0;
  bool converged = false;
};

inline std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", r);
  return buf;
}

/// Raised when the residuals do not reach `tol` within the iteration budget;
/// carries the last iterate and its residuals.
class SlowConvergence : public Error {
 public:
  explicit SlowConvergence(EigenReport partial)
      : Error("spectral", "principal eigentriple did not reach tolerance (residual " +
                              format_residual(std::max(partial.right_residual, partial.left_residual)) + ")"),
        partial_(std::move(partial)) {}
  const EigenReport& partial() const { return partial_; }

 private:
  EigenReport partial_;
};

/// Principal eigentriple of A = L_D + V by power iteration on the resolvent
/// R_s = (s - A)^{-1}, s above the spectral abscissa.
///
/// s - A is a nonsingular M-matrix whenever s exceeds a Collatz-Wielandt
/// upper bound max_i (A x)_i / x_i for some x > 0, so R_s is entrywise
/// nonnegative and shares its Perron vectors with every P_t = exp(tA).
/// The shift starts at max row sum + 1 and is lowered towards the bound
/// produced by the current right iterate. Right and left vectors are
/// iterated with the same factorization; Lambda is the two-sided Rayleigh
/// quotient mu A phi / mu phi.
EigenReport principal_eigentriple(const model::GridOperator& op, const model::PotentialField& potential,
                                  const model::WeightFunction& weight, const EigenOptions& options = {});

/// Convenience overload with W = 1.
EigenReport principal_eigentriple(const model::GridOperator& op, const model::PotentialField& potential,
                                  const EigenOptions& options = {});

}  // namespace qsd::spectral
