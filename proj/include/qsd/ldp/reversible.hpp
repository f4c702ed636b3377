#pragma once

#include <Eigen/Dense>

#include "qsd/model/fields.hpp"
#include "qsd/model/grid.hpp"
#include "qsd/model/grid_operator.hpp"

namespace qsd::ldp {

/// Reversible discretization of dX = -grad U dt + dB on a lattice. The
/// nearest-neighbour rate i -> j is exp(-(U_j - U_i)) / (2 h^2), so
/// pi_i k_ij = exp(-U_i - U_j) / (2 h^2) is symmetric by construction with
/// pi proportional to exp(-2U). Jumps onto absorbing nodes become killing.
class DirichletFormContext {
 public:
  DirichletFormContext(const model::ScalarField& potential, const model::GridSpec& grid);

  const model::GridOperator& generator() const { return generator_; }
  /// Gibbs weights on interior nodes, normalized to sum 1.
  const Eigen::VectorXd& pi() const { return pi_; }
  const Eigen::VectorXd& killing() const { return killing_; }

  /// E(f, f) = 1/2 sum_ij pi_i k_ij (f_i - f_j)^2 + sum_i pi_i kill_i f_i^2.
  double form(const Eigen::VectorXd& f) const;

  /// max_ij |pi_i L_ij - pi_j L_ji| relative to max |pi_i L_ij|.
  double detailed_balance_defect() const;

 private:
  model::GridOperator generator_;
  Eigen::VectorXd pi_;
  Eigen::VectorXd killing_;
};

/// lambda_D = min E(f, f) / sum pi f^2 from the symmetrized operator
/// pi^{1/2} (-L) pi^{-1/2} (dense self-adjoint eigensolver, so at most a few
/// thousand interior nodes).
double dirichlet_eigenvalue(const DirichletFormContext& ctx);

struct ReversibleRate {
  double value = 0.0;         // E(sqrt h, sqrt h) - lambda_D
  double energy = 0.0;        // E(sqrt h, sqrt h)
  double lambda = 0.0;        // lambda_D
  bool infinite = false;      // beta not absolutely continuous w.r.t. pi on D
};

/// Closed form of the rate for beta = h pi on interior nodes.
ReversibleRate reversible_rate(const Eigen::VectorXd& beta, const DirichletFormContext& ctx);
/// Same with a precomputed lambda_D.
ReversibleRate reversible_rate(const Eigen::VectorXd& beta, const DirichletFormContext& ctx, double lambda);
/// beta given on every grid node; mass on absorbing nodes gives +infinity.
ReversibleRate reversible_rate(const model::GridSpec& grid, const Eigen::VectorXd& beta_on_nodes,
                               const DirichletFormContext& ctx);

}  // namespace qsd::ldp
