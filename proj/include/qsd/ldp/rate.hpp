#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qsd/ldp/cramer.hpp"
#include "qsd/model/grid.hpp"

namespace qsd::ldp {

struct RateOptions {
  double bound = 20.0;         // M, cap on ||V||_inf
  double tol = 1e-9;           // on the l1 norm of the free part of the gradient
  int max_iterations = 20000;
  double armijo = 1e-4;
  double initial_step = 1.0;
  std::optional<Eigen::VectorXd> initial_V;
};

struct RateFunctionResult {
  double value = 0.0;           // beta(V) - F(V) at the returned V
  model::PotentialField maximizer;
  double optimality_gap = 0.0;  // concavity bound on sup_{|V|<=M} minus value
  double gradient_norm = 0.0;   // l1 norm of beta - pi_{D,V} on free coordinates
  int iterations = 0;
  bool converged = false;
  bool box_active = false;      // some coordinate sits on the bound and is pushed outward
  bool infinite = false;        // beta charges absorbing nodes: the rate is +infinity
};

/// I_D(beta) = sup_{|V| <= M} beta(V) - F(V) by projected gradient ascent.
/// The step direction is (beta - pi_{D,V}) / u with u the uniform
/// probability on interior nodes, i.e. the gradient of the objective in
/// L^2(u). Each trial point is recentred to mean zero (the objective is
/// shift invariant) and clipped to the box; steps are accepted by Armijo
/// backtracking.
RateFunctionResult rate_function(const CramerFunctional& F, const Eigen::VectorXd& beta,
                                 const RateOptions& options = {});

/// As above for beta given on every grid node; mass on absorbing nodes
/// gives an infinite rate.
RateFunctionResult rate_function(const CramerFunctional& F, const model::GridSpec& grid,
                                 const Eigen::VectorXd& beta_on_nodes, const RateOptions& options = {});

}  // namespace qsd::ldp
