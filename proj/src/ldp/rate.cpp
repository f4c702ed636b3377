#include "qsd/ldp/rate.hpp"

#include <cmath>
#include <limits>

namespace qsd::ldp {
namespace {

Eigen::VectorXd project(Eigen::VectorXd v, double bound) {
  v.array() -= v.mean();
  return v.cwiseMax(-bound).cwiseMin(bound);
}

model::PotentialField as_field(const Eigen::VectorXd& v) {
  return model::PotentialField(std::vector<double>(v.data(), v.data() + v.size()));
}

struct Point {
  Eigen::VectorXd V;
  spectral::EigenReport report;
  Eigen::VectorXd pi;
  double objective = 0.0;
};

Point evaluate(const CramerFunctional& F, const Eigen::VectorXd& beta, Eigen::VectorXd V,
               const spectral::EigenTriple* warm) {
  Point p;
  p.report = F.solve(as_field(V), warm);
  p.pi = qed(p.report.triple).density;
  p.objective = beta.dot(V) - (p.report.triple.lambda - F.reference_lambda0());
  p.V = std::move(V);
  return p;
}

/// Gradient with coordinates that would leave the box zeroed.
Eigen::VectorXd free_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& V, double bound, bool& active) {
  Eigen::VectorXd f = g;
  active = false;
  const double edge = bound * (1.0 - 1e-12);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if ((V[i] >= edge && g[i] > 0.0) || (V[i] <= -edge && g[i] < 0.0)) {
      f[i] = 0.0;
      active = true;
    }
  }
  return f;
}

}  // namespace

RateFunctionResult rate_function(const CramerFunctional& F, const Eigen::VectorXd& beta, const RateOptions& options) {
  const auto n = static_cast<Eigen::Index>(F.dim());
  if (beta.size() != n) throw InvalidSpec("beta size does not match the operator");
  if ((beta.array() < 0.0).any() || std::abs(beta.sum() - 1.0) > 1e-9) {
    throw InvalidSpec("beta must be a probability vector on interior nodes");
  }
  if (!(options.bound > 0.0)) throw InvalidSpec("rate bound M must be positive");

  const double scale = static_cast<double>(n);  // 1 / u_i
  Eigen::VectorXd V0 = options.initial_V.value_or(Eigen::VectorXd::Zero(n));
  if (V0.size() != n) throw InvalidSpec("initial V has the wrong size");
  Point cur = evaluate(F, beta, project(V0, options.bound), &F.reference().triple);

  RateFunctionResult r;
  bool active = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd g = beta - cur.pi;
    const Eigen::VectorXd gf = free_gradient(g, cur.V, options.bound, active);
    r.gradient_norm = gf.lpNorm<1>();
    r.iterations = it;
    if (r.gradient_norm <= options.tol) {
      r.converged = true;
      break;
    }
    double step = options.initial_step;
    bool accepted = false;
    while (step * r.gradient_norm * scale > 1e-15 * (1.0 + cur.V.lpNorm<Eigen::Infinity>())) {
      Eigen::VectorXd trial = project(cur.V + step * scale * g, options.bound);
      Point next = evaluate(F, beta, trial, &cur.report.triple);
      if (next.objective >= cur.objective + options.armijo * g.dot(next.V - cur.V)) {
        cur = std::move(next);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no ascent left at working precision
    r.iterations = it + 1;
  }
  const Eigen::VectorXd g = beta - cur.pi;
  r.gradient_norm = free_gradient(g, cur.V, options.bound, active).lpNorm<1>();
  r.box_active = active;
  r.value = cur.objective;
  r.maximizer = as_field(cur.V);
  if (r.value < 0.0) {
    // V = 0 is feasible with objective exactly 0; only round-off can land below it.
    r.value = 0.0;
    r.maximizer = model::PotentialField::zeros(F.dim());
  }
  // sup over the box of the linearization, which bounds the concave objective
  r.optimality_gap = std::max(0.0, options.bound * g.lpNorm<1>() - g.dot(cur.V));
  return r;
}

RateFunctionResult rate_function(const CramerFunctional& F, const model::GridSpec& grid,
                                 const Eigen::VectorXd& beta_on_nodes, const RateOptions& options) {
  if (beta_on_nodes.size() != static_cast<Eigen::Index>(grid.node_count())) {
    throw InvalidSpec("beta must have one entry per grid node");
  }
  Eigen::VectorXd beta(static_cast<Eigen::Index>(grid.interior_count()));
  double outside = 0.0;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const long k = grid.interior_index(node);
    if (k < 0) {
      outside += std::abs(beta_on_nodes[static_cast<Eigen::Index>(node)]);
    } else {
      beta[k] = beta_on_nodes[static_cast<Eigen::Index>(node)];
    }
  }
  if (outside > 0.0) {
    RateFunctionResult r;
    r.value = std::numeric_limits<double>::infinity();
    r.infinite = true;
    r.maximizer = model::PotentialField::zeros(grid.interior_count());
    return r;
  }
  return rate_function(F, beta, options);
}

}  // namespace qsd::ldp
