#include "qsd/ldp/reversible.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd::ldp {

DirichletFormContext::DirichletFormContext(const model::ScalarField& potential, const model::GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.interior_count());
  const int d = grid.dim();
  std::vector<double> u_node(grid.node_count());
  for (std::size_t node = 0; node < grid.node_count(); ++node) u_node[node] = potential.value(grid.coordinates(node));

  pi_.resize(n);
  killing_ = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t node = grid.interior_node(static_cast<std::size_t>(i));
    pi_[i] = std::exp(-2.0 * u_node[node]);
    const auto idx = grid.multi_index(node);
    double out = 0.0;
    for (int a = 0; a < d; ++a) {
      const double h = grid.spacing()[static_cast<std::size_t>(a)];
      for (int sgn : {-1, 1}) {
        std::vector<long> nb(idx.begin(), idx.end());
        nb[static_cast<std::size_t>(a)] += sgn;
        const auto target = grid.node_at(nb);
        if (!target) throw InvalidSpec("reversible context needs D strictly inside the lattice");
        const double rate = std::exp(-(u_node[*target] - u_node[node])) / (2.0 * h * h);
        out += rate;
        const long j = grid.interior_index(*target);
        if (j < 0) {
          killing_[i] += rate;
        } else {
          trip.emplace_back(i, j, rate);
        }
      }
    }
    trip.emplace_back(i, i, -out);
  }
  pi_ /= pi_.sum();
  model::SparseRowMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  generator_ = model::GridOperator(std::move(m));
}

double DirichletFormContext::form(const Eigen::VectorXd& f) const {
  if (f.size() != pi_.size()) throw InvalidSpec("function size does not match the context");
  const auto& m = generator_.matrix();
  double e = 0.0;
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    for (model::SparseRowMatrix::InnerIterator it(m, i); it; ++it) {
      if (it.col() == i) continue;
      const double df = f[i] - f[it.col()];
      e += 0.5 * pi_[i] * it.value() * df * df;
    }
    e += pi_[i] * killing_[i] * f[i] * f[i];
  }
  return e;
}

double DirichletFormContext::detailed_balance_defect() const {
  const auto& m = generator_.matrix();
  const model::SparseRowMatrix mt = m.transpose();
  double worst = 0.0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    for (model::SparseRowMatrix::InnerIterator it(m, i); it; ++it) {
      const double flux = pi_[i] * it.value();
      const double back = pi_[it.col()] * mt.coeff(i, it.col());
      worst = std::max(worst, std::abs(flux - back));
      scale = std::max(scale, std::abs(flux));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

double dirichlet_eigenvalue(const DirichletFormContext& ctx) {
  const auto n = static_cast<Eigen::Index>(ctx.pi().size());
  if (n > 6000) throw InvalidSpec("dense Dirichlet eigensolve limited to 6000 interior nodes");
  const Eigen::VectorXd s = ctx.pi().cwiseSqrt();
  Eigen::MatrixXd a = Eigen::MatrixXd(ctx.generator().matrix());
  // pi^{1/2} (-L) pi^{-1/2}, then symmetrized to remove rounding asymmetry
  a = -(s.asDiagonal() * a * s.cwiseInverse().asDiagonal());
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NonConvergence("self-adjoint eigensolver failed");
  return es.eigenvalues()[0];
}

ReversibleRate reversible_rate(const Eigen::VectorXd& beta, const DirichletFormContext& ctx, double lambda) {
  if (beta.size() != ctx.pi().size()) throw InvalidSpec("beta size does not match the context");
  ReversibleRate r;
  r.lambda = lambda;
  const Eigen::VectorXd f = (beta.array() / ctx.pi().array()).sqrt().matrix();
  r.energy = ctx.form(f);
  r.value = r.energy - lambda;
  return r;
}

ReversibleRate reversible_rate(const Eigen::VectorXd& beta, const DirichletFormContext& ctx) {
  return reversible_rate(beta, ctx, dirichlet_eigenvalue(ctx));
}

ReversibleRate reversible_rate(const model::GridSpec& grid, const Eigen::VectorXd& beta_on_nodes,
                               const DirichletFormContext& ctx) {
  if (beta_on_nodes.size() != static_cast<Eigen::Index>(grid.node_count())) {
    throw InvalidSpec("beta must have one entry per grid node");
  }
  Eigen::VectorXd beta(static_cast<Eigen::Index>(grid.interior_count()));
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const double b = beta_on_nodes[static_cast<Eigen::Index>(node)];
    const long k = grid.interior_index(node);
    if (k < 0) {
      if (b != 0.0) {
        ReversibleRate r;
        r.infinite = true;
        r.value = std::numeric_limits<double>::infinity();
        return r;
      }
    } else {
      beta[k] = b;
    }
  }
  return reversible_rate(beta, ctx);
}

}  // namespace qsd::ldp
