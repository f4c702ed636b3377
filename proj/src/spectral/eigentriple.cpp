#include "qsd/spectral/eigentriple.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <memory>

#include "qsd/spectral/semigroup.hpp"

namespace qsd::spectral {
namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// Factorization of s - A with solves for both A and A^T, each followed by
/// one step of iterative refinement (the plain LU residual stalls near 1e-10
/// on fine grids). Dense LU is used once the matrix is more than a fifth full
/// (jump generators).
class ShiftedSolver {
 public:
  ShiftedSolver(const model::SparseRowMatrix& a, double s) {
    const auto n = a.rows();
    ColMatrix m = -ColMatrix(a);
    for (Eigen::Index i = 0; i < n; ++i) m.coeffRef(i, i) += s;
    m.makeCompressed();
    m_ = m;
    if (static_cast<double>(m.nonZeros()) > 0.2 * static_cast<double>(n) * static_cast<double>(n)) {
      dense_ = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(Eigen::MatrixXd(m));
    } else {
      sparse_ = std::make_unique<Eigen::SparseLU<ColMatrix>>();
      sparse_->analyzePattern(m);
      sparse_->factorize(m);
      if (sparse_->info() != Eigen::Success) throw NonConvergence("resolvent factorization failed");
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = raw_solve(b);
    const Eigen::VectorXd r = b - m_ * x;
    return x + raw_solve(r);
  }
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = raw_solve_transpose(b);
    const Eigen::VectorXd r = b - m_.transpose() * x;
    return x + raw_solve_transpose(r);
  }

 private:
  Eigen::VectorXd raw_solve(const Eigen::VectorXd& b) const {
    return dense_ ? Eigen::VectorXd(dense_->solve(b)) : Eigen::VectorXd(sparse_->solve(b));
  }
  Eigen::VectorXd raw_solve_transpose(const Eigen::VectorXd& b) const {
    return dense_ ? Eigen::VectorXd(dense_->transpose().solve(b)) : Eigen::VectorXd(sparse_->transpose().solve(b));
  }

  ColMatrix m_;
  std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_;
  std::unique_ptr<Eigen::SparseLU<ColMatrix>> sparse_;
};

double shift_margin(double bound) { return 1e-2 * (1.0 + std::abs(bound)); }

/// Collatz-Wielandt bracket [min, max] of (A x)_i / x_i over x_i > 0.
std::pair<double, double> collatz_wielandt(const model::SparseRowMatrix& a, const Eigen::VectorXd& x) {
  const Eigen::VectorXd ax = a * x;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    const double r = ax[i] / x[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

}  // namespace

WeightedNorm::WeightedNorm(const model::WeightFunction& w)
    : w_(Eigen::Map<const Eigen::VectorXd>(w.values().data(), static_cast<Eigen::Index>(w.size()))) {}

double WeightedNorm::operator()(const Eigen::VectorXd& f) const { return (f.array().abs() / w_.array()).maxCoeff(); }

double WeightedNorm::dual(const Eigen::VectorXd& nu) const { return (nu.array().abs() * w_.array()).sum(); }

EigenReport principal_eigentriple(const model::GridOperator& op, const model::PotentialField& potential,
                                  const EigenOptions& options) {
  return principal_eigentriple(op, potential, model::WeightFunction::unit(op.dim()), options);
}

EigenReport principal_eigentriple(const model::GridOperator& op, const model::PotentialField& potential,
                                  const model::WeightFunction& weight, const EigenOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidSpec("eigen tolerance must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(op.dim());
  if (weight.size() != op.dim()) throw InvalidSpec("weight size does not match operator");
  const auto a = twisted_generator(op, potential);
  const WeightedNorm norm(weight);

  Eigen::VectorXd row_sums = op.row_sums();
  for (Eigen::Index i = 0; i < n; ++i) row_sums[i] += potential[static_cast<std::size_t>(i)];
  double s = row_sums.maxCoeff() + 1.0;

  EigenReport rep;
  Eigen::VectorXd phi = options.initial_phi.value_or(Eigen::VectorXd::Ones(n));
  Eigen::VectorXd mu = options.initial_mu.value_or(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
  if (phi.size() != n || mu.size() != n) throw InvalidSpec("initial vectors have the wrong size");
  phi = phi.cwiseAbs();
  mu = mu.cwiseAbs();
  if (!(phi.maxCoeff() > 0.0)) phi.setOnes();
  if (!(mu.sum() > 0.0)) mu.setConstant(1.0 / static_cast<double>(n));
  phi /= phi.maxCoeff();
  mu /= mu.sum();

  // A warm start already gives a sharp Collatz-Wielandt bound.
  if (const auto [lo, hi] = collatz_wielandt(a, phi); std::isfinite(hi) && hi + shift_margin(hi) < s) {
    s = hi + shift_margin(hi);
  }
  auto solver = std::make_unique<ShiftedSolver>(a, s);
  double lambda = (mu.dot(a * phi)) / mu.dot(phi);

  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd phi_next = solver->solve(phi);
    Eigen::VectorXd mu_next = solver->solve_transpose(mu);
    if (!phi_next.allFinite() || !mu_next.allFinite()) throw NonConvergence("non-finite resolvent iterate");

    rep.right_residual = norm((s - lambda) * phi_next - phi) / norm(phi);
    rep.left_residual = norm.dual((s - lambda) * mu_next - mu) / norm.dual(mu);

    phi = phi_next / phi_next.maxCoeff();
    mu = mu_next / mu_next.sum();
    lambda = mu.dot(a * phi) / mu.dot(phi);
    rep.iterations = it;

    const auto [lo, hi] = collatz_wielandt(a, phi);
    rep.lower_bound = lo;
    rep.upper_bound = hi;
    if (std::max(rep.right_residual, rep.left_residual) <= options.tol) {
      rep.converged = true;
      break;
    }
    if (std::isfinite(hi) && s - hi > 2.0 * shift_margin(hi)) {
      s = hi + shift_margin(hi);
      solver = std::make_unique<ShiftedSolver>(a, s);
    }
  }

  phi /= mu.dot(phi);
  rep.shift = s;
  rep.triple = EigenTriple{lambda, mu, phi};
  rep.generator_residual = norm(a * phi - lambda * phi) / norm(phi);
  if (!rep.converged) throw SlowConvergence(rep);
  return rep;
}

}  // namespace qsd::spectral
