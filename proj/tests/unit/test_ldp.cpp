#include <cmath>
#include <random>

#include "doctest.h"
#include "qsd/errors.hpp"
#include "qsd/ldp/cramer.hpp"
#include "qsd/ldp/rate.hpp"
#include "qsd/ldp/reversible.hpp"
#include "support.hpp"

using namespace qsd;
using namespace qsd::ldp;
using model::PotentialField;
using qsd::test::kPi;

namespace {

Eigen::VectorXd to_vector(const PotentialField& p) {
  return Eigen::Map<const Eigen::VectorXd>(p.values().data(), static_cast<Eigen::Index>(p.size()));
}

PotentialField random_potential(std::size_t n, double amplitude, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return PotentialField(v);
}

PotentialField random_signs(std::size_t n, std::mt19937_64& gen) {
  std::bernoulli_distribution b(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = b(gen) ? 1.0 : -1.0;
  return PotentialField(v);
}

double objective(const CramerFunctional& F, const Eigen::VectorXd& beta, const PotentialField& V) {
  return beta.dot(to_vector(V)) - F(V);
}

model::ScalarField reversible_potential() {
  return model::ScalarField({model::PolynomialTerm{{0.0, 0.0, 0.5, 0.0, 0.25}, -1}});
}

}  // namespace

TEST_CASE("Cramer functional") {
  const test::IntervalBrownian bm(200);
  const CramerFunctional F(bm.op);
  const std::size_t n = bm.op.dim();
  CHECK(F(PotentialField::zeros(n)) == 0.0);
  CHECK(F(PotentialField::zeros(n).shifted(0.8)) == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(F.reference_lambda0() == doctest::Approx(-0.5).epsilon(1e-3));

  std::mt19937_64 gen(4);
  const auto V = random_potential(n, 1.0, gen);
  CHECK(std::abs(F(V.shifted(-0.3)) - F(V) + 0.3) <= 1e-10);
}

TEST_CASE("quasi-ergodic distribution") {
  SUBCASE("one cell") {
    model::SparseRowMatrix m(1, 1);
    m.insert(0, 0) = -2.0;
    const auto r = spectral::principal_eigentriple(model::GridOperator(m), PotentialField({0.0}));
    CHECK(qed(r.triple).density[0] == doctest::Approx(1.0));
  }

  SUBCASE("interval: density proportional to sin^2") {
    const test::IntervalBrownian bm(400);
    const auto r = spectral::principal_eigentriple(bm.op, PotentialField::zeros(bm.op.dim()));
    const auto pi = qed(r.triple).density;
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pi.minCoeff() > 0.0);
    double l1 = 0.0;
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
      const double x = bm.x(static_cast<std::size_t>(i));
      l1 += std::abs(pi[i] - 2.0 / kPi * std::sin(x) * std::sin(x) * bm.h());
    }
    CHECK(l1 <= 1e-2);
  }
}

TEST_CASE("Gateaux derivative") {
  const test::IntervalBrownian bm(400);
  const CramerFunctional F(bm.op);
  const std::size_t n = bm.op.dim();
  const auto zero = PotentialField::zeros(n);

  SUBCASE("constant direction") {
    const auto g = gateaux(F, zero, zero.shifted(1.0));
    CHECK(g.identity == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.relative_error <= 1e-6);
  }

  SUBCASE("indicator of the left half") {
    const model::ScalarField half({model::IndicatorTerm{{{0.0, kPi / 2}}, 1.0}});
    const auto V1 = PotentialField::sample(half, bm.grid);
    const auto g = gateaux(F, zero, V1);
    CHECK(std::abs(g.identity - 0.5) <= 1e-12);
    CHECK(g.central_difference == doctest::Approx(0.5).epsilon(1e-6));
  }

  SUBCASE("random directions, q.e.d. against finite differences") {
    std::mt19937_64 gen(2024);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const auto V0 = random_potential(n, 1.0, gen);
      const auto V1 = random_signs(n, gen);
      const auto g = gateaux(F, V0, V1, 1e-3, 1e-6);
      const auto twisted = qed(F.solve(V0).triple).density;
      CHECK(std::abs(g.identity - twisted.dot(to_vector(V1))) <= 1e-10);
      worst = std::max(worst, g.relative_error);
    }
    MESSAGE("max relative error " << worst);
    CHECK(worst <= 1e-6);
  }

  SUBCASE("mismatch is reported") {
    std::mt19937_64 gen(5);
    const auto V1 = random_signs(n, gen);
    // A huge step makes the central difference biased.
    CHECK_THROWS_AS(gateaux(F, zero, V1, 3.0, 1e-6), DerivativeMismatch);
  }
}

TEST_CASE("rate function") {
  const test::IntervalBrownian bm(60);
  const CramerFunctional F(bm.op);
  const std::size_t n = bm.op.dim();
  const auto pi = qed(F.reference().triple).density;

  SUBCASE("zero at the q.e.d.") {
    const auto r = rate_function(F, pi);
    CHECK(r.value >= 0.0);
    CHECK(r.value <= 1e-8);
    CHECK(r.converged);
    CHECK(r.maximizer.sup_norm() <= 1e-6);
  }

  SUBCASE("positive away from the q.e.d.") {
    const Eigen::VectorXd mix = 0.9 * pi + 0.1 * Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / n);
    const auto r = rate_function(F, mix);
    CHECK(r.value >= 1e-3);
    CHECK(r.value == doctest::Approx(objective(F, mix, r.maximizer)).epsilon(1e-12));
  }

  SUBCASE("Dirac mass: box active and growing with the bound") {
    Eigen::VectorXd dirac = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    dirac[20] = 1.0;
    double previous = 0.0;
    for (double M : {5.0, 10.0, 20.0}) {
      RateOptions o;
      o.bound = M;
      o.max_iterations = 3000;
      const auto r = rate_function(F, dirac, o);
      CHECK(r.box_active);
      CHECK(r.value > previous);
      CHECK(r.maximizer.sup_norm() <= M * (1.0 + 1e-12));
      previous = r.value;
    }
  }

  SUBCASE("shifting the initial guess changes nothing") {
    Eigen::VectorXd beta = pi;
    for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] *= 1.0 + 0.5 * std::sin(3.0 * bm.x(static_cast<std::size_t>(i)));
    beta /= beta.sum();
    RateOptions a, b;
    a.initial_V = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    b.initial_V = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 2.5);
    const auto ra = rate_function(F, beta, a);
    const auto rb = rate_function(F, beta, b);
    CHECK(ra.value == doctest::Approx(rb.value).epsilon(1e-9));
  }

  SUBCASE("objective is concave along segments") {
    std::mt19937_64 gen(77);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / n);
    for (int k = 0; k < 10; ++k) {
      const auto Va = random_potential(n, 3.0, gen);
      const auto Vb = random_potential(n, 3.0, gen);
      const auto mid = Va.axpy(1.0, Vb).axpy(-0.5, Va).axpy(-0.5, Vb);
      CHECK(objective(F, beta, mid) >= 0.5 * (objective(F, beta, Va) + objective(F, beta, Vb)) - 1e-10);
    }
  }

  SUBCASE("mass on absorbing nodes gives an infinite rate") {
    Eigen::VectorXd on_nodes = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bm.grid.node_count()));
    on_nodes[0] = 0.5;
    on_nodes[30] = 0.5;
    const auto r = rate_function(F, bm.grid, on_nodes);
    CHECK(r.infinite);
    CHECK(std::isinf(r.value));
  }
}

TEST_CASE("reversible closed form") {
  SUBCASE("Brownian motion: uniform Gibbs measure") {
    const test::IntervalBrownian bm(400);
    const DirichletFormContext ctx(model::ScalarField(), bm.grid);
    CHECK(ctx.detailed_balance_defect() <= 1e-14);
    const double lambda = dirichlet_eigenvalue(ctx);
    CHECK(std::abs(lambda - 0.5) <= 1e-3);
    const auto r = spectral::principal_eigentriple(ctx.generator(), PotentialField::zeros(bm.op.dim()));
    CHECK(std::abs(lambda + r.triple.lambda) <= 1e-8 * lambda);

    // beta = pi_D has zero rate.
    const auto z = reversible_rate(qed(r.triple).density, ctx, lambda);
    CHECK(std::abs(z.value) <= 1e-6);

    // Constant h: only the boundary killing term of the form survives.
    const Eigen::VectorXd flat = ctx.pi();
    const auto c = reversible_rate(flat, ctx, lambda);
    CHECK(c.energy == doctest::Approx(ctx.pi().dot(ctx.killing())).epsilon(1e-12));
    CHECK(c.energy == doctest::Approx(ctx.form(Eigen::VectorXd::Ones(flat.size()))).epsilon(1e-14));
    CHECK(c.value > 0.0);

    // Mass outside D.
    Eigen::VectorXd on_nodes = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bm.grid.node_count()));
    on_nodes[0] = 0.1;
    on_nodes[100] = 0.9;
    CHECK(reversible_rate(bm.grid, on_nodes, ctx).infinite);
  }

  SUBCASE("absorbing far boundary forces a positive eigenvalue") {
    const auto domain = model::open_box_domain({{-1.0, 1.5}});
    const model::GridSpec grid(domain, {80});
    const DirichletFormContext ctx(reversible_potential(), grid);
    CHECK(dirichlet_eigenvalue(ctx) > 0.0);
    CHECK(ctx.detailed_balance_defect() <= 1e-14);
    CHECK(ctx.pi().sum() == doctest::Approx(1.0));
  }

  SUBCASE("Legendre transform agrees with the closed form") {
    const auto domain = model::open_box_domain({{-1.0, 1.5}});
    const model::GridSpec grid(domain, {80});
    const DirichletFormContext ctx(reversible_potential(), grid);
    const CramerFunctional F(ctx.generator());
    const double lambda = dirichlet_eigenvalue(ctx);
    CHECK(std::abs(lambda + F.reference_lambda0()) <= 1e-8 * lambda);

    Eigen::VectorXd beta = ctx.pi();
    for (Eigen::Index i = 0; i < beta.size(); ++i) {
      const double x = grid.interior_coordinates(static_cast<std::size_t>(i))[0];
      const double g = std::sin(kPi * (x + 1.0) / 2.5) + 0.5 * std::sin(2.0 * kPi * (x + 1.0) / 2.5);
      beta[i] *= g * g;
    }
    beta /= beta.sum();
    RateOptions o;
    o.bound = 50.0;
    o.tol = 1e-7;
    const auto legendre = rate_function(F, beta, o);
    const auto closed = reversible_rate(beta, ctx, lambda);
    MESSAGE("Legendre " << legendre.value << " closed form " << closed.value << " iterations " << legendre.iterations);
    CHECK(legendre.value == doctest::Approx(closed.value).epsilon(0.02));
    CHECK(legendre.value <= closed.value * (1.0 + 1e-9));
  }
}
