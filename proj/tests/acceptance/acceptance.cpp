// Acceptance run: one PASS/FAIL line per criterion. `acceptance 3 7` runs a
// subset; the exit status is nonzero iff a selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qsd/cli/config.hpp"
#include "qsd/cli/experiments.hpp"
#include "qsd/errors.hpp"
#include "qsd/ldp/cramer.hpp"
#include "qsd/ldp/rate.hpp"
#include "qsd/model/generator.hpp"
#include "qsd/model/lyapunov.hpp"
#include "qsd/simulate/empirical.hpp"
#include "qsd/simulate/ensemble.hpp"
#include "qsd/simulate/steppers.hpp"
#include "qsd/spectral/eigentriple.hpp"
#include "qsd/spectral/gap.hpp"
#include "qsd/spectral/semigroup.hpp"

using namespace qsd;
using model::PotentialField;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kLambdaTol = 1e-3;
constexpr double kDensityL1 = 1e-2;
constexpr double kShiftTol = 1e-10;
constexpr double kOrderSlack = 1e-10;  // monotonicity and convexity
constexpr double kGapDelta = 1.5;
constexpr double kGapRel = 0.05;
constexpr double kGateauxRel = 1e-6;
constexpr double kRateZero = 1e-8;
constexpr double kRatePositive = 1e-3;
constexpr double kReversibleRel = 0.02;
constexpr double kEigenAgreement = 1e-8;
constexpr double kTvMax = 0.05;
constexpr double kTvSeparation = 0.08;
constexpr double kHillTol = 0.1;
constexpr double kDriftExponentRel = 0.15;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator<<(const T& v) {
    s_ << v;
    return *this;
  }
  std::string str() const { return s_.str(); }

 private:
  std::ostringstream s_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Interval {
  model::DomainSpec domain;
  model::GridSpec grid;
  model::GridOperator op;
  explicit Interval(int cells)
      : domain(model::open_box_domain({{0.0, kPi}})),
        grid(domain, {cells}),
        op(model::build_generator(model::OverdampedLangevin{}, grid, domain)) {}
  double h() const { return grid.spacing()[0]; }
  double x(Eigen::Index i) const { return grid.interior_coordinates(static_cast<std::size_t>(i))[0]; }
};

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

model::ScalarField polynomial(std::vector<double> coeffs) {
  return model::ScalarField({model::PolynomialTerm{std::move(coeffs), -1}});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1. Closed-form Dirichlet spectrum of (0, pi).
Outcome interval_eigentriple() {
  const auto t0 = std::chrono::steady_clock::now();
  const Interval iv(400);
  const auto r = spectral::principal_eigentriple(iv.op, PotentialField::zeros(iv.op.dim()));
  const double elapsed = seconds_since(t0);
  const auto& t = r.triple;
  const Eigen::VectorXd qed = t.phi.cwiseProduct(t.mu) / t.phi.dot(t.mu);
  double phi_l1 = 0.0, mu_l1 = 0.0, qed_l1 = 0.0;
  for (Eigen::Index i = 0; i < t.mu.size(); ++i) {
    const double s = std::sin(iv.x(i));
    phi_l1 += std::abs(t.phi[i] - 4.0 / kPi * s) * iv.h();
    mu_l1 += std::abs(t.mu[i] - 0.5 * s * iv.h());
    qed_l1 += std::abs(qed[i] - 2.0 / kPi * s * s * iv.h());
  }
  Outcome o;
  o.pass = std::abs(t.lambda + 0.5) <= kLambdaTol && phi_l1 <= kDensityL1 && mu_l1 <= kDensityL1 &&
           qed_l1 <= kDensityL1 && elapsed < 10.0;
  o.detail = (Detail() << "Lambda " << t.lambda << ", L1 phi " << phi_l1 << " mu " << mu_l1 << " qed " << qed_l1
                       << ", " << elapsed << " s")
                 .str();
  return o;
}

// 2. Shift, monotonicity, convexity and the strict bound over random V.
Outcome eigenvalue_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  const Interval iv(100);
  const auto qdomain = model::open_box_domain({{-1.5, 1.5}});
  const model::GridSpec qgrid(qdomain, {120});
  const auto qop =
      model::build_generator(model::OverdampedLangevin{polynomial({0.0, 0.0, 0.0, 0.0, 2.0}), {}}, qgrid, qdomain);

  std::mt19937_64 gen(20240611);
  double shift_err = 0.0, mono = 0.0, convex = 0.0, strict = -1e300;
  int samples = 0;
  for (const model::GridOperator* op : {&iv.op, &qop}) {
    const std::size_t n = op->dim();
    for (int k = 0; k < 100; ++k, ++samples) {
      const auto V = random_potential(n, 3.0, gen);
      const auto V1 = random_potential(n, 3.0, gen);
      const double l = spectral::principal_eigentriple(*op, V).triple.lambda;
      const double c = 1.7;
      shift_err = std::max(shift_err, std::abs(spectral::principal_eigentriple(*op, V.shifted(c)).triple.lambda - l - c));
      std::vector<double> up(n), mid(n);
      for (std::size_t i = 0; i < n; ++i) {
        up[i] = V[i] + std::abs(V1[i]);
        mid[i] = 0.5 * (V[i] + V1[i]);
      }
      mono = std::max(mono, l - spectral::principal_eigentriple(*op, PotentialField(up)).triple.lambda);
      const double l1 = spectral::principal_eigentriple(*op, V1).triple.lambda;
      const double lm = spectral::principal_eigentriple(*op, PotentialField(mid)).triple.lambda;
      convex = std::max(convex, lm - 0.5 * (l + l1));
      strict = std::max(strict, l - V.max());
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = shift_err <= kShiftTol && mono <= kOrderSlack && convex <= kOrderSlack && strict < 0.0 && elapsed < 120.0;
  o.detail = (Detail() << samples << " potentials: shift error " << shift_err << ", worst monotonicity violation "
                       << mono << ", convexity violation " << convex << ", max(Lambda - max V) " << strict << ", "
                       << elapsed << " s")
                 .str();
  return o;
}

// 3. Gap constants of interval Brownian motion.
Outcome spectral_gap() {
  const Interval iv(400);
  const auto zero = PotentialField::zeros(iv.op.dim());
  const auto unit = model::WeightFunction::unit(iv.op.dim());
  const auto r = spectral::principal_eigentriple(iv.op, zero);
  const auto n = static_cast<Eigen::Index>(iv.op.dim());
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n), ramp(n), bump(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ramp[i] = 1.0 + iv.x(i) / kPi;
    bump[i] = iv.x(i) < 1.0 ? 1.0 : 0.0;
  }
  const auto est = spectral::gap_estimate(iv.op, zero, unit, r.triple, {ones, ramp, bump}, 12.0);
  double excess = 0.0;
  for (const auto& c : est.curves) {
    for (std::size_t k = 0; k < c.valid_count; ++k) {
      excess = std::max(excess, c.rho[k] / (est.C * std::exp(-est.delta * c.times[k])) - 1.0);
    }
  }
  Outcome o;
  o.pass = std::abs(est.delta - kGapDelta) <= kGapRel * kGapDelta && excess <= 1e-12;
  o.detail = (Detail() << "delta " << est.delta << ", C " << est.C << ", window [" << est.fit_start << ", "
                       << est.fit_end << "], worst rho / bound - 1 = " << excess)
                 .str();
  return o;
}

// 4. Derivative of the Cramer functional against the twisted q.e.d.
Outcome gateaux_identity() {
  const Interval iv(400);
  const ldp::CramerFunctional F(iv.op);
  const std::size_t n = iv.op.dim();
  std::mt19937_64 gen(4242);
  double worst = 0.0;
  int mismatches = 0;
  for (int k = 0; k < 20; ++k) {
    const auto V0 = random_potential(n, 1.0, gen);
    const auto V1 = random_signs(n, gen);
    try {
      worst = std::max(worst, ldp::gateaux(F, V0, V1).relative_error);
    } catch (const DerivativeMismatch&) {
      ++mismatches;
    }
  }
  Outcome o;
  o.pass = mismatches == 0 && worst <= kGateauxRel;
  o.detail = (Detail() << "20 pairs, max relative error " << worst << ", mismatches " << mismatches).str();
  return o;
}

// 5. Rate function zero at the q.e.d. and positive off it.
Outcome rate_zero() {
  const Interval iv(400);
  const ldp::CramerFunctional F(iv.op);
  const auto pi = ldp::qed(F.reference().triple).density;
  const auto n = static_cast<Eigen::Index>(F.dim());
  const auto at_qed = ldp::rate_function(F, pi);
  const Eigen::VectorXd mix = 0.9 * pi + 0.1 * Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const auto off = ldp::rate_function(F, mix);
  Outcome o;
  o.pass = at_qed.value >= 0.0 && at_qed.value <= kRateZero && off.value >= kRatePositive;
  o.detail = (Detail() << "I(qed) " << at_qed.value << ", I(0.9 qed + 0.1 uniform) " << off.value).str();
  return o;
}

// 6. Legendre transform against the Dirichlet form, quartic potential.
Outcome reversible() {
  const auto t0 = std::chrono::steady_clock::now();
  auto config = cli::load_config(std::string(QSD_SOURCE_DIR) + "/configs/reversible_quartic.json");
  config.experiment = "ldp";
  config.output_dir = (fs::temp_directory_path() / "qsd_acceptance_reversible").string();
  const auto report = cli::run(config);
  const double elapsed = seconds_since(t0);
  Outcome o;
  Detail d;
  double worst = 0.0;
  int densities = 0;
  for (const auto& [name, m] : report.metrics) {
    if (name.rfind("ldp.rate.", 0) != 0) continue;
    const auto closed = report.metrics.find("ldp.reversible." + name.substr(9));
    if (closed == report.metrics.end()) continue;
    ++densities;
    const double rel = std::abs(m.value - closed->second.value) / std::abs(closed->second.value);
    worst = std::max(worst, rel);
    d << name.substr(9) << " " << m.value << "/" << closed->second.value << "  ";
  }
  const auto agreement = report.metrics.find("ldp.eigen_agreement");
  const double agree = agreement == report.metrics.end() ? 1.0 : agreement->second.value;
  o.pass = densities == 5 && worst <= kReversibleRel && agree <= kEigenAgreement && elapsed < 300.0;
  d << "max rel " << worst << ", |lambda_D + Lambda(0)|/lambda_D " << agree << ", " << elapsed << " s";
  o.detail = d.str();
  return o;
}

// 7. Conditioned occupation vs terminal law by rejection sampling.
Outcome qsd_qed_separation() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto domain = model::open_box_domain({{0.0, kPi}});
  const simulate::Histogram bins({{0.0, kPi}}, {40});
  simulate::McOptions mc;
  mc.dt = 1e-4;
  mc.T = 6.0;
  mc.n_paths = 1600000;
  mc.rng.master_seed = 7007;
  const auto e = simulate::rejection_conditional_ensemble(model::OverdampedLangevin{}, domain,
                                                          simulate::InitialLaw::dirac({kPi / 2}), mc, bins);
  const auto sin2 = simulate::reference_measure(bins, [](std::span<const double> x) { return std::pow(std::sin(x[0]), 2); });
  const auto sin1 = simulate::reference_measure(bins, [](std::span<const double> x) { return std::sin(x[0]); });
  const double occ = simulate::total_variation(e.mean_occupation, sin2);
  const double term = simulate::total_variation(e.terminal_marginal, sin1);
  const double sep = simulate::total_variation(e.mean_occupation, e.terminal_marginal);
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = !e.too_few_survivors && occ <= kTvMax && term <= kTvMax && sep >= kTvSeparation && elapsed < 900.0;
  o.detail = (Detail() << mc.n_paths << " paths, " << e.n_survivors << " survivors: TV(occupation, sin^2) " << occ
                       << ", TV(terminal, sin) " << term << ", TV(occupation, terminal) " << sep << " (oracle "
                       << simulate::total_variation(sin2, sin1) << "), " << elapsed << " s")
                 .str();
  return o;
}

// 8. Feynman-Kac Monte Carlo against the spectral Lambda_D(V).
Outcome feynman_kac() {
  const Interval iv(800);
  const model::ScalarField zero;
  const model::ScalarField half_sine({model::SineTerm{0.5, 1.0, 0.0, 0, 1}});
  const std::vector<model::ScalarField> fields{zero, half_sine};
  const std::vector<std::string> tags{"V=0", "V=sin/2"};

  simulate::McOptions fine;
  fine.dt = 1e-4;
  fine.T = 4.0;
  fine.n_paths = 400000;
  fine.rng.master_seed = 8008;
  auto coarse = fine;
  coarse.dt = 4.0 * fine.dt;
  coarse.rng.master_seed = 8009;
  const auto nu = simulate::InitialLaw::dirac({kPi / 2});
  const auto a = simulate::feynman_kac_mc(model::OverdampedLangevin{}, iv.domain, fields, nu, fine);
  const auto b = simulate::feynman_kac_mc(model::OverdampedLangevin{}, iv.domain, fields, nu, coarse);

  Outcome o;
  Detail d;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto V = PotentialField::sample(fields[k], iv.grid);
    const auto r = spectral::principal_eigentriple(iv.op, V);
    const double tol = std::max(0.5 * (r.upper_bound - r.lower_bound), 1e-10);
    const auto x = simulate::extrapolate_sqrt_dt(a[k].slope, b[k].slope, 4.0);
    const bool ok = std::abs(x.value - r.triple.lambda) <= x.ci + tol;
    o.pass = o.pass && ok;
    d << tags[k] << ": MC " << x.value << " +- " << x.ci << " (dt " << fine.dt << ": " << a[k].slope.value
      << "), spectral " << r.triple.lambda << (ok ? "" : " OUTSIDE") << "; ";
  }
  o.detail = d.str();
  return o;
}

double hill(std::vector<double> x, std::size_t k) {
  for (double& v : x) v = std::abs(v);
  std::nth_element(x.begin(), x.end() - static_cast<long>(k) - 1, x.end());
  const double threshold = *(x.end() - static_cast<long>(k) - 1);
  double s = 0.0;
  for (auto it = x.end() - static_cast<long>(k); it != x.end(); ++it) s += std::log(*it / threshold);
  return static_cast<double>(k) / s;
}

// 9. Stable increments, stencil row sums, exit tail and Lyapunov drift.
Outcome stable_machinery() {
  Outcome o;
  Detail d;

  d << "Hill";
  for (double alpha : {0.5, 1.0, 1.5}) {
    simulate::Rng rng(900 + static_cast<std::uint64_t>(10 * alpha));
    std::vector<double> x(1000000);
    double inc[1];
    for (auto& v : x) {
      simulate::stable_increment(alpha, 1.0, 0.01, inc, rng);
      v = inc[0];
    }
    const double est = hill(std::move(x), 10000);
    o.pass = o.pass && std::abs(est - alpha) <= kHillTol;
    d << " " << alpha << ":" << est;
  }

  double row_max = -1e300;
  std::size_t rows = 0;
  for (double alpha : {0.5, 1.0, 1.5, 1.9}) {
    const auto dom = model::open_box_domain({{-1.0, 1.0}});
    const model::GridSpec g(dom, {200});
    const auto op = model::build_generator(model::StableSDE{polynomial({0.0, 0.0, 0.5}), alpha, 1.0}, g, dom);
    row_max = std::max(row_max, op.row_sums().maxCoeff());
    rows += op.dim();
  }
  {
    const auto dom = model::DomainSpec({{-1.0, 1.0}, {-1.0, 1.0}}, model::OpenBall{{0.0, 0.0}, 0.9});
    const model::GridSpec g(dom, {40, 40});
    const auto op = model::build_generator(model::StableSDE{model::ScalarField(), 1.2, 1.0}, g, dom);
    row_max = std::max(row_max, op.row_sums().maxCoeff());
    rows += op.dim();
  }
  o.pass = o.pass && row_max <= 0.0;
  d << "; max row sum over " << rows << " rows " << row_max;

  // Lyapunov weight V = W^p for U = x^4, beta = 2, theta = 0.2.
  const double alpha = 1.5, beta = 2.0, theta = 0.2;
  const model::StableSDE process{polynomial({0.0, 0.0, 0.0, 0.0, 1.0}), alpha, 1.0};
  const auto box = model::open_box_domain({{-8.0, 8.0}});
  const model::GridSpec grid(box, {1600});
  const auto op = model::build_generator(process, grid, box);
  const model::StableLyapunovParams params{beta, theta, 2.0};
  const auto W = model::WeightFunction::stable_lyapunov(grid, params, alpha);
  const double radii[] = {1.0, 2.0, 4.0, 6.0};
  const auto lyap = model::lyapunov_check(op, grid, W, params.p, radii);
  const double exponent = beta * theta + 2.0 * beta - 2.0;
  const bool drift_ok = std::abs(lyap.drift_exponent - exponent) <= kDriftExponentRel * exponent;
  o.pass = o.pass && drift_ok && lyap.diverges;
  d << "; drift exponent " << lyap.drift_exponent << " vs " << exponent;

  // P_x[sigma_R <= t] <= e^{c1 t} V(x) / R, sigma_R the first time V(X) >= R.
  const double k = beta * theta;
  const double c1 = std::max(lyap.growth_constant, 0.0);
  const double x0[] = {0.5};
  const double Vx = model::stable_lyapunov_base(x0, k);
  d << "; c1 " << c1 << ", tail";
  for (double R : {5.0, 10.0, 20.0}) {
    const double radius = std::pow(R - 2.0, 1.0 / k);
    const auto ball = model::open_box_domain({{-radius, radius}});
    simulate::McOptions mc;
    mc.dt = 1e-3;
    mc.T = 1.0;
    mc.n_paths = 40000;
    mc.rng.master_seed = 9000 + static_cast<std::uint64_t>(R);
    const auto curve = simulate::survival_curve(process, ball, simulate::InitialLaw::dirac({x0[0]}), mc, 4);
    bool ok = true;
    double worst = -1e300;
    for (std::size_t j = 1; j < curve.times.size(); ++j) {
      const double p = 1.0 - curve.survival(j);
      const double ci = simulate::kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(curve.n_paths));
      const double bound = std::exp(c1 * curve.times[j]) * Vx / R;
      ok = ok && p - ci <= bound;
      worst = std::max(worst, p / bound);
    }
    o.pass = o.pass && ok;
    d << " R=" << R << ":" << worst << (ok ? "" : "!");
  }
  d << " (max P/bound)";
  o.detail = d.str();
  return o;
}

// 10. Byte-identical artifacts at 1 and 8 threads.
Outcome determinism() {
  const std::string config = std::string(QSD_SOURCE_DIR) + "/configs/interval_brownian.json";
  const fs::path root = fs::temp_directory_path() / "qsd_acceptance_determinism";
  fs::remove_all(root);
  int status[2] = {0, 0};
  const int threads[2] = {1, 8};
  for (int i = 0; i < 2; ++i) {
    const std::string cmd = std::string("\"") + QSD_TOOL + "\" validate --config \"" + config + "\" --threads " +
                            std::to_string(threads[i]) + " --out \"" + (root / std::to_string(threads[i])).string() +
                            "\" > /dev/null 2>&1";
    status[i] = std::system(cmd.c_str());
  }
  Outcome o;
  int files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(root / "1")) {
    const auto name = e.path().filename();
    if (name == "timing.txt") continue;
    ++files;
    if (!fs::exists(root / "8" / name) || slurp(e.path()) != slurp(root / "8" / name)) ++differing;
  }
  o.pass = status[0] == 0 && status[1] == 0 && files >= 8 && differing == 0;
  o.detail = (Detail() << files << " CSV/JSON artifacts compared, " << differing << " differ").str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"interval Brownian eigentriple", interval_eigentriple},
      {"eigenvalue invariants", eigenvalue_invariants},
      {"spectral gap bound", spectral_gap},
      {"Gateaux identity", gateaux_identity},
      {"rate function zero", rate_zero},
      {"reversible identification", reversible},
      {"q.s.d. vs q.e.d. by Monte Carlo", qsd_qed_separation},
      {"Feynman-Kac cross-validation", feynman_kac},
      {"stable machinery", stable_machinery},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::printf("%s  criterion %2d  %-32s %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
