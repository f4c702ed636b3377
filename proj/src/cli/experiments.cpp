#include "qsd/cli/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <exception>
#include <memory>
#include <thread>

#include "qsd/cli/csv.hpp"
#include "qsd/errors.hpp"
#include "qsd/ldp/cramer.hpp"
#include "qsd/ldp/rate.hpp"
#include "qsd/ldp/reversible.hpp"
#include "qsd/model/generator.hpp"
#include "qsd/model/lyapunov.hpp"
#include "qsd/simulate/ensemble.hpp"
#include "qsd/spectral/eigentriple.hpp"
#include "qsd/spectral/gap.hpp"

namespace qsd::cli {

RunConfig apply_overrides(const RunConfig& config, const Overrides& o) {
  RunConfig c = config;
  if (o.experiment) c.experiment = *o.experiment;
  if (o.seed) c.master_seed = *o.seed;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.threads) c.threads = *o.threads;
  return parse_config(to_json(c));
}

simulate::EmpiricalMeasure bin_node_measure(const model::GridSpec& grid, const Eigen::VectorXd& interior_mass,
                                            const simulate::Histogram& binning) {
  const int dh = binning.dim();
  if (dh > grid.dim()) throw InvalidSpec("histogram has more axes than the lattice");
  if (interior_mass.size() != static_cast<Eigen::Index>(grid.interior_count())) {
    throw InvalidSpec("one mass per interior node is required");
  }
  std::vector<double> masses(binning.cell_count(), 0.0);
  std::vector<std::vector<std::pair<std::size_t, double>>> parts(static_cast<std::size_t>(dh));
  for (std::size_t k = 0; k < grid.interior_count(); ++k) {
    const auto x = grid.interior_coordinates(k);
    bool placed = true;
    for (int a = 0; a < dh; ++a) {
      auto& p = parts[static_cast<std::size_t>(a)];
      p.clear();
      const auto& b = binning.bounds()[static_cast<std::size_t>(a)];
      const double half = 0.5 * grid.spacing()[static_cast<std::size_t>(a)];
      const double lo = std::max(x[static_cast<std::size_t>(a)] - half, b.lo);
      const double hi = std::min(x[static_cast<std::size_t>(a)] + half, b.hi);
      if (!(hi > lo)) {
        placed = false;
        break;
      }
      const double w = binning.width(a);
      const int nb = binning.bins()[static_cast<std::size_t>(a)];
      const int first = std::clamp(static_cast<int>(std::floor((lo - b.lo) / w)), 0, nb - 1);
      const int last = std::clamp(static_cast<int>(std::floor((hi - b.lo) / w)), 0, nb - 1);
      for (int j = first; j <= last; ++j) {
        const double overlap = std::min(hi, b.lo + (j + 1) * w) - std::max(lo, b.lo + j * w);
        if (overlap > 0.0) p.emplace_back(static_cast<std::size_t>(j), overlap / (hi - lo));
      }
    }
    if (!placed) continue;
    // tensor product of the per-axis splits
    std::vector<std::size_t> pos(static_cast<std::size_t>(dh), 0);
    while (true) {
      std::size_t cell = 0;
      std::size_t stride = 1;
      double frac = interior_mass[static_cast<Eigen::Index>(k)];
      for (int a = 0; a < dh; ++a) {
        const auto& [bin, f] = parts[static_cast<std::size_t>(a)][pos[static_cast<std::size_t>(a)]];
        cell += bin * stride;
        stride *= static_cast<std::size_t>(binning.bins()[static_cast<std::size_t>(a)]);
        frac *= f;
      }
      masses[cell] += frac;
      int a = 0;
      while (a < dh && ++pos[static_cast<std::size_t>(a)] == parts[static_cast<std::size_t>(a)].size()) {
        pos[static_cast<std::size_t>(a)] = 0;
        ++a;
      }
      if (a == dh) break;
    }
  }
  double total = 0.0;
  for (double m : masses) total += m;
  if (total > 0.0) {
    for (double& m : masses) m /= total;
  }
  return simulate::EmpiricalMeasure{binning, std::move(masses), total};
}

namespace {

namespace fs = std::filesystem;

// Seeds of the independent random experiments, all derived from the master seed.
enum class Stream : std::uint64_t { ensemble = 0, coarse = 1, fleming_viot = 2, gateaux = 3, probes = 4 };

simulate::RngPolicy policy(std::uint64_t master, Stream s) {
  if (s == Stream::ensemble) return simulate::RngPolicy{master};
  return simulate::RngPolicy{simulate::RngPolicy::mix(master ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s)))};
}

/// 95% scale of the sampling noise of a histogram estimate from n draws:
/// z/2 sum_k sqrt(p_k (1 - p_k) / n).
double tv_noise(const std::vector<double>& p, double n) {
  if (!(n > 0.0)) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (double q : p) s += std::sqrt(std::max(0.0, q * (1.0 - q)) / n);
  return 0.5 * simulate::kZ95 * s;
}

Eigen::VectorXd sample_field(const model::ScalarField& f, const model::GridSpec& grid) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.interior_count()));
  for (std::size_t k = 0; k < grid.interior_count(); ++k) v[static_cast<Eigen::Index>(k)] = f.value(grid.interior_coordinates(k));
  return v;
}

model::PotentialField as_potential(const Eigen::VectorXd& v) {
  return model::PotentialField(std::vector<double>(v.data(), v.data() + v.size()));
}

/// Tolerance of an eigenvalue: half the Collatz-Wielandt bracket, which
/// encloses Lambda, or the solver tolerance when that is larger.
double lambda_tolerance(const spectral::EigenReport& r, double tol) {
  return std::max(0.5 * std::abs(r.upper_bound - r.lower_bound), tol * std::max(1.0, std::abs(r.triple.lambda)));
}

class Runner {
 public:
  explicit Runner(const RunConfig& c)
      : c_(c), out_(c.output_dir), process_(make_process(c.model)), domain_(make_domain(c.model)) {
    fs::create_directories(out_);
  }

  MetricMap& metrics() { return metrics_; }

  bool has_lattice() const { return !c_.model.grid.cells.empty(); }

  void spectral(bool full) {
    lattice();
    const auto& r = *reference_;
    metrics_["spectral.lambda"] = {r.triple.lambda, lambda_tolerance(r, c_.solver.tol)};
    metrics_["spectral.residual"] = {std::max(r.right_residual, r.left_residual), 0.0};
    metrics_["spectral.row_sum_max"] = {op_.row_sums().maxCoeff(), 0.0};
    for (const auto& p : c_.simulation.potentials) {
      const auto rep = solve(sample_field(make_field(p.terms), *grid_));
      metrics_["spectral.lambda." + p.tag] = {rep.triple.lambda, lambda_tolerance(rep, c_.solver.tol)};
    }
    if (!full) return;

    const Eigen::VectorXd twist = sample_field(make_field(c_.solver.twist), *grid_);
    const auto& tw = c_.solver.twist.empty() ? r : *(twisted_ = std::make_unique<spectral::EigenReport>(solve(twist)));
    if (!c_.solver.twist.empty()) {
      metrics_["spectral.lambda.twist"] = {tw.triple.lambda, lambda_tolerance(tw, c_.solver.tol)};
    }
    write_eigentriple(tw);
    if (c_.solver.export_operator) {
      std::ofstream os(out_ / "operator.txt", std::ios::binary);
      op_.write_triplets(os);
    }
    if (c_.solver.gap_horizon > 0.0) gap(tw, twist);
    if (c_.solver.survival_horizon > 0.0) survival();
    if (c_.model.weight.type == "stable_lyapunov") lyapunov();
  }

  void simulate() {
    const auto& s = c_.simulation;
    const auto nu = simulate::InitialLaw::dirac(s.x0);
    std::vector<model::Interval> hb(c_.model.domain.box.begin(), c_.model.domain.box.begin() + static_cast<long>(s.bins.size()));
    const simulate::Histogram hist(hb, s.bins);
    std::optional<simulate::EmpiricalMeasure> qed_ref, qsd_ref;
    if (has_lattice()) {
      lattice();
      const auto& t = reference_->triple;
      qsd_ref = bin_node_measure(*grid_, t.mu, hist);
      qed_ref = bin_node_measure(*grid_, ldp::qed(t).density, hist);
    }
    simulate::McOptions mc{s.dt, s.T, s.n_paths, policy(c_.master_seed, Stream::ensemble), c_.threads};

    if (s.n_paths > 0) {
      const auto e = simulate::rejection_conditional_ensemble(process_, domain_, nu, mc, hist, s.min_survivors);
      const double ns = static_cast<double>(e.n_survivors);
      metrics_["mc.survival_prob"] = {e.survival_prob, e.survival_ci};
      metrics_["mc.n_survivors"] = {ns, 0.0};
      const double noise = tv_noise(e.terminal_marginal.masses, ns);
      metrics_["mc.tv_occupation_terminal"] = {simulate::total_variation(e.mean_occupation, e.terminal_marginal),
                                               noise + tv_noise(e.mean_occupation.masses, ns)};
      if (qed_ref) {
        metrics_["mc.tv_occupation_vs_qed"] = {simulate::total_variation(e.mean_occupation, *qed_ref),
                                               tv_noise(e.mean_occupation.masses, ns)};
        metrics_["mc.tv_terminal_vs_qsd"] = {simulate::total_variation(e.terminal_marginal, *qsd_ref), noise};
      }
      write_ensemble(hist, e, qed_ref, qsd_ref);

      if (s.records > 0) {
        const auto curve = simulate::survival_curve(process_, domain_, nu, mc, s.records);
        CsvWriter w((out_ / "survival.csv").string(), {"t", "log_survival", "ci"});
        for (std::size_t j = 0; j < curve.times.size(); ++j) {
          const auto ls = curve.log_survival(j);
          w << curve.times[j] << ls.value << ls.ci;
          w.end_row();
        }
        const auto sl = curve.slope(s.records / 2, s.records);
        metrics_["mc.survival_slope"] = {sl.value, sl.ci};
      }
      if (!s.potentials.empty()) feynman_kac(nu, mc);
    }
    if (s.fv_particles > 0) fleming_viot(nu, hist, qsd_ref);
  }

  void ldp() {
    lattice();
    const auto& l = c_.ldp;
    std::unique_ptr<ldp::DirichletFormContext> ctx;
    const model::GridOperator* op = &op_;
    if (l.reversible) {
      ctx = std::make_unique<ldp::DirichletFormContext>(make_field(c_.model.potential), *grid_);
      op = &ctx->generator();
      metrics_["ldp.detailed_balance_defect"] = {ctx->detailed_balance_defect(), 0.0};
    }
    const ldp::CramerFunctional F(*op, eigen_options());
    const auto& ref = F.reference();
    metrics_["ldp.lambda0"] = {ref.triple.lambda, lambda_tolerance(ref, c_.solver.tol)};
    const Eigen::VectorXd pi = ldp::qed(ref.triple).density;
    {
      CsvWriter w((out_ / "qed.csv").string(), node_header({"qed_mass"}));
      for (std::size_t k = 0; k < grid_->interior_count(); ++k) {
        node_row(w, k);
        w << pi[static_cast<Eigen::Index>(k)];
        w.end_row();
      }
    }
    double lambda_d = 0.0;
    if (ctx) {
      lambda_d = ldp::dirichlet_eigenvalue(*ctx);
      metrics_["ldp.dirichlet_lambda"] = {lambda_d, 0.0};
      metrics_["ldp.eigen_agreement"] = {std::abs(lambda_d + ref.triple.lambda) / std::abs(lambda_d), 0.0};
    }

    ldp::RateOptions ro;
    ro.bound = l.bound;
    ro.tol = l.tol;
    ro.max_iterations = l.max_iterations;
    CsvWriter w((out_ / "rate.csv").string(), {"tag", "rate", "optimality_gap", "gradient_norm", "box_active",
                                               "iterations", "converged", "reversible_rate"});
    std::vector<Eigen::VectorXd> betas;
    for (const auto& b : l.betas) betas.push_back(beta_on_nodes(b, pi));
    // Independent queries share F immutably; results land in config order.
    std::vector<ldp::RateFunctionResult> rates(betas.size());
    std::vector<std::exception_ptr> errors(betas.size());
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(c_.threads), betas.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < betas.size(); i += workers) {
          try {
            rates[i] = ldp::rate_function(F, *grid_, betas[i], ro);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const auto& b = l.betas[i];
      const auto& beta = betas[i];
      const auto& r = rates[i];
      const std::string key = "ldp.rate." + b.tag;
      metrics_[key] = {r.value, r.optimality_gap};
      metrics_[key + ".box_active"] = {r.box_active ? 1.0 : 0.0, 0.0};
      w << b.tag << r.value << r.optimality_gap << r.gradient_norm << r.box_active << r.iterations << r.converged;
      if (ctx) {
        const auto rr = ldp::reversible_rate(*grid_, beta, *ctx);
        if (!rr.infinite) {
          const auto closed = ldp::reversible_rate(interior(beta), *ctx, lambda_d);
          metrics_["ldp.reversible." + b.tag] = {closed.value, 0.0};
          w << closed.value;
        } else {
          metrics_["ldp.reversible." + b.tag] = {rr.value, 0.0};
          w << rr.value;
        }
      } else {
        w << "";
      }
      w.end_row();
    }

    if (l.gateaux_pairs > 0) {
      const auto pol = policy(c_.master_seed, Stream::gateaux);
      double worst = 0.0;
      const auto n = static_cast<Eigen::Index>(F.dim());
      for (std::size_t i = 0; i < l.gateaux_pairs; ++i) {
        auto rng = pol.stream(i);
        Eigen::VectorXd v0(n), v1(n);
        for (Eigen::Index k = 0; k < n; ++k) v0[k] = 2.0 * rng.uniform() - 1.0;
        for (Eigen::Index k = 0; k < n; ++k) v1[k] = 2.0 * rng.uniform() - 1.0;
        const auto g = ldp::gateaux(F, as_potential(v0), as_potential(v1), 1e-3,
                                    std::numeric_limits<double>::infinity());
        worst = std::max(worst, g.relative_error);
      }
      metrics_["ldp.gateaux_max_rel_error"] = {worst, 0.0};
    }
  }

 private:
  spectral::EigenOptions eigen_options() const {
    spectral::EigenOptions o;
    o.tol = c_.solver.tol;
    o.max_iterations = c_.solver.max_iterations;
    return o;
  }

  void lattice() {
    if (reference_) return;
    if (!has_lattice()) throw ConfigError("model.grid.cells is required for this experiment");
    grid_ = std::make_unique<model::GridSpec>(domain_, c_.model.grid.cells);
    model::GeneratorOptions go;
    go.truncation_radius = c_.model.grid.truncation_radius;
    op_ = model::build_generator(process_, *grid_, domain_, go);
    const auto& w = c_.model.weight;
    if (w.type == "exponential") {
      weight_ = model::WeightFunction::exponential(*grid_, w.a);
    } else if (w.type == "stable_lyapunov") {
      weight_ = model::WeightFunction::stable_lyapunov(*grid_, {w.beta, w.theta, w.p}, c_.model.process.alpha);
    } else {
      weight_ = model::WeightFunction::unit(grid_->interior_count());
    }
    reference_ = std::make_unique<spectral::EigenReport>(solve(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op_.dim()))));
  }

  spectral::EigenReport solve(const Eigen::VectorXd& V) const {
    return spectral::principal_eigentriple(op_, as_potential(V), weight_, eigen_options());
  }

  std::vector<std::string> node_header(std::vector<std::string> tail) const {
    std::vector<std::string> h{"node"};
    for (int a = 0; a < grid_->dim(); ++a) h.push_back("x" + std::to_string(a));
    h.insert(h.end(), tail.begin(), tail.end());
    return h;
  }

  void node_row(CsvWriter& w, std::size_t k) const {
    w << grid_->interior_node(k);
    for (double x : grid_->interior_coordinates(k)) w << x;
  }

  void write_eigentriple(const spectral::EigenReport& r) {
    const Eigen::VectorXd q = ldp::qed(r.triple).density;
    CsvWriter w((out_ / "eigentriple.csv").string(), node_header({"mu", "phi", "qed"}));
    for (std::size_t k = 0; k < grid_->interior_count(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      node_row(w, k);
      w << r.triple.mu[i] << r.triple.phi[i] << q[i];
      w.end_row();
    }
  }

  void gap(const spectral::EigenReport& r, const Eigen::VectorXd& twist) {
    const auto n = static_cast<Eigen::Index>(op_.dim());
    // Probes: the constant, an affine function of the first coordinate (not
    // symmetric about the centre of the box) and a fixed random vector.
    std::vector<Eigen::VectorXd> probes{Eigen::VectorXd::Ones(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    auto rng = policy(c_.master_seed, Stream::probes).stream(0);
    const auto& b0 = c_.model.domain.box[0];
    for (Eigen::Index k = 0; k < n; ++k) {
      const double x = grid_->interior_coordinates(static_cast<std::size_t>(k))[0];
      probes[1][k] = 1.0 + (x - b0.lo) / b0.length();
      probes[2][k] = 0.5 + rng.uniform();
    }
    const spectral::GapOptions go;
    const auto est = spectral::gap_estimate(op_, as_potential(twist), weight_, r.triple, probes, c_.solver.gap_horizon, go);
    const double window = est.fit_end - est.fit_start;
    metrics_["spectral.gap_delta"] = {est.delta, window > 0.0 ? 2.0 * go.residual_tol / window : 0.0};
    metrics_["spectral.gap_C"] = {est.C, 0.0};
    // Largest violation of rho_f(t) <= C exp(-delta t) over every sample above the floor.
    double worst = 0.0;
    CsvWriter w((out_ / "gap.csv").string(), {"probe", "t", "rho", "bound"});
    for (std::size_t p = 0; p < est.curves.size(); ++p) {
      const auto& c = est.curves[p];
      for (std::size_t j = 0; j < c.times.size(); ++j) {
        const double bound = est.C * std::exp(-est.delta * c.times[j]);
        if (j < c.valid_count) worst = std::max(worst, c.rho[j] / bound - 1.0);
        w << p << c.times[j] << c.rho[j] << bound;
        w.end_row();
      }
    }
    metrics_["spectral.gap_bound_excess"] = {worst, 0.0};
  }

  void survival() {
    std::size_t start = grid_->interior_count() / 2;
    if (!c_.solver.start.empty()) {
      const auto node = grid_->nearest_node(c_.solver.start);
      if (!node || grid_->interior_index(*node) < 0) throw ConfigError("solver.start is not an interior node");
      start = static_cast<std::size_t>(grid_->interior_index(*node));
    }
    const auto fit = spectral::survival_decay(op_, start, c_.solver.survival_horizon);
    const double window = fit.fit_end - fit.fit_start;
    metrics_["spectral.survival_slope"] = {fit.slope, window > 0.0 ? 2e-6 / window : 0.0};
  }

  void lyapunov() {
    const auto& w = c_.model.weight;
    double reach = std::numeric_limits<double>::infinity();
    for (const auto& iv : c_.model.domain.box) reach = std::min({reach, -iv.lo, iv.hi});
    std::vector<double> radii;
    for (double f : {0.125, 0.25, 0.5, 0.75}) radii.push_back(f * reach);
    const auto rep = model::lyapunov_check(op_, *grid_, weight_, w.p, radii);
    metrics_["spectral.lyapunov_drift_exponent"] = {rep.drift_exponent, 0.0};
    metrics_["spectral.lyapunov_growth_constant"] = {rep.growth_constant, 0.0};
  }

  void write_ensemble(const simulate::Histogram& hist, const simulate::EnsembleStats& e,
                      const std::optional<simulate::EmpiricalMeasure>& qed_ref,
                      const std::optional<simulate::EmpiricalMeasure>& qsd_ref) {
    std::vector<std::string> header{"cell"};
    for (int a = 0; a < hist.dim(); ++a) header.push_back("center" + std::to_string(a));
    header.insert(header.end(), {"occupation", "terminal"});
    if (qed_ref) header.insert(header.end(), {"qed_reference", "qsd_reference"});
    CsvWriter w((out_ / "ensemble.csv").string(), header);
    for (std::size_t k = 0; k < hist.cell_count(); ++k) {
      w << k;
      for (double x : hist.cell_center(k)) w << x;
      w << e.mean_occupation.masses[k] << e.terminal_marginal.masses[k];
      if (qed_ref) w << qed_ref->masses[k] << qsd_ref->masses[k];
      w.end_row();
    }
  }

  void feynman_kac(const simulate::InitialLaw& nu, const simulate::McOptions& mc) {
    const auto& s = c_.simulation;
    std::vector<model::ScalarField> fields;
    for (const auto& p : s.potentials) fields.push_back(make_field(p.terms));
    const auto fine = simulate::feynman_kac_mc(process_, domain_, fields, nu, mc);
    std::vector<simulate::FeynmanKacEstimate> coarse;
    if (s.extrapolation_ratio > 1.0) {
      auto mc2 = mc;
      mc2.dt = s.extrapolation_ratio * s.dt;
      mc2.rng = policy(c_.master_seed, Stream::coarse);
      coarse = simulate::feynman_kac_mc(process_, domain_, fields, nu, mc2);
    }
    CsvWriter w((out_ / "fk.csv").string(), {"tag", "quantity", "dt", "estimate", "ci"});
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string key = "mc.fk." + s.potentials[i].tag;
      const auto& f = fine[i];
      metrics_[key + ".rate"] = {f.rate.value, f.rate.ci};
      metrics_[key + ".slope"] = {f.slope.value, f.slope.ci};
      w << s.potentials[i].tag << "rate" << s.dt << f.rate.value << f.rate.ci;
      w.end_row();
      w << s.potentials[i].tag << "slope" << s.dt << f.slope.value << f.slope.ci;
      w.end_row();
      if (!coarse.empty()) {
        const auto& g = coarse[i];
        const auto ex = simulate::extrapolate_sqrt_dt(f.slope, g.slope, s.extrapolation_ratio);
        metrics_[key + ".slope_extrapolated"] = {ex.value, ex.ci};
        w << s.potentials[i].tag << "slope" << s.extrapolation_ratio * s.dt << g.slope.value << g.slope.ci;
        w.end_row();
        w << s.potentials[i].tag << "slope_extrapolated" << 0.0 << ex.value << ex.ci;
        w.end_row();
      }
    }
  }

  void fleming_viot(const simulate::InitialLaw& nu, const simulate::Histogram& hist,
                    const std::optional<simulate::EmpiricalMeasure>& qsd_ref) {
    const auto& s = c_.simulation;
    simulate::FlemingViotOptions fo;
    fo.n_particles = s.fv_particles;
    fo.dt = s.dt;
    fo.T = s.T;
    fo.burn_in = s.fv_burn_in;
    fo.rng = policy(c_.master_seed, Stream::fleming_viot);
    const auto r = simulate::fleming_viot(process_, domain_, nu, fo, hist);
    const double n = static_cast<double>(s.fv_particles);
    const double window = s.T - s.fv_burn_in;
    // Poisson approximation of the branching count.
    metrics_["mc.fv.killing_rate"] = {r.killing_rate,
                                      simulate::kZ95 * std::sqrt(static_cast<double>(r.branch_count)) / (n * window)};
    metrics_["mc.fv.blocked_steps"] = {static_cast<double>(r.blocked_steps), 0.0};
    if (qsd_ref) {
      metrics_["mc.fv.tv_terminal_vs_qsd"] = {simulate::total_variation(r.terminal, *qsd_ref),
                                              tv_noise(r.terminal.masses, n)};
      metrics_["mc.fv.tv_occupation_vs_qsd"] = {simulate::total_variation(r.occupation, *qsd_ref),
                                                tv_noise(r.occupation.masses, n)};
    }
    CsvWriter w((out_ / "fv.csv").string(), {"cell", "terminal", "occupation"});
    for (std::size_t k = 0; k < hist.cell_count(); ++k) {
      w << k << r.terminal.masses[k] << r.occupation.masses[k];
      w.end_row();
    }
  }

  Eigen::VectorXd interior(const Eigen::VectorXd& on_nodes) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid_->interior_count()));
    for (std::size_t k = 0; k < grid_->interior_count(); ++k) {
      v[static_cast<Eigen::Index>(k)] = on_nodes[static_cast<Eigen::Index>(grid_->interior_node(k))];
    }
    return v;
  }

  /// beta as a probability vector over every lattice node.
  Eigen::VectorXd beta_on_nodes(const BetaConfig& b, const Eigen::VectorXd& pi) const {
    const auto n = static_cast<Eigen::Index>(grid_->interior_count());
    Eigen::VectorXd on_interior;
    Eigen::VectorXd all = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_->node_count()));
    if (b.kind == "qed") {
      on_interior = pi;
    } else if (b.kind == "uniform") {
      on_interior = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    } else if (b.kind == "mixture") {
      on_interior = b.weight * pi + Eigen::VectorXd::Constant(n, (1.0 - b.weight) / static_cast<double>(n));
    } else if (b.kind == "dirac") {
      const auto node = grid_->nearest_node(b.point);
      if (!node) throw ConfigError("ldp beta " + b.tag + ": point is off the lattice");
      all[static_cast<Eigen::Index>(*node)] = 1.0;
      return all;
    } else {
      const auto g = make_field(b.terms);
      const auto U = make_field(c_.model.potential);
      on_interior.resize(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        const auto x = grid_->interior_coordinates(static_cast<std::size_t>(k));
        double v = g.value(x);
        if (b.square) v *= v;
        if (b.gibbs) v *= std::exp(-2.0 * U.value(x));
        if (!(v >= 0.0)) throw ConfigError("ldp beta " + b.tag + ": density is negative");
        on_interior[k] = v;
      }
      const double total = on_interior.sum();
      if (!(total > 0.0)) throw ConfigError("ldp beta " + b.tag + ": density has no mass on D");
      on_interior /= total;
    }
    for (Eigen::Index k = 0; k < n; ++k) all[static_cast<Eigen::Index>(grid_->interior_node(static_cast<std::size_t>(k)))] = on_interior[k];
    return all;
  }

  const RunConfig& c_;
  fs::path out_;
  model::ProcessSpec process_;
  model::DomainSpec domain_;
  std::unique_ptr<model::GridSpec> grid_;
  model::GridOperator op_;
  model::WeightFunction weight_;
  std::unique_ptr<spectral::EigenReport> reference_;
  std::unique_ptr<spectral::EigenReport> twisted_;
  MetricMap metrics_;
};

}  // namespace

ExperimentReport run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Runner runner(config);
  const auto& e = config.experiment;
  const bool sims = config.simulation.n_paths > 0 || config.simulation.fv_particles > 0;
  const bool ldps = !config.ldp.betas.empty() || config.ldp.reversible || config.ldp.gateaux_pairs > 0;
  if (e == "spectral" || (e == "validate" && runner.has_lattice())) runner.spectral(true);
  if (e == "simulate" || (e == "validate" && sims)) runner.simulate();
  if (e == "ldp" || (e == "validate" && ldps)) runner.ldp();

  ExperimentReport report;
  report.schema = config.schema;
  report.experiment = config.experiment;
  report.inputs_hash = inputs_hash(config);
  report.seed = config.master_seed;
  report.metrics = std::move(runner.metrics());
  report.checks = evaluate_checks(config.checks, report.metrics);
  for (const auto& c : report.checks) report.pass = report.pass && c.pass;
  report.threads = config.threads;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path out(config.output_dir);
  {
    std::ofstream os(out / "summary.json", std::ios::binary);
    os << summary_json(report).dump(2) << "\n";
  }
  {
    std::ofstream os(out / "timing.txt", std::ios::binary);
    os << "threads " << report.threads << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "wall_seconds %.3f\n", report.wall_seconds);
    os << buf;
  }
  return report;
}

}  // namespace qsd::cli
