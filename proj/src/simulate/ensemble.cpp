#include "qsd/simulate/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "qsd/errors.hpp"
#include "kernel.hpp"
#include "qsd/simulate/steppers.hpp"

namespace qsd::simulate {
namespace {

/// Runs fn(chunk, begin, end) over `threads` contiguous chunks of [0, n).
template <class Fn>
void run_chunks(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(workers);
  auto body = [&](std::size_t c) {
    try {
      fn(c, n * c / workers, n * (c + 1) / workers);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t c = 1; c < workers; ++c) pool.emplace_back(body, c);
  body(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t chunk_count(std::size_t n, int threads) {
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
}

void check_start(const model::DomainSpec& domain, const InitialLaw& nu, int state_dim) {
  if (nu.dim() != state_dim || domain.ambient_dim() != state_dim) {
    throw InvalidSpec("initial law, domain and process state dimensions differ");
  }
  for (const auto& a : nu.atoms()) {
    if (!domain.contains(a)) throw InvalidSpec("initial law charges points outside D");
  }
}

/// log of the mean of exp(a_i) over all n paths, with a_i = -inf for killed
/// paths, plus the per-path weights exp(a_i - shift) needed for variances.
struct LogMean {
  double shift = -std::numeric_limits<double>::infinity();
  double mean = 0.0;  // mean of exp(a_i - shift)
  double log_mean() const { return shift + std::log(mean); }
};

LogMean log_mean(const std::vector<double>& a) {
  LogMean m;
  for (double v : a) m.shift = std::max(m.shift, v);
  if (!std::isfinite(m.shift)) return m;
  double s = 0.0;
  for (double v : a) s += std::exp(v - m.shift);
  m.mean = s / static_cast<double>(a.size());
  return m;
}

}  // namespace

EnsembleStats rejection_conditional_ensemble(const model::ProcessSpec& process, const model::DomainSpec& domain,
                                             const InitialLaw& nu, const McOptions& options,
                                             const Histogram& binning, std::size_t min_survivors) {
  model::validate(process);
  const int sd = nu.dim();
  check_start(domain, nu, sd);
  if (binning.dim() > sd) throw InvalidSpec("histogram has more axes than the state");
  if (options.n_paths == 0) throw InvalidSpec("ensemble needs at least one path");
  const std::size_t n = step_count(options.T, options.dt);
  const double dt = options.T / static_cast<double>(n);
  const std::size_t cells = binning.cell_count();

  const std::size_t chunks = chunk_count(options.n_paths, options.threads);
  std::vector<std::vector<std::uint64_t>> occ_total(chunks, std::vector<std::uint64_t>(cells, 0));
  std::vector<std::vector<std::uint64_t>> term_total(chunks, std::vector<std::uint64_t>(cells, 0));
  std::vector<std::size_t> survivors(chunks, 0);

  with_kernel(process, domain, dt, [&](const auto& kernel) {
  run_chunks(options.n_paths, options.threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> occ(cells, 0);
    const auto kern = kernel;  // local copy keeps the kernel in registers
    auto x = kern.make_state(sd);
    const auto bin = make_binner(binning, x);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = options.rng.stream(i);
      nu.sample(rng, x);
      auto xs = x;  // never escapes to an opaque call, so it can live in registers
      std::fill(occ.begin(), occ.end(), 0u);
      std::uint32_t* counts = occ.data();
      bool alive = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (auto cell = bin(xs)) ++counts[*cell];
        kern.step(xs, rng);
        if (!kern.inside(xs)) {
          alive = false;
          break;
        }
      }
      if (!alive) continue;
      ++survivors[c];
      for (std::size_t j = 0; j < cells; ++j) occ_total[c][j] += occ[j];
      if (auto cell = bin(xs)) ++term_total[c][*cell];
    }
  });
  });

  std::vector<std::uint64_t> occ(cells, 0);
  std::vector<std::uint64_t> term(cells, 0);
  EnsembleStats s;
  s.n_paths = options.n_paths;
  for (std::size_t c = 0; c < chunks; ++c) {
    s.n_survivors += survivors[c];
    for (std::size_t j = 0; j < cells; ++j) {
      occ[j] += occ_total[c][j];
      term[j] += term_total[c][j];
    }
  }
  const double N = static_cast<double>(s.n_paths);
  s.survival_prob = static_cast<double>(s.n_survivors) / N;
  s.survival_ci = kZ95 * std::sqrt(s.survival_prob * (1.0 - s.survival_prob) / N);
  s.mean_occupation = EmpiricalMeasure::from_counts(binning, occ);
  s.terminal_marginal = EmpiricalMeasure::from_counts(binning, term);
  s.too_few_survivors = s.n_survivors < min_survivors;
  return s;
}

double SurvivalCurve::survival(std::size_t j) const {
  return static_cast<double>(survivors.at(j)) / static_cast<double>(n_paths);
}

RateEstimate SurvivalCurve::log_survival(std::size_t j) const {
  const double p = survival(j);
  if (!(p > 0.0)) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  return {std::log(p), kZ95 * std::sqrt((1.0 - p) / (p * static_cast<double>(n_paths)))};
}

RateEstimate SurvivalCurve::slope(std::size_t a, std::size_t b) const {
  const double pa = survival(a);
  const double pb = survival(b);
  const double span = times.at(b) - times.at(a);
  if (!(pa > 0.0 && pb > 0.0) || !(span > 0.0)) throw AllPathsKilled("survival slope needs survivors at both times");
  // {alive at t_b} is contained in {alive at t_a}: Var = (1/pb - 1/pa)/N
  const double var = std::max(0.0, (1.0 / pb - 1.0 / pa) / static_cast<double>(n_paths));
  return {(std::log(pb) - std::log(pa)) / span, kZ95 * std::sqrt(var) / span};
}

SurvivalCurve survival_curve(const model::ProcessSpec& process, const model::DomainSpec& domain,
                             const InitialLaw& nu, const McOptions& options, std::size_t records) {
  model::validate(process);
  const int sd = nu.dim();
  check_start(domain, nu, sd);
  if (records == 0 || options.n_paths == 0) throw InvalidSpec("survival curve needs records and paths");
  const std::size_t n = step_count(options.T, options.dt);
  const double dt = options.T / static_cast<double>(n);
  // number of completed steps at which each path was still alive
  std::vector<std::size_t> alive_steps(options.n_paths, n);
  with_kernel(process, domain, dt, [&](const auto& kernel) {
  run_chunks(options.n_paths, options.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    const auto kern = kernel;  // local copy keeps the kernel in registers
    auto x = kern.make_state(sd);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = options.rng.stream(i);
      nu.sample(rng, x);
      auto xs = x;
      for (std::size_t k = 1; k <= n; ++k) {
        kern.step(xs, rng);
        if (!kern.inside(xs)) {
          alive_steps[i] = k - 1;
          break;
        }
      }
    }
  });
  });
  SurvivalCurve curve;
  curve.n_paths = options.n_paths;
  curve.times.push_back(0.0);
  curve.survivors.push_back(options.n_paths);
  for (std::size_t j = 1; j <= records; ++j) {
    const std::size_t k = n * j / records;
    curve.times.push_back(static_cast<double>(k) * dt);
    curve.survivors.push_back(static_cast<std::size_t>(
        std::count_if(alive_steps.begin(), alive_steps.end(), [k](std::size_t s) { return s >= k; })));
  }
  return curve;
}

std::vector<FeynmanKacEstimate> feynman_kac_mc(const model::ProcessSpec& process, const model::DomainSpec& domain,
                                               const std::vector<model::ScalarField>& potentials,
                                               const InitialLaw& nu, const McOptions& options) {
  model::validate(process);
  const int sd = nu.dim();
  check_start(domain, nu, sd);
  if (potentials.empty() || options.n_paths == 0) throw InvalidSpec("Feynman-Kac estimate needs potentials and paths");
  const std::size_t n = step_count(options.T, options.dt);
  if (n < 2) throw InvalidSpec("Feynman-Kac estimate needs at least two steps");
  const std::size_t half = n / 2;
  const double dt = options.T / static_cast<double>(n);
  const double t_half = static_cast<double>(half) * dt;
  const std::size_t nv = potentials.size();
  const std::size_t N = options.n_paths;
  constexpr double kDead = -std::numeric_limits<double>::infinity();
  // per-path log-weights at T and at T/2, potential-major
  std::vector<double> a_full(nv * N, kDead);
  std::vector<double> a_half(nv * N, kDead);

  with_kernel(process, domain, dt, [&](const auto& kernel) {
  run_chunks(N, options.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    const auto kern = kernel;  // local copy keeps the kernel in registers
    auto x = kern.make_state(sd);
    std::vector<double> acc(nv);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = options.rng.stream(i);
      nu.sample(rng, x);
      std::fill(acc.begin(), acc.end(), 0.0);
      bool alive = true;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == half) {
          for (std::size_t v = 0; v < nv; ++v) a_half[v * N + i] = acc[v] * dt;
        }
        for (std::size_t v = 0; v < nv; ++v) acc[v] += potentials[v].value(x);
        kern.step(x, rng);
        if (!kern.inside(x)) {
          alive = false;
          break;
        }
      }
      if (alive) {
        for (std::size_t v = 0; v < nv; ++v) a_full[v * N + i] = acc[v] * dt;
      }
    }
  });
  });

  std::vector<FeynmanKacEstimate> out;
  for (std::size_t v = 0; v < nv; ++v) {
    const std::vector<double> full(a_full.begin() + static_cast<long>(v * N), a_full.begin() + static_cast<long>((v + 1) * N));
    const std::vector<double> hv(a_half.begin() + static_cast<long>(v * N), a_half.begin() + static_cast<long>((v + 1) * N));
    const auto mf = log_mean(full);
    const auto mh = log_mean(hv);
    FeynmanKacEstimate e;
    e.n_paths = N;
    e.T = options.T;
    e.n_survivors = static_cast<std::size_t>(std::count_if(full.begin(), full.end(), [](double a) { return std::isfinite(a); }));
    if (e.n_survivors == 0) throw AllPathsKilled("no path survived to the horizon");
    // delta method on Y_i = exp(a_i - shift) with Y_i = 0 for killed paths
    double vy = 0.0;
    double vz = 0.0;
    double cyz = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double y = std::exp(full[i] - mf.shift) - mf.mean;
      const double z = std::exp(hv[i] - mh.shift) - mh.mean;
      vy += y * y;
      vz += z * z;
      cyz += y * z;
    }
    const double dn = static_cast<double>(N);
    vy /= dn - 1.0;
    vz /= dn - 1.0;
    cyz /= dn - 1.0;
    const double ry = vy / (mf.mean * mf.mean);
    const double rz = vz / (mh.mean * mh.mean);
    const double rc = cyz / (mf.mean * mh.mean);
    e.log_mean = mf.log_mean();
    e.rate = {e.log_mean / options.T, kZ95 * std::sqrt(ry / dn) / options.T};
    const double span = options.T - t_half;
    e.slope = {(e.log_mean - mh.log_mean()) / span, kZ95 * std::sqrt(std::max(0.0, ry + rz - 2.0 * rc) / dn) / span};
    out.push_back(e);
  }
  return out;
}

FeynmanKacEstimate feynman_kac_mc(const model::ProcessSpec& process, const model::DomainSpec& domain,
                                  const model::ScalarField& potential, const InitialLaw& nu,
                                  const McOptions& options) {
  return feynman_kac_mc(process, domain, std::vector<model::ScalarField>{potential}, nu, options).front();
}

RateEstimate extrapolate_sqrt_dt(const RateEstimate& fine, const RateEstimate& coarse, double ratio) {
  if (!(ratio > 1.0)) throw InvalidSpec("extrapolation ratio must exceed 1");
  const double r = std::sqrt(ratio);
  return {(r * fine.value - coarse.value) / (r - 1.0),
          std::sqrt(r * r * fine.ci * fine.ci + coarse.ci * coarse.ci) / (r - 1.0)};
}

FlemingViotResult fleming_viot(const model::ProcessSpec& process, const model::DomainSpec& domain,
                               const InitialLaw& nu, const FlemingViotOptions& options, const Histogram& binning) {
  model::validate(process);
  const int sd = nu.dim();
  check_start(domain, nu, sd);
  if (options.n_particles < 2) throw InvalidSpec("Fleming-Viot needs at least two particles");
  if (!(options.burn_in >= 0.0 && options.burn_in < options.T)) throw InvalidSpec("burn-in must lie in [0, T)");
  const std::size_t n = step_count(options.T, options.dt);
  const double dt = options.T / static_cast<double>(n);
  const PathKernel kernel(process, domain, dt);
  const std::size_t first_avg = std::min(n - 1, static_cast<std::size_t>(std::llround(options.burn_in / dt)));
  const std::size_t P = options.n_particles;
  const auto usd = static_cast<std::size_t>(sd);
  const auto hd = static_cast<std::size_t>(binning.dim());
  const std::size_t cells = binning.cell_count();

  std::vector<Rng> rngs;
  rngs.reserve(P);
  for (std::size_t k = 0; k < P; ++k) rngs.push_back(options.rng.stream(k));
  Rng resample = options.rng.stream(P);

  std::vector<double> x(P * usd);
  for (std::size_t k = 0; k < P; ++k) nu.sample(rngs[k], std::span<double>(x).subspan(k * usd, usd));
  std::vector<double> prev(x);
  std::vector<char> exited(P, 0);
  std::vector<std::size_t> alive_ids;
  std::vector<std::uint64_t> occ(cells, 0);

  auto histogram = [&](std::vector<std::uint64_t>& counts) {
    for (std::size_t k = 0; k < P; ++k) {
      if (auto cell = binning.cell_of(std::span<const double>(x).subspan(k * usd, hd))) ++counts[*cell];
    }
  };

  FlemingViotResult r;
  std::vector<std::size_t> snapshot_steps;
  for (std::size_t j = 1; j <= options.snapshots; ++j) snapshot_steps.push_back(n * j / options.snapshots);
  std::size_t next_snapshot = 0;

  for (std::size_t step = 0; step < n; ++step) {
    if (step >= first_avg) histogram(occ);  // left endpoint
    prev = x;
    alive_ids.clear();
    for (std::size_t k = 0; k < P; ++k) {
      auto xk = std::span<double>(x).subspan(k * usd, usd);
      kernel.step(xk, rngs[k]);
      exited[k] = kernel.inside(xk) ? 0 : 1;
      if (!exited[k]) alive_ids.push_back(k);
    }
    if (alive_ids.empty()) {
      x = prev;
      ++r.blocked_steps;
    } else {
      for (std::size_t k = 0; k < P; ++k) {
        if (!exited[k]) continue;
        const std::size_t donor = alive_ids[resample.index(alive_ids.size())];
        std::copy_n(x.begin() + static_cast<long>(donor * usd), usd, x.begin() + static_cast<long>(k * usd));
        if (step >= first_avg) ++r.branch_count;
      }
    }
    while (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == step + 1) {
      std::vector<std::uint64_t> counts(cells, 0);
      histogram(counts);
      r.snapshot_times.push_back(static_cast<double>(step + 1) * dt);
      r.snapshots.push_back(EmpiricalMeasure::from_counts(binning, counts));
      ++next_snapshot;
    }
  }
  std::vector<std::uint64_t> term(cells, 0);
  histogram(term);
  r.terminal = EmpiricalMeasure::from_counts(binning, term);
  r.occupation = EmpiricalMeasure::from_counts(binning, occ);
  const double window = static_cast<double>(n - first_avg) * dt;
  r.killing_rate = static_cast<double>(r.branch_count) / (static_cast<double>(P) * window);
  r.mass_collapse = std::count_if(term.begin(), term.end(), [](std::uint64_t c) { return c > 0; }) <= 1;
  return r;
}

}  // namespace qsd::simulate
