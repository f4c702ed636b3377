#pragma once

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qsd/model/domain.hpp"
#include "qsd/model/process.hpp"
#include "qsd/simulate/empirical.hpp"
#include "qsd/simulate/rng.hpp"
#include "qsd/simulate/steppers.hpp"

namespace qsd::simulate {

/// One Euler step plus the membership test, with the per-step dispatch
/// resolved once. Box-shaped domains and drift-free overdamped processes
/// take inlined paths; everything else defers to the generic code.
class PathKernel {
 public:
  PathKernel(const model::ProcessSpec& process, const model::DomainSpec& domain, double dt)
      : process_(&process), domain_(&domain), dt_(dt), sq_(std::sqrt(dt)) {
    if (const auto* box = std::get_if<model::OpenBox>(&domain.region()); box && !domain.has_custom_mask()) {
      box_ = true;
      for (std::size_t a = 0; a < domain.bounds().size(); ++a) {
        lo_.push_back(std::max(box->sides[a].lo, domain.bounds()[a].lo));
        hi_.push_back(std::min(box->sides[a].hi, domain.bounds()[a].hi));
      }
    }
    if (const auto* o = std::get_if<model::OverdampedLangevin>(&process)) {
      free_ = !o->drift && !o->potential.is_custom() && o->potential.terms().empty();
    }
  }

  using State = std::vector<double>;
  static State make_state(int dim) { return State(static_cast<std::size_t>(dim)); }

  double dt() const { return dt_; }
  bool free_interval() const { return box_ && free_ && lo_.size() == 1; }
  double lo(std::size_t a) const { return lo_[a]; }
  double hi(std::size_t a) const { return hi_[a]; }

  bool inside(std::span<const double> x) const {
    if (!box_) return domain_->contains(x);
    for (std::size_t a = 0; a < lo_.size(); ++a) {
      if (!(x[a] > lo_[a] && x[a] < hi_[a])) return false;
    }
    return true;
  }

  void step(std::span<double> x, Rng& rng) const {
    if (free_) {
      for (double& xi : x) xi += sq_ * rng.gaussian();
      return;
    }
    step_process(*process_, x, dt_, rng);
  }

 private:
  const model::ProcessSpec* process_;
  const model::DomainSpec* domain_;
  double dt_;
  double sq_;
  bool box_ = false;
  bool free_ = false;
  std::vector<double> lo_;  // open box test equals region test within the closed bounds
  std::vector<double> hi_;
};

/// Brownian motion on an interval, the workhorse of the validation runs.
class FreeIntervalKernel {
 public:
  FreeIntervalKernel(double lo, double hi, double dt) : lo_(lo), hi_(hi), sq_(std::sqrt(dt)) {}

  using State = std::array<double, 1>;
  static State make_state(int) { return {}; }

  bool inside(std::span<const double> x) const { return x[0] > lo_ && x[0] < hi_; }
  void step(std::span<double> x, Rng& rng) const { x[0] += sq_ * rng.gaussian(); }

 private:
  double lo_;
  double hi_;
  double sq_;
};

/// Histogram cell of the leading coordinates of a state. Binners are small
/// values so the path loop can keep them in registers.
struct HistogramBinner {
  const Histogram* h;
  std::optional<std::size_t> operator()(const std::vector<double>& x) const {
    return h->cell_of(std::span<const double>(x).first(static_cast<std::size_t>(h->dim())));
  }
};

struct IntervalBinner {
  double lo;
  double hi;
  double inverse_width;
  std::size_t last;

  explicit IntervalBinner(const Histogram& h)
      : lo(h.bounds()[0].lo), hi(h.bounds()[0].hi), inverse_width(1.0 / h.width(0)), last(h.cell_count() - 1) {}

  std::optional<std::size_t> operator()(const std::array<double, 1>& x) const {
    const double u = (x[0] - lo) * inverse_width;
    if (!(u >= 0.0) || x[0] > hi) return std::nullopt;
    const auto k = static_cast<std::size_t>(u);
    return k < last ? k : last;
  }
};

inline HistogramBinner make_binner(const Histogram& h, const std::vector<double>&) { return {&h}; }
inline IntervalBinner make_binner(const Histogram& h, const std::array<double, 1>&) { return IntervalBinner(h); }

/// Calls body(kernel) with the most specialized kernel for the model, so the
/// path loop is compiled once per kernel type.
template <class Body>
void with_kernel(const model::ProcessSpec& process, const model::DomainSpec& domain, double dt, Body&& body) {
  const PathKernel generic(process, domain, dt);
  if (generic.free_interval()) {
    body(FreeIntervalKernel(generic.lo(0), generic.hi(0), dt));
  } else {
    body(generic);
  }
}

}  // namespace qsd::simulate
