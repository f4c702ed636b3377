#include "qsd/simulate/empirical.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>

#include "qsd/errors.hpp"

namespace qsd::simulate {

Histogram::Histogram(std::vector<model::Interval> bounds, std::vector<int> bins)
    : bounds_(std::move(bounds)), bins_(std::move(bins)) {
  if (bounds_.empty() || bounds_.size() != bins_.size()) {
    throw InvalidSpec("histogram needs one bin count per axis");
  }
  count_ = 1;
  for (std::size_t a = 0; a < bins_.size(); ++a) {
    if (bins_[a] < 1 || !(bounds_[a].hi > bounds_[a].lo)) throw InvalidSpec("histogram axis is empty");
    width_.push_back(bounds_[a].length() / bins_[a]);
    inverse_width_.push_back(bins_[a] / bounds_[a].length());
    count_ *= static_cast<std::size_t>(bins_[a]);
  }
}

double Histogram::cell_volume() const {
  double v = 1.0;
  for (double w : width_) v *= w;
  return v;
}

std::vector<model::Interval> Histogram::cell_box(std::size_t cell) const {
  std::vector<model::Interval> box;
  for (std::size_t a = 0; a < bins_.size(); ++a) {
    const auto k = static_cast<double>(cell % static_cast<std::size_t>(bins_[a]));
    cell /= static_cast<std::size_t>(bins_[a]);
    box.push_back({bounds_[a].lo + k * width_[a], bounds_[a].lo + (k + 1.0) * width_[a]});
  }
  return box;
}

std::vector<double> Histogram::cell_center(std::size_t cell) const {
  std::vector<double> c;
  for (const auto& side : cell_box(cell)) c.push_back(0.5 * (side.lo + side.hi));
  return c;
}

EmpiricalMeasure EmpiricalMeasure::from_counts(const Histogram& binning, std::span<const std::uint64_t> counts) {
  EmpiricalMeasure m{binning, std::vector<double>(binning.cell_count(), 0.0), 0.0};
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  m.total_weight = static_cast<double>(total);
  if (total == 0) return m;
  for (std::size_t k = 0; k < counts.size(); ++k) m.masses[k] = static_cast<double>(counts[k]) / m.total_weight;
  return m;
}

double EmpiricalMeasure::mass_sum() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

bool EmpiricalMeasure::supported_in(const model::DomainSpec& domain) const {
  for (std::size_t k = 0; k < masses.size(); ++k) {
    if (masses[k] > 0.0 && !domain.contains(binning.cell_center(k))) return false;
  }
  return true;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidSpec("total variation of vectors of different length");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return 0.5 * s;
}

double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (!(a.binning == b.binning)) throw InvalidSpec("total variation of measures on different binnings");
  return total_variation(a.masses, b.masses);
}

EmpiricalMeasure reference_measure(const Histogram& binning,
                                   const std::function<double(std::span<const double>)>& density) {
  // boost stores the non-negative half of the symmetric rule
  using Rule = boost::math::quadrature::gauss<double, 15>;
  const auto& abscissa = Rule::abscissa();
  const auto& weight = Rule::weights();
  std::vector<double> nodes;
  std::vector<double> wts;
  for (std::size_t j = 0; j < abscissa.size(); ++j) {
    nodes.push_back(abscissa[j]);
    wts.push_back(weight[j]);
    if (abscissa[j] != 0.0) {
      nodes.push_back(-abscissa[j]);
      wts.push_back(weight[j]);
    }
  }
  const int d = binning.dim();
  const std::size_t q = nodes.size();
  std::size_t combos = 1;
  for (int a = 0; a < d; ++a) combos *= q;

  EmpiricalMeasure m{binning, std::vector<double>(binning.cell_count(), 0.0), 0.0};
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t cell = 0; cell < binning.cell_count(); ++cell) {
    const auto box = binning.cell_box(cell);
    double acc = 0.0;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t r = c;
      double w = 1.0;
      for (int a = 0; a < d; ++a) {
        const std::size_t j = r % q;
        r /= q;
        const auto& s = box[static_cast<std::size_t>(a)];
        x[static_cast<std::size_t>(a)] = 0.5 * (s.lo + s.hi) + 0.5 * s.length() * nodes[j];
        w *= 0.5 * s.length() * wts[j];
      }
      acc += w * density(x);
    }
    m.masses[cell] = acc;
  }
  m.total_weight = std::accumulate(m.masses.begin(), m.masses.end(), 0.0);
  if (!(m.total_weight > 0.0)) throw InvalidSpec("reference density has no mass on the histogram");
  for (double& v : m.masses) v /= m.total_weight;
  return m;
}

}  // namespace qsd::simulate
