#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qsd/model/domain.hpp"

namespace qsd::simulate {

/// Uniform cells [lo + k w, lo + (k+1) w) over a box; axis 0 is the fastest
/// stride. Points on the upper face fall into the last cell.
class Histogram {
 public:
  Histogram() = default;
  Histogram(std::vector<model::Interval> bounds, std::vector<int> bins);

  int dim() const { return static_cast<int>(bins_.size()); }
  const std::vector<model::Interval>& bounds() const { return bounds_; }
  const std::vector<int>& bins() const { return bins_; }
  std::size_t cell_count() const { return count_; }
  double width(int axis) const { return width_[static_cast<std::size_t>(axis)]; }
  double cell_volume() const;

  std::optional<std::size_t> cell_of(std::span<const double> x) const {
    if (bins_.size() == 1) {
      const double u = (x[0] - bounds_[0].lo) * inverse_width_[0];
      if (!(u >= 0.0) || x[0] > bounds_[0].hi) return std::nullopt;
      const auto k = static_cast<std::size_t>(u);
      return k < count_ ? k : count_ - 1;
    }
    std::size_t cell = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < bins_.size(); ++a) {
      const double u = (x[a] - bounds_[a].lo) * inverse_width_[a];
      if (!(u >= 0.0) || x[a] > bounds_[a].hi) return std::nullopt;
      const auto last = static_cast<std::size_t>(bins_[a] - 1);
      const auto k = static_cast<std::size_t>(u);
      cell += (k < last ? k : last) * stride;
      stride *= static_cast<std::size_t>(bins_[a]);
    }
    return cell;
  }
  std::vector<double> cell_center(std::size_t cell) const;
  std::vector<model::Interval> cell_box(std::size_t cell) const;

  bool operator==(const Histogram& o) const { return bounds_ == o.bounds_ && bins_ == o.bins_; }

 private:
  std::vector<model::Interval> bounds_;
  std::vector<int> bins_;
  std::vector<double> width_;
  std::vector<double> inverse_width_;
  std::size_t count_ = 0;
};

/// Probability masses per histogram cell together with the normalizer they
/// were divided by (a time or a count).
struct EmpiricalMeasure {
  Histogram binning;
  std::vector<double> masses;
  double total_weight = 0.0;

  /// Normalizes integer counts; all-zero counts give all-zero masses.
  static EmpiricalMeasure from_counts(const Histogram& binning, std::span<const std::uint64_t> counts);

  double mass_sum() const;
  /// True iff no mass sits on a cell whose centre lies outside D.
  bool supported_in(const model::DomainSpec& domain) const;
};

/// 1/2 sum |a_k - b_k|; throws InvalidSpec for different binnings.
double total_variation(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
double total_variation(std::span<const double> a, std::span<const double> b);

/// Cell masses of an unnormalized density (tensor 15-point Gauss-Legendre
/// per cell), normalized to sum 1.
EmpiricalMeasure reference_measure(const Histogram& binning,
                                   const std::function<double(std::span<const double>)>& density);

}  // namespace qsd::simulate
