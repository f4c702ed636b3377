#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace qsd::model {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Open axis-aligned box  prod_a (lo_a, hi_a).
struct OpenBox {
  std::vector<Interval> sides;
  bool operator==(const OpenBox&) const = default;
};

/// Open Euclidean ball.
struct OpenBall {
  std::vector<double> center;
  double radius = 0.0;
  bool operator==(const OpenBall&) const = default;
};

using Region = std::variant<OpenBox, OpenBall>;

bool region_contains(const Region& region, std::span<const double> x);

/// The simulation box together with the open set D inside it. Everything in
/// the box outside D is absorbing.
class DomainSpec {
 public:
  using Mask = std::function<bool(std::span<const double>)>;

  DomainSpec(std::vector<Interval> bounds, Region region);

  /// Replaces the region test by an arbitrary predicate; the declared
  /// region is kept for serialization.
  DomainSpec with_mask(Mask mask) const;

  int ambient_dim() const { return static_cast<int>(bounds_.size()); }
  const std::vector<Interval>& bounds() const { return bounds_; }
  const Region& region() const { return region_; }
  bool has_custom_mask() const { return static_cast<bool>(mask_); }

  /// True iff x lies in D (and inside the simulation box).
  bool contains(std::span<const double> x) const;
  bool in_box(std::span<const double> x) const;

  /// Largest distance between two points of the box.
  double box_diameter() const;

 private:
  std::vector<Interval> bounds_;
  Region region_;
  Mask mask_;
};

/// D equal to the open simulation box itself.
DomainSpec open_box_domain(std::vector<Interval> bounds);

}  // namespace qsd::model
