#include "qsd/model/domain.hpp"

#include <cmath>

#include "qsd/errors.hpp"

namespace qsd::model {

bool region_contains(const Region& region, std::span<const double> x) {
  if (const auto* box = std::get_if<OpenBox>(&region)) {
    for (std::size_t a = 0; a < box->sides.size(); ++a) {
      if (!(x[a] > box->sides[a].lo && x[a] < box->sides[a].hi)) return false;
    }
    return true;
  }
  const auto& ball = std::get<OpenBall>(region);
  double r2 = 0.0;
  for (std::size_t a = 0; a < ball.center.size(); ++a) {
    const double d = x[a] - ball.center[a];
    r2 += d * d;
  }
  return r2 < ball.radius * ball.radius;
}

DomainSpec::DomainSpec(std::vector<Interval> bounds, Region region)
    : bounds_(std::move(bounds)), region_(std::move(region)) {
  if (bounds_.empty()) throw InvalidSpec("domain needs at least one axis");
  for (const auto& iv : bounds_) {
    if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw InvalidSpec("domain bounds must be finite with lo < hi");
    }
  }
  const std::size_t d = bounds_.size();
  if (const auto* box = std::get_if<OpenBox>(&region_)) {
    if (box->sides.size() != d) throw InvalidSpec("region box dimension mismatch");
    for (const auto& s : box->sides) {
      if (!(s.hi > s.lo)) throw InvalidSpec("region box is empty");
    }
  } else {
    const auto& ball = std::get<OpenBall>(region_);
    if (ball.center.size() != d) throw InvalidSpec("region ball dimension mismatch");
    if (!(ball.radius > 0.0)) throw InvalidSpec("region ball radius must be positive");
  }
}

DomainSpec DomainSpec::with_mask(Mask mask) const {
  DomainSpec copy = *this;
  copy.mask_ = std::move(mask);
  return copy;
}

bool DomainSpec::in_box(std::span<const double> x) const {
  for (std::size_t a = 0; a < bounds_.size(); ++a) {
    if (x[a] < bounds_[a].lo || x[a] > bounds_[a].hi) return false;
  }
  return true;
}

bool DomainSpec::contains(std::span<const double> x) const {
  if (!in_box(x)) return false;
  if (mask_) return mask_(x);
  return region_contains(region_, x);
}

double DomainSpec::box_diameter() const {
  double s = 0.0;
  for (const auto& iv : bounds_) s += iv.length() * iv.length();
  return std::sqrt(s);
}

DomainSpec open_box_domain(std::vector<Interval> bounds) {
  OpenBox box{bounds};
  return DomainSpec(std::move(bounds), Region{std::move(box)});
}

}  // namespace qsd::model
