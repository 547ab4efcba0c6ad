#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace ssc {

// Axes of the slt configuration space.
enum class Axis : int { kS = 0, kL = 1, kT = 2 };

inline constexpr std::array<Axis, 3> kAllAxes = {Axis::kS, Axis::kL, Axis::kT};

inline constexpr int index(Axis a) { return static_cast<int>(a); }
const char* to_string(Axis a);

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; }

  bool contains(double x, double eps = 0.0) const { return x >= lo - eps && x <= hi + eps; }
  bool contains(const Interval& o) const { return o.lo >= lo && o.hi <= hi; }
  // Open interiors overlap; touching endpoints do not count.
  bool overlaps_open(const Interval& o) const { return lo < o.hi && o.lo < hi; }
  bool overlaps_closed(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

  Interval intersect(const Interval& o) const {
    return {std::max(lo, o.lo), std::min(hi, o.hi)};
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Axis-aligned box in (s, l, t).
struct Box3 {
  std::array<Interval, 3> range;

  Interval& operator[](Axis a) { return range[index(a)]; }
  const Interval& operator[](Axis a) const { return range[index(a)]; }

  bool contains_point(double s, double l, double t, double eps = 0.0) const {
    return range[0].contains(s, eps) && range[1].contains(l, eps) && range[2].contains(t, eps);
  }
  bool contains(const Box3& o) const {
    return range[0].contains(o.range[0]) && range[1].contains(o.range[1]) &&
           range[2].contains(o.range[2]);
  }

  friend bool operator==(const Box3&, const Box3&) = default;
};

}  // namespace ssc
