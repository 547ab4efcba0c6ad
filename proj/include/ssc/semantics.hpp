#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ssc/geometry.hpp"

namespace ssc {

// ---- Semantic elements -------------------------------------------------

struct StaticObstacle {
  Interval s;
  Interval l;
};

struct TimedPoint {
  double t = 0.0;
  double s = 0.0;
  double l = 0.0;
};

struct DynamicObstacle {
  double half_length = 0.0;
  double half_width = 0.0;
  std::vector<TimedPoint> trajectory;  // strictly increasing t

  // Linear interpolation; nullopt outside the predicted time span.
  std::optional<TimedPoint> at(double t) const;
};

struct RedLight {
  double stop_s = 0.0;
  double t_on = 0.0;
  double t_off = 0.0;
};

struct SpeedLimit {
  double v_max = 0.0;
  double s_begin = 0.0;
  double s_end = 0.0;
};

struct StopSign {
  double stop_s = 0.0;
};

struct LaneChangeDuration {
  double max_duration = 0.0;
  double d_begin = 0.0;
  double d_end = 0.0;
};

using SemanticElement = std::variant<StaticObstacle, DynamicObstacle, RedLight, SpeedLimit,
                                     StopSign, LaneChangeDuration>;

bool is_obstacle_like(const SemanticElement& e);
std::string element_name(const SemanticElement& e);

// Throws Error(kInvalidArgument) naming the offending element.
void validate_element(const SemanticElement& e);

struct SemanticScene {
  std::vector<SemanticElement> elements;
};

// ---- Semantic boundaries -----------------------------------------------

enum class Hardness { kHard, kSoft };

// Bound on the k-th time derivative of one planning dimension (s or l).
struct DerivativeBound {
  int order = 1;
  Axis dim = Axis::kS;
  double lower = 0.0;
  double upper = 0.0;
};

struct SemanticBoundary {
  Axis axis = Axis::kS;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<DerivativeBound> bound;
  std::optional<double> time_budget;
  Hardness hardness = Hardness::kHard;
  std::size_t source = 0;  // index of the element in the scene

  Interval range() const { return {lower, upper}; }
  bool hard() const { return hardness == Hardness::kHard; }
};

struct BoundaryConfig {
  // Longitudinal extent of the zero-velocity zone behind a stop line.
  double stop_zone_depth = 2.0;
};

std::vector<SemanticBoundary> extract_boundaries(const SemanticScene& scene,
                                                 const BoundaryConfig& cfg = {});

// ---- slt occupancy grid ------------------------------------------------

struct GridConfig {
  double ds = 0.25;
  double dl = 0.1;
  double dt = 0.1;
  double s_min = 0.0;
  double s_max = 200.0;
  double l_min = -6.0;
  double l_max = 6.0;
  double t_origin = 0.0;
  // Ego half-dimensions; obstacle footprints are inflated by these so the ego
  // can be treated as a point.
  double ego_half_length = 0.0;
  double ego_half_width = 0.0;
  double red_light_depth = 2.0;
};

// Closed index range [first, last]; empty when last < first.
struct CellRange {
  long first = 0;
  long last = -1;
  bool empty() const { return last < first; }
};

class SltGrid {
 public:
  SltGrid(std::array<double, 3> origin, std::array<double, 3> resolution,
          std::array<long, 3> extent);

  const std::array<double, 3>& origin() const { return origin_; }
  const std::array<double, 3>& resolution() const { return resolution_; }
  const std::array<long, 3>& extent() const { return extent_; }
  double resolution(Axis a) const { return resolution_[index(a)]; }
  Interval axis_span(Axis a) const;

  bool in_extent(long is, long il, long it) const;
  // Out-of-extent cells are reported occupied.
  bool occupied(long is, long il, long it) const;
  void set_occupied(long is, long il, long it);

  // Cells whose half-open extent overlaps the open interval (lo, hi). A
  // degenerate interval maps to the cell containing it.
  CellRange cells_overlapping(Axis a, Interval iv) const;
  long cell_of(Axis a, double x) const;
  double cell_lower(Axis a, long i) const { return origin_[index(a)] + i * resolution_[index(a)]; }

  // True iff some cell overlapping the open interior of the box is occupied
  // (or lies outside the grid).
  bool box_occupied(const Box3& box) const;
  void fill_box(const Box3& box);

  std::size_t occupied_count() const;

  friend bool operator==(const SltGrid&, const SltGrid&) = default;

 private:
  std::size_t flat(long is, long il, long it) const {
    return (static_cast<std::size_t>(it) * extent_[1] + il) * extent_[0] + is;
  }

  std::array<double, 3> origin_;
  std::array<double, 3> resolution_;
  std::array<long, 3> extent_;
  std::vector<std::uint8_t> cells_;
};

// Renders obstacle-like elements into a grid spanning [t_origin, t_origin + horizon].
// Throws Error(kInvalidHorizon) for horizon <= 0.
SltGrid render_occupancy(const SemanticScene& scene, double horizon, const GridConfig& cfg);

}  // namespace ssc
