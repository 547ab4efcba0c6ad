#pragma once

#include <vector>

namespace ssc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Arc-length parameterized centerline. Construction validates the polyline.
class ReferenceLane {
 public:
  explicit ReferenceLane(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& cum_arclength() const { return cum_arclength_; }
  double length() const { return cum_arclength_.back(); }

  // Left-hand normal attached to vertex i (normalized bisector at interior vertices).
  Vec2 vertex_normal(std::size_t i) const { return normals_[i]; }

 private:
  std::vector<Vec2> points_;
  std::vector<double> cum_arclength_;
  std::vector<Vec2> normals_;
};

struct FrenetPoint {
  double s = 0.0;
  double l = 0.0;
};

// Ego or agent state in the Frenet frame. Derivatives are optional in the
// sense that zero is the neutral default.
struct FrenetState {
  double t = 0.0;
  double s = 0.0;
  double l = 0.0;
  double s_dot = 0.0;
  double l_dot = 0.0;
  double s_ddot = 0.0;
  double l_ddot = 0.0;

  bool valid() const;
};

inline constexpr double kDefaultCaptureRadius = 20.0;

// Projects a Cartesian point onto the lane. l is positive to the left.
// Throws Error(kOutOfCaptureRange) when the point is farther than
// capture_radius from the polyline.
FrenetPoint to_frenet(Vec2 point, const ReferenceLane& lane,
                      double capture_radius = kDefaultCaptureRadius);

// Inverse map; normals are linearly interpolated between vertex normals.
// Throws Error(kOutOfRange) when s is outside [0, length].
Vec2 to_cartesian(double s, double l, const ReferenceLane& lane);

}  // namespace ssc
