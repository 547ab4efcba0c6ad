#include "ssc/frenet.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc {
namespace {

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }
Vec2 left_normal(Vec2 unit_dir) { return {-unit_dir.y, unit_dir.x}; }

constexpr double kParamEps = 1e-12;

struct Projection {
  double distance;
  double s;
  double signed_l;
};

// Closest point on the polyline; ties keep the smaller s.
Projection closest_point(Vec2 p, const ReferenceLane& lane) {
  const auto& pts = lane.points();
  const auto& cum = lane.cum_arclength();
  Projection best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 seg = pts[i + 1] - pts[i];
    const double len = cum[i + 1] - cum[i];
    double u = dot(p - pts[i], seg) / (len * len);
    u = std::clamp(u, 0.0, 1.0);
    const Vec2 foot = pts[i] + u * seg;
    const double d = norm(p - foot);
    if (d < best.distance) {
      const double side = cross(seg, p - foot);
      best = {d, cum[i] + u * len, side >= 0.0 ? d : -d};
    }
  }
  return best;
}

// Solves p = A + u*B + l*(N0 + u*D) for (u, l) on one segment.
std::optional<FrenetPoint> invert_on_segment(Vec2 p, const ReferenceLane& lane, std::size_t i) {
  const auto& pts = lane.points();
  const auto& cum = lane.cum_arclength();
  const Vec2 w = p - pts[i];
  const Vec2 b = pts[i + 1] - pts[i];
  const Vec2 n0 = lane.vertex_normal(i);
  const Vec2 d = lane.vertex_normal(i + 1) - n0;

  // cross(w - u*B, N0 + u*D) = 0 is quadratic in u.
  const double qa = -cross(b, d);
  const double qb = cross(w, d) - cross(b, n0);
  const double qc = cross(w, n0);

  double roots[2];
  int n_roots = 0;
  const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc), 1e-300});
  if (std::abs(qa) <= 1e-14 * scale) {
    if (std::abs(qb) <= 1e-300) return std::nullopt;
    roots[n_roots++] = -qc / qb;
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
    roots[n_roots++] = q / qa;
    if (q != 0.0) roots[n_roots++] = qc / q;
  }

  std::optional<FrenetPoint> best;
  for (int k = 0; k < n_roots; ++k) {
    const double u = roots[k];
    if (!(u >= -kParamEps && u <= 1.0 + kParamEps)) continue;
    const double uc = std::clamp(u, 0.0, 1.0);
    const Vec2 n = n0 + uc * d;
    const double l = dot(w - uc * b, n) / dot(n, n);
    const FrenetPoint fp{cum[i] + uc * (cum[i + 1] - cum[i]), l};
    if (!best || std::abs(fp.l) < std::abs(best->l)) best = fp;
  }
  return best;
}

}  // namespace

ReferenceLane::ReferenceLane(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw Error(ErrorCode::kInvalidLane, "reference lane needs at least 2 points");
  }
  cum_arclength_.reserve(points_.size());
  cum_arclength_.push_back(0.0);
  std::vector<Vec2> seg_normals;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 seg = points_[i + 1] - points_[i];
    const double len = norm(seg);
    if (!std::isfinite(len) || len <= 0.0) {
      std::ostringstream os;
      os << "consecutive lane points " << i << " and " << i + 1 << " coincide";
      throw Error(ErrorCode::kInvalidLane, os.str());
    }
    cum_arclength_.push_back(cum_arclength_.back() + len);
    seg_normals.push_back(left_normal((1.0 / len) * seg));
  }
  normals_.resize(points_.size());
  normals_.front() = seg_normals.front();
  normals_.back() = seg_normals.back();
  for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
    const Vec2 sum = seg_normals[i - 1] + seg_normals[i];
    const double n = norm(sum);
    if (n < 1e-9) {
      throw Error(ErrorCode::kInvalidLane, "reference lane reverses direction");
    }
    normals_[i] = (1.0 / n) * sum;
  }
}

bool FrenetState::valid() const {
  return std::isfinite(t) && t >= 0.0 && std::isfinite(s) && std::isfinite(l) &&
         std::isfinite(s_dot) && std::isfinite(l_dot) && std::isfinite(s_ddot) &&
         std::isfinite(l_ddot);
}

FrenetPoint to_frenet(Vec2 point, const ReferenceLane& lane, double capture_radius) {
  const Projection nearest = closest_point(point, lane);
  if (!(nearest.distance <= capture_radius)) {
    std::ostringstream os;
    os << "point (" << point.x << ", " << point.y << ") is " << nearest.distance
       << " m from the lane, capture radius " << capture_radius << " m";
    throw Error(ErrorCode::kOutOfCaptureRange, os.str());
  }

  // Exact inverse of to_cartesian where one exists; the polyline projection
  // covers points beyond the lane ends.
  std::optional<FrenetPoint> best;
  const std::size_t n_seg = lane.points().size() - 1;
  for (std::size_t i = 0; i < n_seg; ++i) {
    const auto fp = invert_on_segment(point, lane, i);
    if (!fp || std::abs(fp->l) > capture_radius) continue;
    if (!best || std::abs(fp->l) < std::abs(best->l) - 1e-12) best = fp;
  }
  if (best) return *best;
  return {nearest.s, nearest.signed_l};
}

Vec2 to_cartesian(double s, double l, const ReferenceLane& lane) {
  const auto& cum = lane.cum_arclength();
  if (!(s >= 0.0 && s <= lane.length())) {
    std::ostringstream os;
    os << "s = " << s << " outside [0, " << lane.length() << "]";
    throw Error(ErrorCode::kOutOfRange, os.str());
  }
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t i = (it == cum.begin()) ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
  if (i + 1 >= cum.size()) i = cum.size() - 2;
  const double u = (s - cum[i]) / (cum[i + 1] - cum[i]);
  const auto& pts = lane.points();
  const Vec2 base = pts[i] + u * (pts[i + 1] - pts[i]);
  const Vec2 n = lane.vertex_normal(i) + u * (lane.vertex_normal(i + 1) - lane.vertex_normal(i));
  return base + l * n;
}

}  // namespace ssc
