#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ssc/errors.hpp"
#include "ssc/frenet.hpp"

using namespace ssc;

namespace {

ReferenceLane straight_lane() { return ReferenceLane({{0.0, 0.0}, {100.0, 0.0}}); }

// Counter-clockwise arc of the given radius centered at the origin, starting at (radius, 0).
ReferenceLane arc_lane(double radius, double sweep, double step) {
  std::vector<Vec2> pts;
  const int n = static_cast<int>(std::ceil(sweep / step));
  for (int i = 0; i <= n; ++i) {
    const double th = sweep * i / n;
    pts.push_back({radius * std::cos(th), radius * std::sin(th)});
  }
  return ReferenceLane(std::move(pts));
}

// Brute force over a fine discretization of the exact circle.
struct ArcOracle {
  double s;
  double dist;
};
ArcOracle nearest_on_arc(Vec2 p, double radius, double sweep, double dtheta) {
  ArcOracle best{0.0, 1e300};
  for (double th = 0.0; th <= sweep + 1e-15; th += dtheta) {
    const double d = std::hypot(p.x - radius * std::cos(th), p.y - radius * std::sin(th));
    if (d < best.dist) best = {radius * th, d};
  }
  return best;
}

}  // namespace

TEST_CASE("lane construction validates the polyline") {
  CHECK_THROWS_AS(ReferenceLane({{0.0, 0.0}}), Error);
  try {
    ReferenceLane({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidLane);
  }
  const ReferenceLane lane({{0.0, 0.0}, {3.0, 4.0}, {3.0, 10.0}});
  const auto& cum = lane.cum_arclength();
  REQUIRE(cum.size() == 3);
  CHECK(cum[0] == 0.0);
  CHECK(cum[1] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cum[2] == doctest::Approx(11.0).epsilon(1e-12));
}

TEST_CASE("straight lane projections") {
  const auto lane = straight_lane();
  auto fp = to_frenet({3.0, 1.0}, lane);
  CHECK(fp.s == doctest::Approx(3.0));
  CHECK(fp.l == doctest::Approx(1.0));
  fp = to_frenet({0.0, 0.0}, lane);
  CHECK(fp.s == 0.0);
  CHECK(fp.l == 0.0);
  fp = to_frenet({50.0, -2.5}, lane);
  CHECK(fp.l == doctest::Approx(-2.5));

  const Vec2 p = to_cartesian(3.0, 1.0, lane);
  CHECK(p.x == doctest::Approx(3.0));
  CHECK(p.y == doctest::Approx(1.0));
  const Vec2 o = to_cartesian(0.0, 0.0, lane);
  CHECK(o.x == 0.0);
  CHECK(o.y == 0.0);
}

TEST_CASE("capture radius and range errors") {
  const auto lane = straight_lane();
  try {
    to_frenet({50.0, 25.0}, lane);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfCaptureRange);
  }
  CHECK_NOTHROW(to_frenet({50.0, 25.0}, lane, 30.0));
  try {
    to_cartesian(100.5, 0.0, lane);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfRange);
  }
  CHECK_THROWS_AS(to_cartesian(-0.1, 0.0, lane), Error);
}

TEST_CASE("quarter circle: point outside the arc end") {
  const double r = 10.0;
  const double sweep = std::numbers::pi / 2;
  const auto lane = arc_lane(r, sweep, 1e-3);
  const Vec2 p{0.0, 11.0};
  const auto fp = to_frenet(p, lane);
  const auto oracle = nearest_on_arc(p, r, sweep, 1e-4);

  CHECK(fp.s == doctest::Approx(5.0 * std::numbers::pi).epsilon(1e-6));
  CHECK(std::abs(fp.s - oracle.s) < 2e-3);
  CHECK(std::abs(fp.l) == doctest::Approx(oracle.dist).epsilon(1e-6));
  // Counter-clockwise travel has its left side toward the center, so the
  // outside of the arc is negative l.
  CHECK(fp.l == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("curved lane: offsets agree with the brute-force circle distance") {
  const double r = 50.0;
  const double sweep = 1.2;
  const auto lane = arc_lane(r, sweep, 1e-3);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> th(0.05, sweep - 0.05), rad(r - 8.0, r + 8.0);
  for (int k = 0; k < 100; ++k) {
    const double a = th(rng), rr = rad(rng);
    const Vec2 p{rr * std::cos(a), rr * std::sin(a)};
    const auto fp = to_frenet(p, lane);
    const auto oracle = nearest_on_arc(p, r, sweep, 1e-5);
    CHECK(std::abs(fp.s - oracle.s) < 1e-2);
    CHECK(std::abs(std::abs(fp.l) - oracle.dist) < 1e-3);
    CHECK((fp.l > 0) == (rr < r));
  }
}

TEST_CASE("round trip over random points near a smooth lane") {
  const double r = 100.0;
  const auto lane = arc_lane(r, 1.0, 0.01);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> su(1.0, lane.length() - 1.0), lu(-15.0, 15.0);
  double worst_fwd = 0.0, worst_back = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double s = su(rng), l = lu(rng);
    const Vec2 p = to_cartesian(s, l, lane);
    const auto fp = to_frenet(p, lane);
    const Vec2 q = to_cartesian(fp.s, fp.l, lane);
    worst_back = std::max(worst_back, std::hypot(p.x - q.x, p.y - q.y));
    worst_fwd = std::max(worst_fwd, std::abs(fp.s - s) + std::abs(fp.l - l));
  }
  CHECK(worst_back < 1e-6);
  CHECK(worst_fwd < 1e-6);
}

TEST_CASE("vertex ties resolve to the smaller s") {
  // Point behind the corner of an L-shaped lane, equidistant from both legs.
  const ReferenceLane lane({{0.0, 0.0}, {10.0, 0.0}, {10.0, 10.0}});
  const auto fp = to_frenet({11.0, -1.0}, lane);
  CHECK(fp.s <= 10.0 + 1e-12);
}

TEST_CASE("state validity") {
  FrenetState st;
  CHECK(st.valid());
  st.t = -1.0;
  CHECK_FALSE(st.valid());
  st.t = 0.0;
  st.s_dot = std::nan("");
  CHECK_FALSE(st.valid());
}
