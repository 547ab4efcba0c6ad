#include <doctest.h>

#include <cmath>

#include "ssc/errors.hpp"
#include "ssc/optimizer.hpp"

using namespace ssc;

namespace {

DrivingCube cube(Interval s, Interval l, Interval t, const DynamicLimits& lim = {}) {
  DrivingCube c;
  c.bounds = Box3{{s, l, t}};
  c.vel_bounds = lim.vel;
  c.acc_bounds = lim.acc;
  return c;
}

FrenetState state(double t, double s, double l, double s_dot = 0.0, double l_dot = 0.0) {
  FrenetState st;
  st.t = t;
  st.s = s;
  st.l = l;
  st.s_dot = s_dot;
  st.l_dot = l_dot;
  return st;
}

Corridor three_cubes() {
  return Corridor{{cube({-1.0, 7.0}, {-1.0, 1.0}, {0.0, 1.0}), cube({3.0, 12.0}, {-1.0, 1.5}, {1.0, 2.0}),
                   cube({8.0, 17.0}, {-0.5, 1.5}, {2.0, 3.0})}};
}

// Squared jerk by composite Gauss-Legendre over each segment.
double quadrature_cost(const PiecewiseBezierTrajectory& traj, double w_s, double w_l) {
  const double x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double total = 0.0;
  for (const auto& seg : traj.segments()) {
    const int pieces = 4;
    const double h = seg.alpha / pieces;
    for (int p = 0; p < pieces; ++p) {
      for (int k = 0; k < 3; ++k) {
        const double t = seg.t_start + h * (p + 0.5 * (x[k] + 1.0));
        const double js = bezier::eval(seg, t, 3, bezier::Dim::kS);
        const double jl = bezier::eval(seg, t, 3, bezier::Dim::kL);
        total += 0.5 * h * w[k] * (w_s * js * js + w_l * jl * jl);
      }
    }
  }
  return total;
}

}  // namespace

TEST_CASE("constraint counts") {
  OptimizerConfig cfg;
  Corridor one{{cube({0.0, 10.0}, {-1.0, 1.0}, {0.0, 2.0})}};
  auto a = assemble_qp(one, state(0.0, 1.0, 0.0), state(2.0, 5.0, 0.0), cfg);
  CHECK(a.problem.num_variables() == 12);
  CHECK(a.problem.A_eq.rows() == 12);
  CHECK(a.layout.boundary_rows == 12);
  CHECK(a.layout.junction_rows == 0);
  CHECK(a.problem.C.rows() == 2 * (6 + 5 + 4));

  const auto three = three_cubes();
  a = assemble_qp(three, state(0.0, 0.0, 0.0, 5.0), state(3.0, 15.0, 0.5, 5.0), cfg);
  CHECK(a.problem.num_variables() == 36);
  CHECK(a.layout.junction_rows == 16);
  CHECK(a.problem.A_eq.rows() == 28);
  CHECK(a.layout.position_rows == 36);
  CHECK(a.layout.velocity_rows == 30);
  CHECK(a.layout.acceleration_rows == 24);

  cfg.continuity_order = 2;
  a = assemble_qp(three, state(0.0, 0.0, 0.0, 5.0), state(3.0, 15.0, 0.5, 5.0), cfg);
  CHECK(a.layout.junction_rows == 12);
}

TEST_CASE("variable layout is segment-major, dimension-minor") {
  QpLayout lay;
  lay.degree = 5;
  CHECK(lay.index(0, 0, 0) == 0);
  CHECK(lay.index(0, 1, 0) == 6);
  CHECK(lay.index(1, 0, 2) == 14);
  CHECK(lay.index(2, 1, 5) == 35);
}

TEST_CASE("velocity rows carry the cube's speed bound") {
  auto c = three_cubes();
  c.cubes[1].vel_bounds[0] = {0.0, 4.0};
  const auto a = assemble_qp(c, state(0.0, 0.0, 0.0, 3.0), state(3.0, 12.0, 0.5, 3.0), OptimizerConfig{});
  // Segment 1's s rows follow segment 0's 30 rows: 6 position then 5 velocity.
  const int base = 30 + 6;
  for (int r = 0; r < 5; ++r) {
    CHECK(a.problem.upper[base + r] == 4.0);
    // Each velocity row touches only segment 1's s control points.
    for (int v = 0; v < a.problem.num_variables(); ++v) {
      if (a.problem.C(base + r, v) != 0.0) {
        CHECK(v >= a.layout.index(1, 0, 0));
        CHECK(v <= a.layout.index(1, 0, 5));
      }
    }
  }
}

TEST_CASE("start and goal must sit at the corridor ends") {
  const auto c = three_cubes();
  try {
    assemble_qp(c, state(0.0, 8.0, 0.0), state(3.0, 15.0, 0.0), OptimizerConfig{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStartOutsideCorridor);
  }
  try {
    assemble_qp(c, state(0.0, 0.0, 0.0), state(3.0, 15.0, 1.8), OptimizerConfig{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGoalOutsideCorridor);
  }
  try {
    assemble_qp(c, state(0.0, 0.0, 0.0), state(2.5, 15.0, 0.0), OptimizerConfig{});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGoalOutsideCorridor);
  }
}

TEST_CASE("zero motion gives the constant curve at zero cost") {
  Corridor one{{cube({5.0, 15.0}, {-1.0, 1.0}, {2.0, 4.0})}};
  const OptimizerConfig cfg;
  const auto a = assemble_qp(one, state(2.0, 10.0, 0.2), state(4.0, 10.0, 0.2), cfg);
  const auto sol = solve(a, cfg);
  REQUIRE(sol.status == QpStatus::kOptimal);
  // Rounding floor of p^T Q p / alpha^3 at this solution's magnitude.
  const double floor = 1e-13 * bezier::jerk_gram(5).norm() * sol.qp.x.squaredNorm() / 8.0;
  CHECK(std::abs(sol.cost) <= floor);
  const auto traj = build_trajectory(sol.qp.x, one);
  for (double t = 2.0; t <= 4.0; t += 0.1) {
    CHECK(traj.eval(t, 0, bezier::Dim::kS) == doctest::Approx(10.0));
    CHECK(traj.eval(t, 0, bezier::Dim::kL) == doctest::Approx(0.2));
  }
}

TEST_CASE("three-cube solve: closed-loop checks") {
  const auto c = three_cubes();
  const OptimizerConfig cfg;
  const auto start = state(0.0, 0.0, 0.0, 5.0, 0.3);
  const auto goal = state(3.0, 14.0, 0.8, 4.0, 0.0);
  const auto a = assemble_qp(c, start, goal, cfg);
  const auto sol = solve(a, cfg);
  REQUIRE(sol.status == QpStatus::kOptimal);
  CHECK(sol.qp.primal_residual <= cfg.tolerance);
  CHECK(sol.qp.stationarity_residual <= cfg.tolerance);
  const auto traj = build_trajectory(sol.qp.x, c);
  REQUIRE(traj.segments().size() == 3);
  const auto jt = traj.junction_times();
  REQUIRE(jt.size() == 4);
  CHECK(jt[0] == 0.0);
  CHECK(jt[1] == 1.0);
  CHECK(jt[2] == 2.0);
  CHECK(jt[3] == 3.0);
  CHECK(traj.segment_index(1.0) == 1);
  CHECK(traj.segment_index(3.0) == 2);

  using bezier::Dim;
  CHECK(traj.eval(0.0, 0, Dim::kS) == doctest::Approx(0.0).scale(1.0));
  CHECK(traj.eval(0.0, 1, Dim::kS) == doctest::Approx(5.0));
  CHECK(traj.eval(0.0, 1, Dim::kL) == doctest::Approx(0.3));
  CHECK(traj.eval(0.0, 2, Dim::kS) == doctest::Approx(0.0).scale(1.0));
  CHECK(traj.eval(3.0, 0, Dim::kS) == doctest::Approx(14.0));
  CHECK(traj.eval(3.0, 1, Dim::kS) == doctest::Approx(4.0));
  CHECK(traj.eval(3.0, 0, Dim::kL) == doctest::Approx(0.8));

  // Dense samples stay inside the owning cube with derivatives in bounds.
  for (int k = 0; k <= 3000; ++k) {
    const double t = k * 1e-3;
    const auto& cb = c.cubes[traj.segment_index(t)];
    const double s = traj.eval(t, 0, Dim::kS), l = traj.eval(t, 0, Dim::kL);
    CHECK(cb.bounds[Axis::kS].contains(s, 1e-9));
    CHECK(cb.bounds[Axis::kL].contains(l, 1e-9));
    CHECK(cb.vel_bounds[0].contains(traj.eval(t, 1, Dim::kS), 1e-7));
    CHECK(cb.acc_bounds[1].contains(traj.eval(t, 2, Dim::kL), 1e-7));
  }

  // Junction continuity up to jerk.
  for (double tj : {1.0, 2.0}) {
    const auto& left = traj.segments()[traj.segment_index(tj) - 1];
    const auto& right = traj.segments()[traj.segment_index(tj)];
    for (int k = 0; k <= 3; ++k) {
      const double a1 = bezier::eval(left, tj, k, Dim::kS), b1 = bezier::eval(right, tj, k, Dim::kS);
      CHECK(std::abs(a1 - b1) <= 1e-6 * std::max(1.0, std::abs(a1)));
    }
  }

  const double quad = quadrature_cost(traj, cfg.w_s, cfg.w_l);
  CHECK(sol.cost == doctest::Approx(quad).epsilon(1e-6));
  CHECK(jerk_cost(traj, cfg.w_s, cfg.w_l) == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("time dilation scales the optimal cost by c^-5") {
  DynamicLimits wide;
  wide.vel = {Interval{-1e3, 1e3}, Interval{-1e3, 1e3}};
  wide.acc = {Interval{-1e3, 1e3}, Interval{-1e3, 1e3}};
  OptimizerConfig cfg;
  cfg.limits = wide;
  auto run = [&](double c) {
    Corridor cor{{cube({-50.0, 50.0}, {-20.0, 20.0}, {0.0, 1.0 * c}, wide),
                  cube({-50.0, 50.0}, {-20.0, 20.0}, {1.0 * c, 2.5 * c}, wide)}};
    FrenetState a = state(0.0, 0.0, 0.0, 4.0 / c, 1.0 / c);
    a.s_ddot = 0.5 / (c * c);
    FrenetState b = state(2.5 * c, 12.0, 3.0, 2.0 / c, 0.0);
    const auto sol = solve(assemble_qp(cor, a, b, cfg), cfg);
    REQUIRE(sol.status == QpStatus::kOptimal);
    return sol.cost;
  };
  const double base = run(1.0);
  REQUIRE(base > 0.0);
  for (double c : {0.5, 2.0, 3.0}) CHECK(run(c) == doctest::Approx(base * std::pow(c, -5)).epsilon(1e-6));
}

TEST_CASE("sufficient bounds reject a trajectory that satisfies the continuous bound") {
  // Rest-to-rest over distance D in time T: the six control points are fully
  // pinned and form the minimum-jerk quintic, whose peak speed is 1.875 D/T.
  // Its middle velocity control point is 5 D/T, so a 2 D/T cap is rejected.
  const double D = 10.0, T = 2.0;
  OptimizerConfig cfg;
  DynamicLimits lim;
  lim.vel[0] = {0.0, 2.0 * D / T};
  lim.acc[0] = {-100.0, 100.0};
  cfg.limits = lim;
  Corridor cor{{cube({-1.0, D + 1.0}, {-1.0, 1.0}, {0.0, T}, lim)}};
  const auto a = assemble_qp(cor, state(0.0, 0.0, 0.0), state(T, D, 0.0), cfg);
  CHECK(solve(a, cfg).status == QpStatus::kInfeasible);

  double peak = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double x = k / 1000.0;
    peak = std::max(peak, D / T * 30.0 * x * x * (1 - x) * (1 - x));
  }
  CHECK(peak == doctest::Approx(1.875 * D / T));
  CHECK(peak <= 2.0 * D / T);

  // With the cap relaxed to the control-point peak the same problem solves.
  lim.vel[0].hi = 5.0 * D / T + 1e-6;
  cfg.limits = lim;
  cor.cubes[0].vel_bounds = lim.vel;
  CHECK(solve(assemble_qp(cor, state(0.0, 0.0, 0.0), state(T, D, 0.0), cfg), cfg).status ==
        QpStatus::kOptimal);
}

TEST_CASE("average speed above the cap is infeasible") {
  OptimizerConfig cfg;
  DynamicLimits lim;
  lim.vel[0] = {0.0, 4.0};
  cfg.limits = lim;
  Corridor cor{{cube({-1.0, 30.0}, {-1.0, 1.0}, {0.0, 5.0}, lim)}};
  // 25 m in 5 s needs an average of 5 m/s.
  const auto sol = solve(assemble_qp(cor, state(0.0, 0.0, 0.0, 4.0), state(5.0, 25.0, 0.0, 4.0), cfg), cfg);
  CHECK(sol.status == QpStatus::kInfeasible);
}

TEST_CASE("jerk continuity rows") {
  const auto cor = three_cubes();
  const auto start = state(0.0, 0.0, 0.0, 5.0), goal = state(3.0, 15.0, 0.5, 5.0);
  OptimizerConfig c3;
  OptimizerConfig c2;
  c2.continuity_order = 2;
  const auto s3 = solve(assemble_qp(cor, start, goal, c3), c3);
  const auto s2 = solve(assemble_qp(cor, start, goal, c2), c2);
  REQUIRE(s3.status == QpStatus::kOptimal);
  REQUIRE(s2.status == QpStatus::kOptimal);
  // Dropping rows can only lower the optimum.
  CHECK(s2.cost <= s3.cost * (1.0 + 1e-9) + 1e-12);
  const auto t3 = build_trajectory(s3.qp.x, cor);
  const auto t2 = build_trajectory(s2.qp.x, cor);
  for (double tj : {1.0, 2.0}) {
    for (auto d : {bezier::Dim::kS, bezier::Dim::kL}) {
      const double left3 = bezier::eval(t3.segments()[tj == 1.0 ? 0 : 1], tj, 3, d);
      const double right3 = bezier::eval(t3.segments()[tj == 1.0 ? 1 : 2], tj, 3, d);
      CHECK(left3 == doctest::Approx(right3).epsilon(1e-6).scale(1.0));
      // k <= 2 still joins acceleration.
      const double left2 = bezier::eval(t2.segments()[tj == 1.0 ? 0 : 1], tj, 2, d);
      const double right2 = bezier::eval(t2.segments()[tj == 1.0 ? 1 : 2], tj, 2, d);
      CHECK(left2 == doctest::Approx(right2).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("build_trajectory checks the solution size") {
  const auto c = three_cubes();
  try {
    build_trajectory(Eigen::VectorXd::Zero(35), c);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}
