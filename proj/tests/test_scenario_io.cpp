#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ssc/errors.hpp"
#include "ssc/optimizer.hpp"
#include "ssc/scenario_io.hpp"

using namespace ssc;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "schema_version": 1,
    "name": "minimal",
    "reference_lane": {"points": [[0, 0], [200, 0]]},
    "ego": {"state": {"s": 0, "l": 0, "s_dot": 15}, "half_length": 2.4, "half_width": 1.0},
    "behavior": {"type": "lane_keep", "target_speed": 15},
    "horizon": 6.0
  })");
}

ErrorCode parse_code(const json& doc, std::string* what = nullptr) {
  try {
    parse_scenario(doc.dump());
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  FAIL("expected a parse failure");
  return ErrorCode::kInvalidArgument;
}

SltGrid grid_for(const Scenario& sc) { return render_occupancy(sc.scene, sc.horizon, sc.config.grid); }

}  // namespace

TEST_CASE("minimal lane-keep scenario parses") {
  const auto sc = parse_scenario(minimal().dump());
  CHECK(sc.name == "minimal");
  CHECK(sc.lane.length() == 200.0);
  CHECK(sc.ego.state.s_dot == 15.0);
  CHECK(sc.behavior.kind == BehaviorKind::kLaneKeep);
  CHECK(sc.horizon == 6.0);
  CHECK(sc.scene.elements.empty());
  CHECK(sc.config.grid.s_max == 200.0);
  CHECK(sc.config.grid.ego_half_length == 2.4);
  CHECK(sc.config.seeds.dt == 0.15);
}

TEST_CASE("fig4 replica parses with one speed-limit boundary") {
  const auto sc = load_scenario(std::string(SSC_SOURCE_DIR) + "/scenarios/fig4_replica.json");
  int dyn = 0;
  for (const auto& e : sc.scene.elements) dyn += std::holds_alternative<DynamicObstacle>(e);
  CHECK(dyn == 2);
  const auto b = extract_boundaries(sc.scene);
  REQUIRE(b.size() == 1);
  CHECK(b[0].hard());
  CHECK(b[0].bound->upper == 6.0);
}

TEST_CASE("parse errors name the field") {
  auto doc = minimal();
  doc["ego"].erase("state");
  std::string what;
  CHECK(parse_code(doc, &what) == ErrorCode::kParseError);
  CHECK(what.find("ego.state") != std::string::npos);

  doc = minimal();
  doc["behavior"]["target_sped"] = 3;
  CHECK(parse_code(doc, &what) == ErrorCode::kParseError);
  CHECK(what.find("behavior.target_sped") != std::string::npos);

  doc = minimal();
  doc["elements"] = json::array({{{"type", "speed_limit"}, {"v_max", -1}, {"s_begin", 0}, {"s_end", 10}}});
  CHECK(parse_code(doc, &what) == ErrorCode::kParseError);
  CHECK(what.find("elements[0]") != std::string::npos);

  doc = minimal();
  doc["horizon"] = "six";
  CHECK(parse_code(doc, &what) == ErrorCode::kParseError);
  CHECK(what.find("horizon") != std::string::npos);

  doc = minimal();
  doc["schema_version"] = 2;
  CHECK(parse_code(doc) == ErrorCode::kSchemaVersionMismatch);

  try {
    parse_scenario("{\n  \"schema_version\": 1,\n  \"name\": oops\n}");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("lane from straight and arc pieces; cartesian ego state") {
  auto doc = minimal();
  doc["reference_lane"] = json::parse(R"({"start": [0, 0], "heading_deg": 0,
      "segments": [{"straight": 50}, {"arc": {"radius": 100, "sweep_deg": 30, "step": 1}}]})");
  doc["ego"]["state"] = json::parse(R"({"x": 10, "y": 1.5, "s_dot": 15})");
  const auto sc = parse_scenario(doc.dump());
  CHECK(sc.lane.length() == doctest::Approx(50.0 + 100.0 * std::numbers::pi / 6).epsilon(1e-3));
  // Normals blend toward the arc over the whole first piece, so (s, l) is
  // only near (10, 1.5); the inverse mapping must be exact.
  const auto back = to_cartesian(sc.ego.state.s, sc.ego.state.l, sc.lane);
  CHECK(back.x == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(back.y == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::abs(sc.ego.state.s - 10.0) < 2e-3);
  CHECK(std::abs(sc.ego.state.l - 1.5) < 2e-3);
}

TEST_CASE("config overrides are applied and checked") {
  auto doc = minimal();
  doc["config"] = json::parse(R"({"grid": {"ds": 0.5}, "optimizer": {"w_s": 2.0, "continuity_order": 2},
      "limits": {"vel_s": [0, 20]}, "seeds": {"accel_max": 1.0}, "output_dt": 0.05})");
  const auto sc = parse_scenario(doc.dump());
  CHECK(sc.config.grid.ds == 0.5);
  CHECK(sc.config.optimizer.w_s == 2.0);
  CHECK(sc.config.optimizer.continuity_order == 2);
  CHECK(sc.config.corridor.limits.vel[0].hi == 20.0);
  CHECK(sc.config.optimizer.limits.vel[0].hi == 20.0);
  CHECK(sc.config.seeds.accel_max == 1.0);
  CHECK(sc.config.output_dt == 0.05);

  PlannerConfig cfg;
  CHECK_THROWS_AS(apply_config_overrides(cfg, json::parse(R"({"grid": {"dz": 1}})")), Error);
  CHECK_THROWS_AS(apply_config_overrides(cfg, json::parse(R"({"grid": {"ds": -1}})")), Error);
}

TEST_CASE("seed rollout at constant speed") {
  const auto sc = parse_scenario(minimal().dump());
  const auto st = simulate_seeds(sc, grid_for(sc));
  REQUIRE(st.size() == 41);
  for (std::size_t k = 0; k < st.size(); ++k) {
    CHECK(st[k].t == doctest::Approx(0.15 * k));
    if (k > 0) CHECK(st[k].s - st[k - 1].s == doctest::Approx(2.25));
    CHECK(st[k].s_dot == 15.0);
    CHECK(st[k].l == 0.0);
  }
  const auto g = goal_state(st);
  CHECK(g.s == st.back().s);
  CHECK(g.s_dot == 15.0);
  CHECK(g.s_ddot == 0.0);
}

TEST_CASE("seed rollout: lane change ramp") {
  auto doc = minimal();
  doc["behavior"] = json::parse(
      R"({"type": "lane_change", "target_offset": 3.5, "duration": 4, "start_time": 0.0, "target_speed": 15})");
  const auto sc = parse_scenario(doc.dump());
  const auto st = simulate_seeds(sc, grid_for(sc));
  for (std::size_t k = 1; k < st.size(); ++k) {
    if (st[k].t <= 4.0 + 1e-9) {
      CHECK((st[k].l - st[k - 1].l) / (st[k].t - st[k - 1].t) == doctest::Approx(0.875));
      if (st[k].t < 4.0 - 1e-9) CHECK(st[k].l_dot == doctest::Approx(0.875));
    } else {
      CHECK(st[k].l == doctest::Approx(3.5));
    }
  }
}

TEST_CASE("seed rollout: acceleration is clipped") {
  auto doc = minimal();
  doc["ego"]["state"]["s_dot"] = 5;
  const auto sc = parse_scenario(doc.dump());
  const auto st = simulate_seeds(sc, grid_for(sc));
  for (std::size_t k = 1; k < st.size(); ++k) {
    CHECK(st[k].s_dot - st[k - 1].s_dot <= sc.config.seeds.accel_max * 0.15 + 1e-12);
    CHECK(st[k].s_dot <= 15.0 + 1e-12);
  }
  // 6 s at the clipped rate leaves it short of the 15 m/s target.
  CHECK(st.back().s_dot == doctest::Approx(std::min(15.0, 5.0 + sc.config.seeds.accel_max * 6.0)));
}

TEST_CASE("seed rollout rejects motion into an obstacle") {
  auto doc = minimal();
  doc["elements"] = json::parse(R"([{"type": "static_obstacle", "s": [40, 42], "l": [-1, 1]}])");
  const auto sc = parse_scenario(doc.dump());
  try {
    simulate_seeds(sc, grid_for(sc));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSeedCollision);
  }
}

TEST_CASE("trajectory document round trip and samples") {
  bezier::BezierSegment a, b;
  a.t_start = 0.0;
  a.alpha = 1.0;
  a.control_points = {{{0, 1, 2, 3.5, 5, 6}, {0, 0, 0.1, 0.2, 0.2, 0.2}}};
  b.t_start = 1.0;
  b.alpha = 0.5;
  b.control_points = {{{12, 13, 14, 15, 16, 17}, {0.4, 0.4, 0.4, 0.4, 0.4, 0.4}}};
  const PiecewiseBezierTrajectory traj({a, b});
  const ReferenceLane lane({{0.0, 0.0}, {100.0, 0.0}});
  const auto doc = trajectory_to_json(traj, lane, 0.01);
  const auto back = trajectory_from_json(json::parse(doc.dump()));
  REQUIRE(back.segments().size() == 2);
  CHECK(back.segments()[1].control_points[0] == b.control_points[0]);
  CHECK(back.segments()[1].alpha == 0.5);
  CHECK(doc["junction_times"] == json::array({0.0, 1.0, 1.5}));

  const auto& smp = doc["samples"];
  REQUIRE(smp["t"].size() == 151);
  for (std::size_t k = 0; k < smp["t"].size(); k += 7) {
    const double t = smp["t"][k].get<double>();
    CHECK(smp["s"][k].get<double>() == doctest::Approx(traj.eval(t, 0, bezier::Dim::kS)));
    CHECK(smp["l_dot"][k].get<double>() == doctest::Approx(traj.eval(t, 1, bezier::Dim::kL)));
    CHECK(smp["x"][k].get<double>() == doctest::Approx(smp["s"][k].get<double>()));
  }
  CHECK(smp["t"].back().get<double>() == 1.5);

  CHECK_THROWS_AS(trajectory_from_json(json::parse(R"({"segments": []})")), Error);
}

TEST_CASE("report serialization") {
  VerificationReport rep;
  rep.pass = false;
  CheckRecord rec;
  rec.id = "velocity_s";
  rec.worst_violation = 0.5;
  rec.passed = false;
  rec.detail = "over";
  rep.checks.push_back(rec);
  const auto j = to_json(rep);
  CHECK(j["pass"] == false);
  CHECK(j["checks"][0]["id"] == "velocity_s");
  CHECK(j["checks"][0]["detail"] == "over");
}
