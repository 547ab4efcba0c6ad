#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ssc/corridor.hpp"
#include "ssc/frenet.hpp"
#include "ssc/optimizer.hpp"
#include "ssc/semantics.hpp"
#include "ssc/validation.hpp"

namespace ssc {

inline constexpr int kSchemaVersion = 1;

// Parameters of the scripted forward simulation that produces seeds.
struct SeedConfig {
  double dt = 0.15;
  double accel_max = 1.5;
  double decel_max = 3.0;
  // Braking toward a stop target starts once the required constant
  // deceleration reaches this value.
  double commit_decel = 2.0;
  // Deceleration used to slow down ahead of a speed-limit band.
  double plan_decel = 2.0;
  // Gap kept between the ego front and a red-light stop line.
  double stop_buffer = 1.0;
  // Lateral rate used to settle onto a lane-keep offset.
  double lateral_rate = 1.0;
  // Seeds inside a speed-limit band hold this much below the limit (m/s).
  double speed_margin = 0.5;
};

struct PlannerConfig {
  GridConfig grid;
  BoundaryConfig boundary;
  CorridorConfig corridor;
  OptimizerConfig optimizer;
  VerificationConfig verification;
  SeedConfig seeds;
  double output_dt = 0.01;
  double capture_radius = kDefaultCaptureRadius;
};

enum class BehaviorKind { kLaneKeep, kLaneChange };

struct Behavior {
  BehaviorKind kind = BehaviorKind::kLaneKeep;
  double target_speed = 0.0;
  double lateral_offset = 0.0;  // lane keep
  double target_offset = 0.0;   // lane change
  double duration = 0.0;
  double start_time = 0.0;
};

struct EgoSpec {
  FrenetState state;
  double half_length = 0.0;
  double half_width = 0.0;
};

struct Scenario {
  std::string name;
  ReferenceLane lane{{{0.0, 0.0}, {1.0, 0.0}}};
  SemanticScene scene;
  EgoSpec ego;
  Behavior behavior;
  double horizon = 0.0;
  PlannerConfig config;  // defaults with the scenario overrides applied
};

// Throws Error(kParseError) with a line or field location, or
// Error(kSchemaVersionMismatch).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string read_file(const std::string& path);

// Applies a "config" object (same shape as the scenario's) on top of cfg.
// `where` prefixes field paths in diagnostics.
void apply_config_overrides(PlannerConfig& cfg, const nlohmann::json& overrides,
                            const std::string& where = "config");

// Scripted rollout from the ego state over the horizon, t = t0 + k dt.
// Throws Error(kSeedCollision) if consecutive states sweep through an
// occupied cell.
std::vector<FrenetState> simulate_seeds(const Scenario& scenario, const SltGrid& grid);

// Terminal state to pin: the last simulated state with its derivatives.
FrenetState goal_state(const std::vector<FrenetState>& simulated);

// ---- serialization -----------------------------------------------------

nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const Corridor& corridor);
nlohmann::json trajectory_to_json(const PiecewiseBezierTrajectory& traj, const ReferenceLane& lane,
                                  double sample_dt);
// Reads the segments of a trajectory document. Throws Error(kParseError).
PiecewiseBezierTrajectory trajectory_from_json(const nlohmann::json& doc);

struct Sample {
  double t, s, l, s_dot, l_dot, s_ddot, l_ddot;
};
std::vector<Sample> sample_trajectory(const PiecewiseBezierTrajectory& traj, double dt);

}  // namespace ssc
