#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssc/corridor.hpp"
#include "ssc/errors.hpp"
#include "ssc/optimizer.hpp"
#include "ssc/scenario_io.hpp"
#include "ssc/semantics.hpp"
#include "ssc/validation.hpp"

namespace ssc {

enum class PlanStatus {
  kOk,
  kParseError,
  kSeedCollision,
  kSeedCubeCollision,
  kInfeasible,
  kVerificationFailure,
  kSolverNumericalFailure,
  kError,
};

const char* to_string(PlanStatus s);
// 0 for kOk; distinct non-zero codes otherwise (1 for unclassified errors).
int exit_code(PlanStatus s);
PlanStatus status_from_error(ErrorCode code);

struct PlanResult {
  PlanStatus status = PlanStatus::kError;
  std::string message;
  std::optional<SltGrid> grid;
  std::vector<SemanticBoundary> boundaries;
  std::vector<FrenetState> simulated;
  std::vector<Seed> seeds;
  Corridor corridor;
  FrenetState start;
  FrenetState goal;
  std::optional<AssembledQp> qp;
  SolveOutcome solution;
  std::optional<PiecewiseBezierTrajectory> trajectory;
  std::optional<VerificationReport> report;
};

// Runs grid -> boundaries -> seeds -> corridor and stops there.
PlanResult build_scene(const Scenario& scenario);

// Full pipeline: build_scene, then QP solve and verification.
PlanResult plan(const Scenario& scenario);

// Same scenario planned from another initial state (t, s, l and derivatives).
PlanResult replan(const Scenario& scenario, const FrenetState& start);

// Writes trajectory.json, corridor.json (if requested), report.json and the
// s-t, l-t, velocity and acceleration CSV files into dir.
void write_outputs(const PlanResult& result, const Scenario& scenario, const std::string& dir,
                   bool dump_corridor);

nlohmann::json report_to_json(const PlanResult& result, const Scenario& scenario);

}  // namespace ssc
