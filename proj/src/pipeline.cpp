#include "ssc/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ssc/errors.hpp"

namespace ssc {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << text;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<Sample>& samples, double Sample::*a, double Sample::*b) {
  std::string text = header + "\n";
  for (const Sample& s : samples) {
    text += fmt(s.t) + "," + fmt(s.*a);
    if (b) text += "," + fmt(s.*b);
    text += "\n";
  }
  write_text(path, text);
}

}  // namespace

const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::kOk: return "Ok";
    case PlanStatus::kParseError: return "ParseError";
    case PlanStatus::kSeedCollision: return "SeedCollision";
    case PlanStatus::kSeedCubeCollision: return "SeedCubeCollision";
    case PlanStatus::kInfeasible: return "Infeasible";
    case PlanStatus::kVerificationFailure: return "VerificationFailure";
    case PlanStatus::kSolverNumericalFailure: return "SolverNumericalFailure";
    case PlanStatus::kError: return "Error";
  }
  return "?";
}

int exit_code(PlanStatus s) {
  switch (s) {
    case PlanStatus::kOk: return 0;
    case PlanStatus::kError: return 1;
    case PlanStatus::kParseError: return 2;
    case PlanStatus::kSeedCollision: return 3;
    case PlanStatus::kSeedCubeCollision: return 4;
    case PlanStatus::kInfeasible: return 5;
    case PlanStatus::kVerificationFailure: return 6;
    case PlanStatus::kSolverNumericalFailure: return 7;
  }
  return 1;
}

PlanStatus status_from_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kSchemaVersionMismatch: return PlanStatus::kParseError;
    case ErrorCode::kSeedCollision: return PlanStatus::kSeedCollision;
    case ErrorCode::kSeedCubeCollision: return PlanStatus::kSeedCubeCollision;
    // Contradictory semantics leave no feasible trajectory.
    case ErrorCode::kEmptyFeasibleInterval: return PlanStatus::kInfeasible;
    default: return PlanStatus::kError;
  }
}

PlanResult build_scene(const Scenario& sc) {
  PlanResult r;
  r.start = sc.ego.state;
  try {
    const PlannerConfig& cfg = sc.config;
    r.grid = render_occupancy(sc.scene, sc.horizon, cfg.grid);
    r.boundaries = extract_boundaries(sc.scene, cfg.boundary);
    r.simulated = simulate_seeds(sc, *r.grid);
    r.seeds = generate_seeds(r.simulated, sc.ego.state);
    r.goal = goal_state(r.simulated);
    if (r.seeds.size() < 2) throw Error(ErrorCode::kEmptyInput, "horizon shorter than one seed step");
    r.corridor = build_corridor(r.seeds, r.boundaries, *r.grid, cfg.corridor);
    r.corridor = split_first_cube(std::move(r.corridor), r.start, r.seeds);
    // The seed chain's terminal derivatives may sit outside the last cube's bounds.
    const DrivingCube& last = r.corridor.cubes.back();
    r.goal.s_dot = std::clamp(r.goal.s_dot, last.vel_bounds[0].lo, last.vel_bounds[0].hi);
    r.goal.l_dot = std::clamp(r.goal.l_dot, last.vel_bounds[1].lo, last.vel_bounds[1].hi);
    r.goal.s_ddot = std::clamp(r.goal.s_ddot, last.acc_bounds[0].lo, last.acc_bounds[0].hi);
    r.goal.l_ddot = std::clamp(r.goal.l_ddot, last.acc_bounds[1].lo, last.acc_bounds[1].hi);
    r.status = PlanStatus::kOk;
  } catch (const Error& e) {
    r.status = status_from_error(e.code());
    r.message = e.what();
  }
  return r;
}

PlanResult plan(const Scenario& sc) {
  PlanResult r = build_scene(sc);
  if (r.status != PlanStatus::kOk) return r;
  const PlannerConfig& cfg = sc.config;
  try {
    r.qp = assemble_qp(r.corridor, r.start, r.goal, cfg.optimizer);
    r.solution = solve(*r.qp, cfg.optimizer);
    if (r.solution.status == QpStatus::kInfeasible) {
      r.status = PlanStatus::kInfeasible;
      r.message = "Infeasible: " + r.solution.qp.diagnostic;
      return r;
    }
    if (r.solution.status == QpStatus::kNumericalFailure) {
      r.status = PlanStatus::kSolverNumericalFailure;
      r.message = "SolverNumericalFailure: " + r.solution.qp.diagnostic;
      return r;
    }
    r.trajectory = build_trajectory(r.solution.qp.x, r.corridor, cfg.optimizer.degree);
    VerificationConfig vcfg = cfg.verification;
    vcfg.start = r.start;
    vcfg.goal = r.goal;
    r.report = verify(*r.trajectory, r.corridor, *r.grid, vcfg);
    if (!r.report->pass) {
      r.status = PlanStatus::kVerificationFailure;
      r.message = "VerificationFailure:";
      for (const auto& c : r.report->checks) {
        if (!c.passed) r.message += " " + c.id + " (" + fmt(c.worst_violation) + " at t=" + fmt(c.t_worst) + ")";
      }
      return r;
    }
    r.status = PlanStatus::kOk;
  } catch (const Error& e) {
    r.status = status_from_error(e.code());
    r.message = e.what();
  }
  return r;
}

PlanResult replan(const Scenario& scenario, const FrenetState& start) {
  Scenario sc = scenario;
  sc.ego.state = start;
  sc.config.grid.t_origin = start.t;
  return plan(sc);
}

nlohmann::json report_to_json(const PlanResult& r, const Scenario& sc) {
  nlohmann::json j = {{"scenario", sc.name},
                      {"status", to_string(r.status)},
                      {"exit_code", exit_code(r.status)},
                      {"message", r.message},
                      {"seeds", r.seeds.size()},
                      {"cubes", r.corridor.cubes.size()}};
  if (r.qp) {
    j["qp"] = {{"variables", r.qp->problem.num_variables()},
               {"equality_rows", r.qp->problem.A_eq.rows()},
               {"equality_rank", r.solution.qp.equality_rank},
               {"inequality_rows", r.qp->problem.C.rows()},
               {"status", to_string(r.solution.status)},
               {"iterations", r.solution.qp.iterations},
               {"cost", r.solution.cost},
               {"primal_residual", r.solution.qp.primal_residual},
               {"stationarity_residual", r.solution.qp.stationarity_residual}};
  }
  if (r.report) j["verification"] = to_json(*r.report);
  return j;
}

void write_outputs(const PlanResult& r, const Scenario& sc, const std::string& dir, bool dump_corridor) {
  namespace fs = std::filesystem;
  const fs::path out(dir);
  fs::create_directories(out);
  write_text(out / "report.json", report_to_json(r, sc).dump(2) + "\n");
  if (dump_corridor && !r.corridor.cubes.empty()) {
    write_text(out / "corridor.json", to_json(r.corridor).dump(2) + "\n");
  }
  if (!r.trajectory) return;
  nlohmann::json traj = trajectory_to_json(*r.trajectory, sc.lane, sc.config.output_dt);
  traj["cost"] = r.solution.cost;
  if (r.report) traj["verification"] = to_json(*r.report);
  write_text(out / "trajectory.json", traj.dump(2) + "\n");
  const auto samples = sample_trajectory(*r.trajectory, sc.config.output_dt);
  write_csv(out / "s_t.csv", "t,s", samples, &Sample::s, nullptr);
  write_csv(out / "l_t.csv", "t,l", samples, &Sample::l, nullptr);
  write_csv(out / "velocity.csv", "t,s_dot,l_dot", samples, &Sample::s_dot, &Sample::l_dot);
  write_csv(out / "acceleration.csv", "t,s_ddot,l_ddot", samples, &Sample::s_ddot, &Sample::l_ddot);
}

}  // namespace ssc
