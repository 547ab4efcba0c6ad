#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssc/corridor.hpp"
#include "ssc/frenet.hpp"
#include "ssc/optimizer.hpp"
#include "ssc/semantics.hpp"

namespace ssc {

struct VerificationConfig {
  double sample_dt = 1e-3;
  double position_tolerance = 1e-6;    // m
  double derivative_tolerance = 1e-6;  // m/s, m/s^2
  double continuity_tolerance = 1e-6;  // relative
  double boundary_tolerance = 1e-6;
  bool check_grid = true;
  std::optional<FrenetState> start;
  std::optional<FrenetState> goal;
};

// worst_violation is the largest signed excess over the bound seen by the
// check: negative values are slack.
struct CheckRecord {
  std::string id;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  double t_worst = 0.0;
  std::size_t samples = 0;
  bool passed = true;
  std::string detail;
};

struct VerificationReport {
  bool pass = true;
  std::vector<CheckRecord> checks;

  const CheckRecord* find(const std::string& id) const;
};

// Independent of the optimizer: curves are evaluated through their monomial
// expansion and control-point bounds through forward differences.
VerificationReport verify(const PiecewiseBezierTrajectory& traj, const Corridor& corridor,
                          const SltGrid& grid, const VerificationConfig& cfg = {});

// True iff the point lies in no free cell (cells whose closure holds the point).
bool point_in_collision(const SltGrid& grid, double s, double l, double t);

}  // namespace ssc
