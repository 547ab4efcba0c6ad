#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssc/bezier.hpp"
#include "ssc/corridor.hpp"
#include "ssc/frenet.hpp"
#include "ssc/qp_solver.hpp"

namespace ssc {

struct OptimizerConfig {
  double w_s = 1.0;
  double w_l = 1.0;
  DynamicLimits limits;
  double tolerance = 1e-6;
  int max_iterations = 20000;
  int degree = bezier::kDefaultDegree;
  // Highest derivative order kept continuous at junctions (2 or 3).
  int continuity_order = 3;
};

// Rows of the assembled problem, by kind, for inspection and tests.
struct QpLayout {
  int segments = 0;
  int degree = 0;
  int boundary_rows = 0;
  int junction_rows = 0;
  int position_rows = 0;
  int velocity_rows = 0;
  int acceleration_rows = 0;

  int points_per_dim() const { return degree + 1; }
  // Variable index of control point i of dimension d (0 = s, 1 = l) in segment j.
  int index(int j, int d, int i) const { return j * 2 * (degree + 1) + d * (degree + 1) + i; }
};

struct AssembledQp {
  QpProblem problem;
  QpLayout layout;
  std::vector<double> alphas;
};

class PiecewiseBezierTrajectory {
 public:
  PiecewiseBezierTrajectory() = default;
  explicit PiecewiseBezierTrajectory(std::vector<bezier::BezierSegment> segments);

  const std::vector<bezier::BezierSegment>& segments() const { return segments_; }
  std::vector<double> junction_times() const;
  double t_begin() const { return segments_.front().t_start; }
  double t_end() const { return segments_.back().t_end(); }

  // Segment owning t; a junction belongs to the later segment.
  std::size_t segment_index(double t) const;
  double eval(double t, int order, bezier::Dim dim) const;

 private:
  std::vector<bezier::BezierSegment> segments_;
};

// Throws Error(kStartOutsideCorridor / kGoalOutsideCorridor).
AssembledQp assemble_qp(const Corridor& corridor, const FrenetState& start, const FrenetState& goal,
                        const OptimizerConfig& cfg);

struct SolveOutcome {
  QpStatus status = QpStatus::kNumericalFailure;
  QpResult qp;
  double cost = 0.0;  // sum_j sum_d w_d p^T Q p / alpha^3
};

SolveOutcome solve(const AssembledQp& assembled, const OptimizerConfig& cfg);

// Throws Error(kDimensionMismatch).
PiecewiseBezierTrajectory build_trajectory(const Eigen::VectorXd& solution, const Corridor& corridor,
                                           int degree = bezier::kDefaultDegree);

// Squared-jerk cost of a trajectory computed from its control points.
double jerk_cost(const PiecewiseBezierTrajectory& traj, double w_s, double w_l);

}  // namespace ssc
