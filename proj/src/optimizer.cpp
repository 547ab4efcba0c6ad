#include "ssc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInsideEps = 1e-9;

struct RowBuilder {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<double> lo;
  std::vector<double> hi;

  void add(std::vector<std::pair<int, double>> coeffs, double l, double h) {
    rows.push_back(std::move(coeffs));
    lo.push_back(l);
    hi.push_back(h);
  }

  MatrixXd matrix(int n) const {
    MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (const auto& [c, v] : rows[r]) m(static_cast<Eigen::Index>(r), c) += v;
    }
    return m;
  }
};

double state_value(const FrenetState& st, int d, int k) {
  if (d == 0) return k == 0 ? st.s : (k == 1 ? st.s_dot : st.s_ddot);
  return k == 0 ? st.l : (k == 1 ? st.l_dot : st.l_ddot);
}

std::string describe(const FrenetState& st) {
  std::ostringstream os;
  os << "(t=" << st.t << ", s=" << st.s << ", l=" << st.l << ")";
  return os.str();
}

}  // namespace

PiecewiseBezierTrajectory::PiecewiseBezierTrajectory(std::vector<bezier::BezierSegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorCode::kEmptyInput, "trajectory has no segments");
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const auto& seg = segments_[j];
    if (!(seg.alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "segment alpha must be > 0");
    for (const auto& pts : seg.control_points) {
      if (static_cast<int>(pts.size()) != seg.degree + 1) {
        throw Error(ErrorCode::kDimensionMismatch, "segment control point count != degree + 1");
      }
    }
    if (j > 0 && std::abs(seg.t_start - segments_[j - 1].t_end()) > 1e-9) {
      throw Error(ErrorCode::kNonIncreasingTime, "segments are not contiguous in time");
    }
  }
}

std::vector<double> PiecewiseBezierTrajectory::junction_times() const {
  std::vector<double> t;
  t.reserve(segments_.size() + 1);
  for (const auto& seg : segments_) t.push_back(seg.t_start);
  t.push_back(segments_.back().t_end());
  return t;
}

std::size_t PiecewiseBezierTrajectory::segment_index(double t) const {
  std::size_t j = 0;
  while (j + 1 < segments_.size() && t >= segments_[j + 1].t_start) ++j;
  return j;
}

double PiecewiseBezierTrajectory::eval(double t, int order, bezier::Dim dim) const {
  return bezier::eval(segments_[segment_index(t)], t, order, dim);
}

AssembledQp assemble_qp(const Corridor& corridor, const FrenetState& start, const FrenetState& goal,
                        const OptimizerConfig& cfg) {
  if (corridor.cubes.empty()) throw Error(ErrorCode::kEmptyInput, "corridor has no cubes");
  if (!(cfg.w_s > 0.0 && cfg.w_l > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "jerk weights must be > 0");
  }
  if (cfg.continuity_order < 0 || cfg.continuity_order > bezier::kMaxOrder) {
    throw Error(ErrorCode::kInvalidArgument, "continuity order must be in [0, 3]");
  }
  const auto& cubes = corridor.cubes;
  const Box3& first = cubes.front().bounds;
  const Box3& last = cubes.back().bounds;
  if (!first.contains_point(start.s, start.l, start.t, kInsideEps) ||
      std::abs(start.t - first[Axis::kT].lo) > kInsideEps) {
    throw Error(ErrorCode::kStartOutsideCorridor, "start " + describe(start) + " is not at the entry of cube 0");
  }
  if (!last.contains_point(goal.s, goal.l, goal.t, kInsideEps) ||
      std::abs(goal.t - last[Axis::kT].hi) > kInsideEps) {
    throw Error(ErrorCode::kGoalOutsideCorridor, "goal " + describe(goal) + " is not at the exit of the last cube");
  }

  const int m = cfg.degree;
  const int nseg = static_cast<int>(cubes.size());
  AssembledQp out;
  QpLayout& lay = out.layout;
  lay.segments = nseg;
  lay.degree = m;
  const int nvar = 2 * nseg * (m + 1);

  std::array<MatrixXd, bezier::kMaxOrder + 1> D;
  for (int k = 0; k <= bezier::kMaxOrder; ++k) D[k] = bezier::derivative_operator(m, k);

  out.alphas.resize(nseg);
  for (int j = 0; j < nseg; ++j) {
    out.alphas[j] = cubes[j].bounds[Axis::kT].length();
    if (!(out.alphas[j] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cube with empty t extent");
  }

  QpProblem& qp = out.problem;
  qp.H = MatrixXd::Zero(nvar, nvar);
  qp.f = VectorXd::Zero(nvar);
  const MatrixXd Q = bezier::jerk_gram(m);
  for (int j = 0; j < nseg; ++j) {
    const double a3 = std::pow(out.alphas[j], 3);
    for (int d = 0; d < 2; ++d) {
      const double w = d == 0 ? cfg.w_s : cfg.w_l;
      qp.H.block(lay.index(j, d, 0), lay.index(j, d, 0), m + 1, m + 1) = 2.0 * w * Q / a3;
    }
  }

  // Row r of D_k applied to segment j, dimension d, scaled to the time derivative.
  auto deriv_row = [&](int j, int d, int k, int r, double sign) {
    std::vector<std::pair<int, double>> coeffs;
    const double scale = sign * std::pow(out.alphas[j], 1 - k);
    for (int i = 0; i <= m; ++i) {
      const double v = D[k](r, i);
      if (v != 0.0) coeffs.emplace_back(lay.index(j, d, i), scale * v);
    }
    return coeffs;
  };

  RowBuilder eq;
  for (int d = 0; d < 2; ++d) {
    for (int k = 0; k <= 2; ++k) {
      const double v0 = state_value(start, d, k);
      eq.add(deriv_row(0, d, k, 0, 1.0), v0, v0);
      const double v1 = state_value(goal, d, k);
      eq.add(deriv_row(nseg - 1, d, k, m - k, 1.0), v1, v1);
      lay.boundary_rows += 2;
    }
  }
  for (int j = 0; j + 1 < nseg; ++j) {
    for (int d = 0; d < 2; ++d) {
      for (int k = 0; k <= cfg.continuity_order; ++k) {
        auto row = deriv_row(j, d, k, m - k, 1.0);
        auto next = deriv_row(j + 1, d, k, 0, -1.0);
        row.insert(row.end(), next.begin(), next.end());
        eq.add(std::move(row), 0.0, 0.0);
        ++lay.junction_rows;
      }
    }
  }
  qp.A_eq = eq.matrix(nvar);
  qp.b_eq = Eigen::Map<const VectorXd>(eq.lo.data(), static_cast<Eigen::Index>(eq.lo.size()));

  RowBuilder in;
  for (int j = 0; j < nseg; ++j) {
    const DrivingCube& cube = cubes[j];
    const double a = out.alphas[j];
    for (int d = 0; d < 2; ++d) {
      const Interval pos = cube.bounds[d == 0 ? Axis::kS : Axis::kL];
      for (int i = 0; i <= m; ++i) {
        in.add({{lay.index(j, d, i), a}}, pos.lo, pos.hi);
        ++lay.position_rows;
      }
      const Interval vel = cube.vel_bounds[d].intersect(cfg.limits.vel[d]);
      const Interval acc = cube.acc_bounds[d].intersect(cfg.limits.acc[d]);
      if (vel.lo > vel.hi || acc.lo > acc.hi) {
        throw Error(ErrorCode::kEmptyFeasibleInterval,
                    "cube " + std::to_string(j) + " derivative bounds are empty");
      }
      for (int i = 0; i < m; ++i) {
        in.add(deriv_row(j, d, 1, i, 1.0), vel.lo, vel.hi);
        ++lay.velocity_rows;
      }
      for (int i = 0; i < m - 1; ++i) {
        in.add(deriv_row(j, d, 2, i, 1.0), acc.lo, acc.hi);
        ++lay.acceleration_rows;
      }
    }
  }
  qp.C = in.matrix(nvar);
  qp.lower = Eigen::Map<const VectorXd>(in.lo.data(), static_cast<Eigen::Index>(in.lo.size()));
  qp.upper = Eigen::Map<const VectorXd>(in.hi.data(), static_cast<Eigen::Index>(in.hi.size()));
  return out;
}

SolveOutcome solve(const AssembledQp& assembled, const OptimizerConfig& cfg) {
  SolveOutcome out;
  out.qp = solve_qp(assembled.problem, {cfg.tolerance, cfg.max_iterations});
  out.status = out.qp.status;
  // 0.5 x^T H x with H = 2 w Q / alpha^3 is exactly the jerk cost.
  out.cost = out.qp.x.size() > 0 ? out.qp.objective : 0.0;
  return out;
}

PiecewiseBezierTrajectory build_trajectory(const VectorXd& solution, const Corridor& corridor,
                                           int degree) {
  const auto nseg = corridor.cubes.size();
  const auto expected = static_cast<Eigen::Index>(2 * nseg * (degree + 1));
  if (nseg == 0 || solution.size() != expected) {
    std::ostringstream os;
    os << "solution has " << solution.size() << " entries, corridor needs " << expected;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
  std::vector<bezier::BezierSegment> segs(nseg);
  Eigen::Index k = 0;
  for (std::size_t j = 0; j < nseg; ++j) {
    auto& seg = segs[j];
    seg.degree = degree;
    seg.t_start = corridor.cubes[j].bounds[Axis::kT].lo;
    seg.alpha = corridor.cubes[j].bounds[Axis::kT].length();
    for (int d = 0; d < 2; ++d) {
      seg.control_points[d].resize(degree + 1);
      for (int i = 0; i <= degree; ++i) seg.control_points[d][i] = solution[k++];
    }
  }
  return PiecewiseBezierTrajectory(std::move(segs));
}

double jerk_cost(const PiecewiseBezierTrajectory& traj, double w_s, double w_l) {
  double cost = 0.0;
  for (const auto& seg : traj.segments()) {
    const MatrixXd H = bezier::jerk_hessian(seg.degree, seg.alpha);
    for (int d = 0; d < 2; ++d) {
      const Eigen::Map<const VectorXd> p(seg.control_points[d].data(), seg.degree + 1);
      cost += (d == 0 ? w_s : w_l) * p.dot(H * p);
    }
  }
  return cost;
}

}  // namespace ssc
