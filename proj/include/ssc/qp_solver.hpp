#pragma once

#include <string>

#include <Eigen/Dense>

namespace ssc {

// minimize 0.5 x^T H x + f^T x
// subject to A_eq x = b_eq, lower <= C x <= upper (infinite sides ignored).
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd C;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_variables() const { return static_cast<int>(H.rows()); }
};

enum class QpStatus { kOptimal, kInfeasible, kNumericalFailure };
const char* to_string(QpStatus s);

struct QpSettings {
  double tolerance = 1e-6;
  int max_iterations = 20000;
};

struct QpResult {
  QpStatus status = QpStatus::kNumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double primal_residual = 0.0;        // max absolute constraint violation
  double stationarity_residual = 0.0;  // relative KKT gradient residual
  int iterations = 0;
  int equality_rank = 0;
  std::string diagnostic;
};

// Dense solver: equality constraints are eliminated through a null-space
// basis (redundant rows are dropped by rank), then the reduced strictly
// convex problem is solved with the Goldfarb-Idnani dual active-set method.
// Throws Error(kDimensionMismatch) on inconsistent sizes.
QpResult solve_qp(const QpProblem& problem, const QpSettings& settings = {});

}  // namespace ssc
