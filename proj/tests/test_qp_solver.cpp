#include <doctest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "ssc/errors.hpp"
#include "ssc/qp_solver.hpp"

using namespace ssc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QpProblem make(MatrixXd H, VectorXd f) {
  QpProblem p;
  const auto n = H.rows();
  p.H = std::move(H);
  p.f = std::move(f);
  p.A_eq = MatrixXd(0, n);
  p.b_eq = VectorXd(0);
  p.C = MatrixXd(0, n);
  p.lower = VectorXd(0);
  p.upper = VectorXd(0);
  return p;
}

// Brute force over every active set of the one-sided system G x <= h: solve
// the equality KKT system, keep the candidate that is primal and dual feasible.
std::optional<VectorXd> enumerate_active_sets(const MatrixXd& H, const VectorXd& f, const MatrixXd& G,
                                              const VectorXd& h) {
  const int n = static_cast<int>(H.rows()), m = static_cast<int>(G.rows());
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) act.push_back(i);
    const int k = static_cast<int>(act.size());
    if (k > n) continue;
    MatrixXd K = MatrixXd::Zero(n + k, n + k);
    VectorXd r(n + k);
    K.topLeftCorner(n, n) = H;
    r.head(n) = -f;
    for (int a = 0; a < k; ++a) {
      K.block(0, n + a, n, 1) = G.row(act[a]).transpose();
      K.block(n + a, 0, 1, n) = G.row(act[a]);
      r[n + a] = h[act[a]];
    }
    Eigen::FullPivLU<MatrixXd> lu(K);
    if (!lu.isInvertible()) continue;
    const VectorXd z = lu.solve(r);
    const VectorXd x = z.head(n);
    bool ok = ((G * x - h).array() <= 1e-9).all();
    for (int a = 0; a < k; ++a) ok = ok && z[n + a] >= -1e-9;
    if (ok) return x;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("unconstrained problem") {
  MatrixXd H(2, 2);
  H << 4, 1, 1, 3;
  VectorXd f(2);
  f << 1, 2;
  const auto r = solve_qp(make(H, f));
  REQUIRE(r.status == QpStatus::kOptimal);
  const VectorXd expect = -H.ldlt().solve(f);
  CHECK((r.x - expect).norm() < 1e-10);
  CHECK(r.objective == doctest::Approx(0.5 * expect.dot(H * expect) + f.dot(expect)));
}

TEST_CASE("equality constrained problem against the KKT system") {
  MatrixXd H = MatrixXd::Identity(3, 3);
  H(0, 0) = 2.0;
  VectorXd f(3);
  f << -1, 0, 3;
  auto p = make(H, f);
  p.A_eq = MatrixXd(1, 3);
  p.A_eq << 1, 1, 1;
  p.b_eq = VectorXd::Constant(1, 1.0);
  const auto r = solve_qp(p);
  REQUIRE(r.status == QpStatus::kOptimal);

  MatrixXd K = MatrixXd::Zero(4, 4);
  K.topLeftCorner(3, 3) = H;
  K.block(0, 3, 3, 1) = p.A_eq.transpose();
  K.block(3, 0, 1, 3) = p.A_eq;
  VectorXd rhs(4);
  rhs << -f, 1.0;
  const VectorXd z = K.fullPivLu().solve(rhs);
  CHECK((r.x - z.head(3)).norm() < 1e-10);
  CHECK(r.equality_rank == 1);
}

TEST_CASE("projection onto a half plane") {
  // min (x-2)^2 + (y-1)^2 s.t. x + y <= 1  ->  (1, 0)
  VectorXd f(2);
  f << -4.0, -2.0;
  auto p = make(2.0 * MatrixXd::Identity(2, 2), f);
  p.C = MatrixXd(1, 2);
  p.C << 1, 1;
  p.lower = VectorXd::Constant(1, -kInf);
  p.upper = VectorXd::Constant(1, 1.0);
  const auto r = solve_qp(p);
  REQUIRE(r.status == QpStatus::kOptimal);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(r.primal_residual <= 1e-9);
}

TEST_CASE("two-sided rows and a singular Hessian made convex by equalities") {
  // H only penalizes x0; x1 is tied to x0 by an equality.
  MatrixXd H = MatrixXd::Zero(2, 2);
  H(0, 0) = 1.0;
  auto p = make(H, VectorXd::Zero(2));
  p.A_eq = MatrixXd(1, 2);
  p.A_eq << 1, -1;
  p.b_eq = VectorXd::Zero(1);
  p.C = MatrixXd::Identity(2, 2);
  p.lower = VectorXd::Constant(2, 0.5);
  p.upper = VectorXd::Constant(2, 2.0);
  const auto r = solve_qp(p);
  REQUIRE(r.status == QpStatus::kOptimal);
  CHECK(r.x[0] == doctest::Approx(0.5));
  CHECK(r.x[1] == doctest::Approx(0.5));
}

TEST_CASE("random problems against active-set enumeration") {
  std::mt19937 rng(42);
  std::normal_distribution<double> g(0.0, 1.0);
  int solved = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + trial % 3, m = 3 + trial % 4;
    MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    const MatrixXd H = A * A.transpose() + 0.1 * MatrixXd::Identity(n, n);
    VectorXd f(n), h(m);
    MatrixXd G(m, n);
    for (int i = 0; i < n; ++i) f[i] = 3.0 * g(rng);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) G(i, j) = g(rng);
      h[i] = std::abs(g(rng));  // x = 0 is strictly feasible
    }
    auto p = make(H, f);
    p.C = G;
    p.lower = VectorXd::Constant(m, -kInf);
    p.upper = h;
    const auto r = solve_qp(p);
    REQUIRE(r.status == QpStatus::kOptimal);
    const auto oracle = enumerate_active_sets(H, f, G, h);
    REQUIRE(oracle.has_value());
    CHECK((r.x - *oracle).norm() <= 1e-7 * std::max(1.0, oracle->norm()));
    CHECK(r.primal_residual <= 1e-8);
    CHECK(r.stationarity_residual <= 1e-6);
    ++solved;
  }
  CHECK(solved == 150);
}

TEST_CASE("infeasibility is reported, not thrown") {
  auto p = make(MatrixXd::Identity(1, 1), VectorXd::Zero(1));
  p.C = MatrixXd(2, 1);
  p.C << 1, -1;
  p.lower = VectorXd::Constant(2, -kInf);
  p.upper = VectorXd(2);
  p.upper << 0.0, -1.0;  // x <= 0 and x >= 1
  auto r = solve_qp(p);
  CHECK(r.status == QpStatus::kInfeasible);
  CHECK_FALSE(r.diagnostic.empty());

  auto q = make(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  q.A_eq = MatrixXd(2, 2);
  q.A_eq << 1, 1, 2, 2;
  q.b_eq = VectorXd(2);
  q.b_eq << 1, 3;
  CHECK(solve_qp(q).status == QpStatus::kInfeasible);

  // Row pinned by the equalities outside its bounds.
  auto w = make(MatrixXd::Identity(1, 1), VectorXd::Zero(1));
  w.A_eq = MatrixXd::Ones(1, 1);
  w.b_eq = VectorXd::Constant(1, 5.0);
  w.C = MatrixXd::Ones(1, 1);
  w.lower = VectorXd::Constant(1, 0.0);
  w.upper = VectorXd::Constant(1, 4.0);
  r = solve_qp(w);
  CHECK(r.status == QpStatus::kInfeasible);
}

TEST_CASE("redundant equalities are filtered by rank") {
  auto p = make(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  p.A_eq = MatrixXd(3, 2);
  p.A_eq << 1, 1, 2, 2, 1, 1;
  p.b_eq = VectorXd(3);
  p.b_eq << 1, 2, 1;
  const auto r = solve_qp(p);
  REQUIRE(r.status == QpStatus::kOptimal);
  CHECK(r.equality_rank == 1);
  CHECK(r.x[0] == doctest::Approx(0.5));
  CHECK(r.x[1] == doctest::Approx(0.5));
}

TEST_CASE("size mismatches throw") {
  auto p = make(MatrixXd::Identity(2, 2), VectorXd::Zero(3));
  try {
    solve_qp(p);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}
