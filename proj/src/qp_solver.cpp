#include "ssc/qp_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ssc/errors.hpp"

namespace ssc {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DualResult {
  VectorXd x;
  std::vector<int> active;
  VectorXd multipliers;
  int iterations = 0;
  bool infeasible = false;
  bool failed = false;
  int blocking = -1;
};

// Rotation (c, s) taking (a, b) to (hypot(a, b), 0).
bool givens(double a, double b, double& c, double& s) {
  const double h = std::hypot(a, b);
  if (h == 0.0) return false;
  c = a / h;
  s = b / h;
  return true;
}

void rotate_columns(MatrixXd& J, int j, int k, double c, double s) {
  for (int r = 0; r < J.rows(); ++r) {
    const double a = J(r, j);
    const double b = J(r, k);
    J(r, j) = c * a + s * b;
    J(r, k) = -s * a + c * b;
  }
}

// Goldfarb-Idnani for min 0.5 z^T G z + g^T z, N z + b >= 0 (rows of N are
// normals). G = L L^T given by the factorization.
DualResult dual_active_set(const Eigen::LLT<MatrixXd>& llt, const VectorXd& g, const MatrixXd& N,
                           const VectorXd& b, double tol, int max_iterations) {
  const int n = static_cast<int>(g.size());
  const int m = static_cast<int>(N.rows());
  DualResult res;
  MatrixXd J = llt.matrixU().solve(MatrixXd::Identity(n, n));
  MatrixXd R = MatrixXd::Zero(n, n);
  VectorXd x = -llt.solve(g);
  std::vector<int> active;
  std::vector<double> u;
  int iq = 0;

  auto add = [&](VectorXd d) {
    for (int j = n - 1; j > iq; --j) {
      double c, s;
      if (!givens(d[j - 1], d[j], c, s)) continue;
      d[j - 1] = c * d[j - 1] + s * d[j];
      d[j] = 0.0;
      rotate_columns(J, j - 1, j, c, s);
    }
    if (std::abs(d[iq]) <= 1e-12 * std::max(1.0, d.head(iq + 1).norm())) return false;
    R.col(iq).head(iq + 1) = d.head(iq + 1);
    ++iq;
    return true;
  };

  auto drop = [&](int l) {
    for (int k = l; k < iq - 1; ++k) R.col(k) = R.col(k + 1);
    R.col(iq - 1).setZero();
    active.erase(active.begin() + l);
    u.erase(u.begin() + l);
    --iq;
    for (int j = l; j < iq; ++j) {
      double c, s;
      if (!givens(R(j, j), R(j + 1, j), c, s)) continue;
      for (int k = j; k < iq; ++k) {
        const double a = R(j, k);
        const double bb = R(j + 1, k);
        R(j, k) = c * a + s * bb;
        R(j + 1, k) = -s * a + c * bb;
      }
      R(j + 1, j) = 0.0;
      rotate_columns(J, j, j + 1, c, s);
    }
  };

  for (;;) {
    if (res.iterations >= max_iterations) {
      res.failed = true;
      break;
    }
    int p = -1;
    double worst = -tol;
    if (m > 0) {
      const VectorXd slack = N * x + b;
      for (int i = 0; i < m; ++i) {
        if (slack[i] < worst) {
          worst = slack[i];
          p = i;
        }
      }
    }
    if (p < 0) break;

    const VectorXd np = N.row(p).transpose();
    double u_new = 0.0;
    bool added = false;
    while (!added) {
      ++res.iterations;
      if (res.iterations > max_iterations) {
        res.failed = true;
        break;
      }
      const VectorXd d = J.transpose() * np;
      const VectorXd z = J.rightCols(n - iq) * d.tail(n - iq);
      VectorXd r(iq);
      for (int i = iq - 1; i >= 0; --i) {
        double acc = d[i];
        for (int j = i + 1; j < iq; ++j) acc -= R(i, j) * r[j];
        r[i] = acc / R(i, i);
      }
      double t1 = kInf;
      int l = -1;
      for (int k = 0; k < iq; ++k) {
        if (r[k] > 0.0 && u[k] / r[k] < t1) {
          t1 = u[k] / r[k];
          l = k;
        }
      }
      const double sp = np.dot(x) + b[p];
      const double zn = z.dot(np);
      double t2 = kInf;
      if (d.tail(n - iq).squaredNorm() > 1e-20 * std::max(1.0, np.squaredNorm()) && zn > 0.0) {
        t2 = -sp / zn;
      }
      const double t = std::min(t1, t2);
      if (t == kInf) {
        res.infeasible = true;
        res.blocking = p;
        break;
      }
      if (t2 == kInf) {
        for (int k = 0; k < iq; ++k) u[k] -= t * r[k];
        u_new += t;
        drop(l);
        continue;
      }
      x += t * z;
      for (int k = 0; k < iq; ++k) u[k] -= t * r[k];
      u_new += t;
      if (t == t2) {
        if (!add(d)) {
          res.failed = true;
          break;
        }
        active.push_back(p);
        u.push_back(u_new);
        added = true;
      } else {
        drop(l);
      }
    }
    if (res.infeasible || res.failed) break;
  }
  res.x = std::move(x);
  res.active = std::move(active);
  res.multipliers = Eigen::Map<VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  return res;
}

}  // namespace

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kOptimal: return "Optimal";
    case QpStatus::kInfeasible: return "Infeasible";
    case QpStatus::kNumericalFailure: return "SolverNumericalFailure";
  }
  return "?";
}

QpResult solve_qp(const QpProblem& p, const QpSettings& settings) {
  const int n = p.num_variables();
  const auto meq = p.A_eq.rows();
  const auto mi = p.C.rows();
  if (p.H.cols() != n || p.f.size() != n || (meq > 0 && p.A_eq.cols() != n) ||
      p.b_eq.size() != meq || (mi > 0 && p.C.cols() != n) || p.lower.size() != mi ||
      p.upper.size() != mi) {
    throw Error(ErrorCode::kDimensionMismatch, "QP matrices have inconsistent sizes");
  }
  QpResult out;
  const double tol = settings.tolerance;

  // Equality elimination: x = x0 + Z z.
  VectorXd x0 = VectorXd::Zero(n);
  MatrixXd Z = MatrixXd::Identity(n, n);
  if (meq > 0) {
    MatrixXd A = p.A_eq;
    VectorXd bq = p.b_eq;
    for (Eigen::Index i = 0; i < meq; ++i) {
      const double nrm = A.row(i).norm();
      if (nrm > 0.0) {
        A.row(i) /= nrm;
        bq[i] /= nrm;
      }
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A.transpose());
    qr.setThreshold(1e-10);
    const int r = static_cast<int>(qr.rank());
    out.equality_rank = r;
    const MatrixXd Q = qr.householderQ();
    const MatrixXd Rm = qr.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
    const VectorXd pb = qr.colsPermutation().transpose() * bq;
    const VectorXd y = Rm.transpose().triangularView<Eigen::Lower>().solve(pb.head(r));
    x0 = Q.leftCols(r) * y;
    const double eq_res = (A * x0 - bq).cwiseAbs().maxCoeff();
    if (eq_res > 1e-8 * std::max(1.0, bq.cwiseAbs().maxCoeff())) {
      out.status = QpStatus::kInfeasible;
      std::ostringstream os;
      os << "equality constraints are inconsistent (residual " << eq_res << ")";
      out.diagnostic = os.str();
      out.x = x0;
      return out;
    }
    Z = Q.rightCols(n - r);
  }
  const int nr = static_cast<int>(Z.cols());

  // Reduced inequalities as normalized one-sided rows N z + b >= 0.
  std::vector<VectorXd> rows;
  std::vector<double> offs;
  std::vector<std::pair<int, double>> origin;  // (original row, signed scale)
  for (Eigen::Index i = 0; i < mi; ++i) {
    const VectorXd c = (p.C.row(i) * Z).transpose();
    const double shift = p.C.row(i).dot(x0);
    const double nrm = c.norm();
    if (nrm <= 1e-12 * std::max(1.0, p.C.row(i).norm())) {
      if (shift < p.lower[i] - tol || shift > p.upper[i] + tol) {
        out.status = QpStatus::kInfeasible;
        std::ostringstream os;
        os << "inequality row " << i << " is fixed at " << shift << " by the equalities, outside ["
           << p.lower[i] << ", " << p.upper[i] << "]";
        out.diagnostic = os.str();
        out.x = x0;
        return out;
      }
      continue;
    }
    if (std::isfinite(p.lower[i])) {
      rows.push_back(c / nrm);
      offs.push_back((shift - p.lower[i]) / nrm);
      origin.emplace_back(static_cast<int>(i), 1.0 / nrm);
    }
    if (std::isfinite(p.upper[i])) {
      rows.push_back(-c / nrm);
      offs.push_back((p.upper[i] - shift) / nrm);
      origin.emplace_back(static_cast<int>(i), -1.0 / nrm);
    }
  }
  MatrixXd N(static_cast<Eigen::Index>(rows.size()), nr);
  VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    N.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    b[static_cast<Eigen::Index>(k)] = offs[k];
  }

  VectorXd z = VectorXd::Zero(nr);
  VectorXd mu_full = VectorXd::Zero(mi);
  if (nr > 0) {
    MatrixXd G = Z.transpose() * p.H * Z;
    G = 0.5 * (G + G.transpose());
    const VectorXd g = Z.transpose() * (p.H * x0 + p.f);
    Eigen::LLT<MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
      const double eps = 1e-10 * std::max(1.0, G.diagonal().cwiseAbs().maxCoeff());
      llt.compute(G + eps * MatrixXd::Identity(nr, nr));
      if (llt.info() != Eigen::Success) {
        out.status = QpStatus::kNumericalFailure;
        out.diagnostic = "reduced Hessian is not positive definite";
        out.x = x0;
        return out;
      }
    }
    // Violation threshold on normalized rows; kept well below the reported
    // tolerance so active constraints hold to rounding.
    const double vtol = std::min(1e-9, 1e-3 * tol);
    DualResult dr = dual_active_set(llt, g, N, b, vtol, settings.max_iterations);
    out.iterations = dr.iterations;
    z = dr.x;
    if (dr.failed) {
      out.status = QpStatus::kNumericalFailure;
      out.diagnostic = "dual active-set iteration did not converge";
      out.x = x0 + Z * z;
      return out;
    }
    if (dr.infeasible) {
      out.status = QpStatus::kInfeasible;
      const auto [row, scale] = origin[dr.blocking];
      std::ostringstream os;
      os << "no step can satisfy inequality row " << row << " ("
         << (scale > 0 ? "lower" : "upper") << " side) together with the active set";
      out.diagnostic = os.str();
      out.x = x0 + Z * z;
      return out;
    }
    for (std::size_t k = 0; k < dr.active.size(); ++k) {
      const auto [row, scale] = origin[dr.active[k]];
      mu_full[row] += dr.multipliers[static_cast<Eigen::Index>(k)] * scale;
    }
  } else {
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      if (b[k] < -tol) {
        out.status = QpStatus::kInfeasible;
        out.diagnostic = "equalities fix every variable and violate an inequality";
        out.x = x0;
        return out;
      }
    }
  }

  const VectorXd x = x0 + Z * z;
  out.x = x;
  out.objective = 0.5 * x.dot(p.H * x) + p.f.dot(x);

  double primal = 0.0;
  if (meq > 0) primal = (p.A_eq * x - p.b_eq).cwiseAbs().maxCoeff();
  if (mi > 0) {
    const VectorXd cx = p.C * x;
    for (Eigen::Index i = 0; i < mi; ++i) {
      primal = std::max(primal, p.lower[i] - cx[i]);
      primal = std::max(primal, cx[i] - p.upper[i]);
    }
  }
  out.primal_residual = primal;

  const VectorXd grad = p.H * x + p.f;
  VectorXd res = grad;
  if (mi > 0) res -= p.C.transpose() * mu_full;
  if (meq > 0) {
    const VectorXd lambda = p.A_eq.transpose().colPivHouseholderQr().solve(res);
    res -= p.A_eq.transpose() * lambda;
  }
  // Relative to the magnitude of the terms summed into the gradient.
  VectorXd mag = (p.H.cwiseAbs() * x.cwiseAbs()) + p.f.cwiseAbs();
  if (mi > 0) mag += p.C.cwiseAbs().transpose() * mu_full.cwiseAbs();
  const double scale = std::max(1.0, mag.maxCoeff());
  out.stationarity_residual = res.cwiseAbs().maxCoeff() / scale;

  if (out.primal_residual > tol || out.stationarity_residual > tol) {
    out.status = QpStatus::kNumericalFailure;
    std::ostringstream os;
    os << "residuals above tolerance (primal " << out.primal_residual << ", stationarity "
       << out.stationarity_residual << ")";
    out.diagnostic = os.str();
    return out;
  }
  out.status = QpStatus::kOptimal;
  return out;
}

}  // namespace ssc
