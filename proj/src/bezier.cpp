#include "ssc/bezier.hpp"

#include <cmath>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc::bezier {
namespace {

void require_degree(int degree) {
  if (degree < kMaxOrder) {
    std::ostringstream os;
    os << "degree " << degree << " < 3 has no jerk";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

// Bernstein sum by de Casteljau; stable for u in [0, 1].
double de_casteljau(std::span<const double> c, double u) {
  double buf[16];
  std::vector<double> heap;
  double* w = buf;
  if (c.size() > 16) {
    heap.assign(c.begin(), c.end());
    w = heap.data();
  } else {
    std::copy(c.begin(), c.end(), buf);
  }
  for (std::size_t r = 1; r < c.size(); ++r) {
    for (std::size_t i = 0; i + r < c.size(); ++i) {
      w[i] = (1.0 - u) * w[i] + u * w[i + 1];
    }
  }
  return w[0];
}

}  // namespace

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return std::round(r);
}

double bernstein(int degree, int i, double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    std::ostringstream os;
    os << "bernstein argument u = " << u << " outside [0, 1]";
    throw Error(ErrorCode::kDomainError, os.str());
  }
  if (degree < 0 || i < 0 || i > degree) {
    std::ostringstream os;
    os << "bernstein index " << i << " outside [0, " << degree << "]";
    throw Error(ErrorCode::kDomainError, os.str());
  }
  return binomial(degree, i) * std::pow(u, i) * std::pow(1.0 - u, degree - i);
}

HodographChain hodograph(std::span<const double> p, int degree) {
  require_degree(degree);
  if (static_cast<int>(p.size()) != degree + 1) {
    throw Error(ErrorCode::kDimensionMismatch, "hodograph needs degree + 1 control points");
  }
  HodographChain chain;
  chain.q[0].assign(p.begin(), p.end());
  for (int k = 1; k <= kMaxOrder; ++k) {
    const auto& prev = chain.q[k - 1];
    auto& cur = chain.q[k];
    // Each differentiation of a degree-n curve scales differences by n.
    const double factor = degree - k + 1;
    cur.resize(prev.size() - 1);
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) cur[i] = factor * (prev[i + 1] - prev[i]);
  }
  return chain;
}

double eval_normalized(std::span<const double> p, int degree, double alpha, double u, int order) {
  if (order < 0 || order > kMaxOrder) {
    throw Error(ErrorCode::kInvalidArgument, "derivative order must be in [0, 3]");
  }
  if (order == 0) return alpha * de_casteljau(p, u);
  const HodographChain chain = hodograph(p, degree);
  return std::pow(alpha, 1 - order) * de_casteljau(chain.q[order], u);
}

double eval(const BezierSegment& segment, double t, int order, Dim dim) {
  const double tol = 1e-12 * std::max(1.0, std::abs(segment.t_end()));
  if (!(t >= segment.t_start - tol && t <= segment.t_end() + tol)) {
    std::ostringstream os;
    os << "t = " << t << " outside segment [" << segment.t_start << ", " << segment.t_end() << "]";
    throw Error(ErrorCode::kDomainError, os.str());
  }
  const double u = std::clamp((t - segment.t_start) / segment.alpha, 0.0, 1.0);
  return eval_normalized(segment.points(dim), segment.degree, segment.alpha, u, order);
}

Eigen::MatrixXd derivative_operator(int degree, int order) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(degree + 1, degree + 1);
  for (int k = 1; k <= order; ++k) {
    const int n = degree - k + 1;  // degree of the curve being differentiated
    Eigen::MatrixXd step = Eigen::MatrixXd::Zero(n, n + 1);
    for (int i = 0; i < n; ++i) {
      step(i, i) = -n;
      step(i, i + 1) = n;
    }
    d = step * d;
  }
  return d;
}

Eigen::MatrixXd jerk_gram(int degree) {
  require_degree(degree);
  const int n = degree - 3;
  // int_0^1 b_n^i b_n^j du = C(n,i) C(n,j) / ((2n+1) C(2n, i+j))
  Eigen::MatrixXd g(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      g(i, j) = binomial(n, i) * binomial(n, j) / ((2.0 * n + 1.0) * binomial(2 * n, i + j));
    }
  }
  const Eigen::MatrixXd d3 = derivative_operator(degree, 3);
  Eigen::MatrixXd q = d3.transpose() * g * d3;
  return 0.5 * (q + q.transpose());
}

Eigen::MatrixXd jerk_hessian(int degree, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "segment scale alpha must be > 0");
  }
  return jerk_gram(degree) / (alpha * alpha * alpha);
}

}  // namespace ssc::bezier
