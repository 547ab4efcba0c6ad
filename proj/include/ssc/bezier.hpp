#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ssc::bezier {

inline constexpr int kDefaultDegree = 5;
inline constexpr int kMaxOrder = 3;

enum class Dim : int { kS = 0, kL = 1 };

double binomial(int n, int k);

// b_m^i(u) = C(m, i) u^i (1 - u)^(m - i). Throws Error(kDomainError) for u
// outside [0, 1] or i outside [0, m].
double bernstein(int degree, int i, double u);

// One piece of a scaled piecewise curve: f(t) = alpha * sum_i p_i b_m^i(u),
// u = (t - t_start) / alpha.
struct BezierSegment {
  int degree = kDefaultDegree;
  std::array<std::vector<double>, 2> control_points;  // indexed by Dim
  double alpha = 1.0;
  double t_start = 0.0;

  double t_end() const { return t_start + alpha; }
  const std::vector<double>& points(Dim d) const { return control_points[static_cast<int>(d)]; }
};

// Control points of the derivative curves of the non-scaled curve, q[k] for
// k = 0..3 (q[0] = p).
struct HodographChain {
  std::array<std::vector<double>, kMaxOrder + 1> q;
};

HodographChain hodograph(std::span<const double> p, int degree);

// k-th time derivative of the scaled segment at absolute time t:
// alpha^(1-k) * sum_i q^(k)_i b_{m-k}^i(u). Throws Error(kDomainError) if t
// is outside the segment.
double eval(const BezierSegment& segment, double t, int order, Dim dim);

// Same as eval but on normalized time u in [0, 1].
double eval_normalized(std::span<const double> p, int degree, double alpha, double u, int order);

// Linear map taking the m+1 control points to the m-k+1 hodograph points.
Eigen::MatrixXd derivative_operator(int degree, int order);

// Q with Q_ab = int_0^1 b'''_a(u) b'''_b(u) du, in closed form.
Eigen::MatrixXd jerk_gram(int degree);

// Q / alpha^3: the squared-jerk cost of a scaled segment is p^T (Q/alpha^3) p.
Eigen::MatrixXd jerk_hessian(int degree, double alpha);

}  // namespace ssc::bezier
