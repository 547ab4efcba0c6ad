#include "ssc/validation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ssc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// Power-basis coefficients in u of alpha * sum_i p_i b_i(u).
std::vector<double> monomial(const std::vector<double>& p, double alpha) {
  const int m = static_cast<int>(p.size()) - 1;
  std::vector<double> c(m + 1, 0.0);
  for (int k = 0; k <= m; ++k) {
    for (int i = 0; i <= k; ++i) {
      const double sgn = ((k - i) % 2 == 0) ? 1.0 : -1.0;
      c[k] += alpha * p[i] * choose(m, i) * choose(m - i, k - i) * sgn;
    }
  }
  return c;
}

// k-th derivative with respect to t of the polynomial in u = (t - t0) / alpha.
std::vector<double> differentiate(std::vector<double> c, int k, double alpha) {
  for (int r = 0; r < k; ++r) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = static_cast<double>(i) * c[i] / alpha;
    c = std::move(d);
  }
  return c;
}

double horner(const std::vector<double>& c, double u) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * u + *it;
  return v;
}

// Time-derivative control points: alpha^(1-k) * m!/(m-k)! * forward difference^k.
std::vector<double> scaled_differences(const std::vector<double>& p, int k, double alpha) {
  const int m = static_cast<int>(p.size()) - 1;
  double falling = 1.0;
  for (int r = 0; r < k; ++r) falling *= (m - r);
  const double scale = falling * std::pow(alpha, 1 - k);
  std::vector<double> out;
  for (int i = 0; i + k <= m; ++i) {
    double acc = 0.0;
    for (int r = 0; r <= k; ++r) {
      acc += (((k - r) % 2 == 0) ? 1.0 : -1.0) * choose(k, r) * p[i + r];
    }
    out.push_back(scale * acc);
  }
  return out;
}

struct Tracker {
  CheckRecord rec;
  Tracker(std::string id, double tol) {
    rec.id = std::move(id);
    rec.tolerance = tol;
    rec.worst_violation = kNegInf;
  }
  void observe(double excess, double t) {
    ++rec.samples;
    if (excess > rec.worst_violation) {
      rec.worst_violation = excess;
      rec.t_worst = t;
    }
  }
  void observe_interval(double v, const Interval& iv, double t) {
    observe(std::max(v - iv.hi, iv.lo - v), t);
  }
  CheckRecord finish() {
    if (rec.samples == 0) rec.worst_violation = 0.0;
    rec.passed = rec.worst_violation <= rec.tolerance;
    return rec;
  }
};

std::array<long, 2> candidate_cells(const SltGrid& grid, Axis a, double x) {
  const double o = grid.origin()[index(a)];
  const double h = grid.resolution(a);
  const double f = (x - o) / h;
  const double tol = 1e-9;
  const long c = static_cast<long>(std::floor(f));
  const double rem = f - static_cast<double>(c);
  if (rem < tol) return {c - 1, c};
  if (rem > 1.0 - tol) return {c, c + 1};
  return {c, c};
}

}  // namespace

bool point_in_collision(const SltGrid& grid, double s, double l, double t) {
  const auto cs = candidate_cells(grid, Axis::kS, s);
  const auto cl = candidate_cells(grid, Axis::kL, l);
  const auto ct = candidate_cells(grid, Axis::kT, t);
  for (long is : cs) {
    for (long il : cl) {
      for (long it : ct) {
        if (!grid.occupied(is, il, it)) return false;
      }
    }
  }
  return true;
}

const CheckRecord* VerificationReport::find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

VerificationReport verify(const PiecewiseBezierTrajectory& traj, const Corridor& corridor,
                          const SltGrid& grid, const VerificationConfig& cfg) {
  VerificationReport report;
  const auto& segs = traj.segments();
  const auto& cubes = corridor.cubes;

  Tracker structure("structure", 0.0);
  if (segs.size() != cubes.size() || segs.empty()) {
    structure.observe(1.0, 0.0);
    structure.rec.detail = "segment count " + std::to_string(segs.size()) + " != cube count " +
                           std::to_string(cubes.size());
    report.checks.push_back(structure.finish());
    report.pass = false;
    return report;
  }
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const Interval ct = cubes[j].bounds[Axis::kT];
    structure.observe(std::max(std::abs(segs[j].t_start - ct.lo), std::abs(segs[j].t_end() - ct.hi)),
                      segs[j].t_start);
  }
  structure.rec.tolerance = 1e-9;
  report.checks.push_back(structure.finish());

  Tracker cube_pos("containment_cube", cfg.position_tolerance);
  Tracker grid_free("containment_grid", 0.0);
  std::array<Tracker, 2> vel{Tracker("velocity_s", cfg.derivative_tolerance),
                             Tracker("velocity_l", cfg.derivative_tolerance)};
  std::array<Tracker, 2> acc{Tracker("acceleration_s", cfg.derivative_tolerance),
                             Tracker("acceleration_l", cfg.derivative_tolerance)};
  Tracker cp_pos("control_points_position", cfg.position_tolerance);
  Tracker cp_vel("control_points_velocity", cfg.derivative_tolerance);
  Tracker cp_acc("control_points_acceleration", cfg.derivative_tolerance);
  Tracker cont("continuity", cfg.continuity_tolerance);

  // poly[j][d][k]: k-th time derivative of dimension d on segment j.
  std::vector<std::array<std::array<std::vector<double>, 4>, 2>> poly(segs.size());
  for (std::size_t j = 0; j < segs.size(); ++j) {
    for (int d = 0; d < 2; ++d) {
      const auto base = monomial(segs[j].control_points[d], segs[j].alpha);
      for (int k = 0; k <= 3; ++k) poly[j][d][k] = differentiate(base, k, segs[j].alpha);
    }
  }

  for (std::size_t j = 0; j < segs.size(); ++j) {
    const auto& seg = segs[j];
    const DrivingCube& cube = cubes[j];
    const std::array<Interval, 2> pos{cube.bounds[Axis::kS], cube.bounds[Axis::kL]};

    for (int d = 0; d < 2; ++d) {
      const auto& p = seg.control_points[d];
      for (double v : p) cp_pos.observe_interval(seg.alpha * v, pos[d], seg.t_start);
      for (double v : scaled_differences(p, 1, seg.alpha)) cp_vel.observe_interval(v, cube.vel_bounds[d], seg.t_start);
      for (double v : scaled_differences(p, 2, seg.alpha)) cp_acc.observe_interval(v, cube.acc_bounds[d], seg.t_start);
    }

    const long n = std::max(1L, static_cast<long>(std::ceil(seg.alpha / cfg.sample_dt - 1e-9)));
    for (long k = 0; k <= n; ++k) {
      const double t = k == n ? seg.t_end() : seg.t_start + static_cast<double>(k) * cfg.sample_dt;
      const double u = (t - seg.t_start) / seg.alpha;
      const double s = horner(poly[j][0][0], u);
      const double l = horner(poly[j][1][0], u);
      cube_pos.observe(std::max({s - pos[0].hi, pos[0].lo - s, l - pos[1].hi, pos[1].lo - l,
                                 t - cube.bounds[Axis::kT].hi - 1e-9, cube.bounds[Axis::kT].lo - t - 1e-9}),
                       t);
      if (cfg.check_grid) grid_free.observe(point_in_collision(grid, s, l, t) ? 1.0 : -1.0, t);
      for (int d = 0; d < 2; ++d) {
        vel[d].observe_interval(horner(poly[j][d][1], u), cube.vel_bounds[d], t);
        acc[d].observe_interval(horner(poly[j][d][2], u), cube.acc_bounds[d], t);
      }
    }

    if (j + 1 < segs.size()) {
      const double tj = segs[j + 1].t_start;
      for (int d = 0; d < 2; ++d) {
        for (int k = 0; k <= 3; ++k) {
          const double a = horner(poly[j][d][k], 1.0);
          const double b = horner(poly[j + 1][d][k], 0.0);
          cont.observe(std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}), tj);
        }
      }
    }
  }

  report.checks.push_back(cube_pos.finish());
  if (cfg.check_grid) {
    auto rec = grid_free.finish();
    if (!rec.passed) {
      std::ostringstream os;
      os << "trajectory enters an occupied cell at t = " << rec.t_worst;
      rec.detail = os.str();
    }
    report.checks.push_back(rec);
  }
  for (auto& tr : vel) report.checks.push_back(tr.finish());
  for (auto& tr : acc) report.checks.push_back(tr.finish());
  report.checks.push_back(cp_pos.finish());
  report.checks.push_back(cp_vel.finish());
  report.checks.push_back(cp_acc.finish());
  report.checks.push_back(cont.finish());

  auto boundary = [&](const std::string& id, const FrenetState& st, std::size_t j, double u) {
    Tracker tr(id, cfg.boundary_tolerance);
    const std::array<std::array<double, 3>, 2> want{{{st.s, st.s_dot, st.s_ddot}, {st.l, st.l_dot, st.l_ddot}}};
    for (int d = 0; d < 2; ++d) {
      for (int k = 0; k <= 2; ++k) {
        const double v = horner(poly[j][d][k], u);
        tr.observe(std::abs(v - want[d][k]) / std::max(1.0, std::abs(want[d][k])), st.t);
      }
    }
    const double t_edge = u == 0.0 ? segs[j].t_start : segs[j].t_end();
    tr.observe(std::abs(t_edge - st.t), st.t);
    report.checks.push_back(tr.finish());
  };
  if (cfg.start) boundary("boundary_start", *cfg.start, 0, 0.0);
  if (cfg.goal) boundary("boundary_goal", *cfg.goal, segs.size() - 1, 1.0);

  for (const auto& c : report.checks) report.pass = report.pass && c.passed;
  return report;
}

}  // namespace ssc
