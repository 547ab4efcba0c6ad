#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "ssc/bezier.hpp"
#include "ssc/errors.hpp"
#include "ssc/frenet.hpp"
#include "ssc/pipeline.hpp"
#include "ssc/qp_solver.hpp"

namespace py = pybind11;
using namespace ssc;

namespace {

ReferenceLane make_lane(const std::vector<std::array<double, 2>>& pts) {
  std::vector<Vec2> v;
  v.reserve(pts.size());
  for (const auto& p : pts) v.push_back({p[0], p[1]});
  return ReferenceLane(std::move(v));
}

// Report, corridor and (when planned) trajectory as one JSON document.
std::string result_document(const PlanResult& r, const Scenario& sc) {
  nlohmann::json doc = {{"report", report_to_json(r, sc)}, {"corridor", to_json(r.corridor)}};
  if (r.trajectory) doc["trajectory"] = trajectory_to_json(*r.trajectory, sc.lane, sc.config.output_dt);
  return doc.dump();
}

std::string run_plan(const std::string& text, const std::optional<FrenetState>& start,
                     const std::string& out_dir, bool dump_corridor) {
  const Scenario sc = parse_scenario(text);
  PlanResult r;
  {
    py::gil_scoped_release release;
    r = start ? replan(sc, *start) : plan(sc);
  }
  if (!out_dir.empty()) write_outputs(r, sc, out_dir, dump_corridor);
  return result_document(r, sc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatio-temporal semantic corridor planner";
  py::register_exception<Error>(m, "SscError", PyExc_ValueError);

  m.def(
      "plan",
      [](const std::string& text, const std::string& out_dir, bool dump_corridor) {
        return run_plan(text, std::nullopt, out_dir, dump_corridor);
      },
      py::arg("scenario_json"), py::arg("out_dir") = "", py::arg("dump_corridor") = false,
      "Plans a scenario document; returns a JSON string with report, corridor and trajectory.");

  m.def(
      "replan",
      [](const std::string& text, double t, double s, double l, double s_dot, double l_dot, double s_ddot,
         double l_ddot) {
        FrenetState st{t, s, l, s_dot, l_dot, s_ddot, l_ddot};
        return run_plan(text, st, "", false);
      },
      py::arg("scenario_json"), py::arg("t"), py::arg("s"), py::arg("l"), py::arg("s_dot") = 0.0,
      py::arg("l_dot") = 0.0, py::arg("s_ddot") = 0.0, py::arg("l_ddot") = 0.0,
      "Plans the scenario from another initial Frenet state.");

  m.def(
      "exit_code", [](const std::string& status) {
        for (auto s : {PlanStatus::kOk, PlanStatus::kParseError, PlanStatus::kSeedCollision,
                       PlanStatus::kSeedCubeCollision, PlanStatus::kInfeasible, PlanStatus::kVerificationFailure,
                       PlanStatus::kSolverNumericalFailure, PlanStatus::kError}) {
          if (status == to_string(s)) return exit_code(s);
        }
        throw py::value_error("unknown status " + status);
      },
      py::arg("status"));

  m.def(
      "to_frenet",
      [](double x, double y, const std::vector<std::array<double, 2>>& lane, double capture_radius) {
        const FrenetPoint p = to_frenet({x, y}, make_lane(lane), capture_radius);
        return std::make_pair(p.s, p.l);
      },
      py::arg("x"), py::arg("y"), py::arg("lane"), py::arg("capture_radius") = kDefaultCaptureRadius);

  m.def(
      "to_cartesian",
      [](double s, double l, const std::vector<std::array<double, 2>>& lane) {
        const Vec2 p = to_cartesian(s, l, make_lane(lane));
        return std::make_pair(p.x, p.y);
      },
      py::arg("s"), py::arg("l"), py::arg("lane"));

  m.def("bernstein", &bezier::bernstein, py::arg("degree"), py::arg("i"), py::arg("u"));

  m.def(
      "hodograph",
      [](const std::vector<double>& p) {
        const auto chain = bezier::hodograph(p, static_cast<int>(p.size()) - 1);
        return std::vector<std::vector<double>>(chain.q.begin(), chain.q.end());
      },
      py::arg("control_points"), "Control points of the curve and its first three derivative curves.");

  m.def(
      "eval_normalized",
      [](const std::vector<double>& p, double alpha, double u, int order) {
        return bezier::eval_normalized(p, static_cast<int>(p.size()) - 1, alpha, u, order);
      },
      py::arg("control_points"), py::arg("alpha"), py::arg("u"), py::arg("order") = 0);

  m.def("jerk_hessian", &bezier::jerk_hessian, py::arg("degree"), py::arg("alpha"));

  m.def(
      "solve_qp",
      [](Eigen::MatrixXd H, Eigen::VectorXd f, Eigen::MatrixXd A_eq, Eigen::VectorXd b_eq, Eigen::MatrixXd C,
         Eigen::VectorXd lower, Eigen::VectorXd upper) {
        QpProblem p{std::move(H), std::move(f), std::move(A_eq), std::move(b_eq),
                    std::move(C), std::move(lower), std::move(upper)};
        const QpResult r = solve_qp(p);
        py::dict out;
        out["status"] = to_string(r.status);
        out["x"] = r.x;
        out["objective"] = r.objective;
        out["primal_residual"] = r.primal_residual;
        out["iterations"] = r.iterations;
        out["diagnostic"] = r.diagnostic;
        return out;
      },
      py::arg("H"), py::arg("f"), py::arg("A_eq"), py::arg("b_eq"), py::arg("C"), py::arg("lower"),
      py::arg("upper"), "min 1/2 x'Hx + f'x  s.t.  A_eq x = b_eq,  lower <= C x <= upper.");

#ifdef VERSION_INFO
#define SSC_STR(x) #x
#define SSC_XSTR(x) SSC_STR(x)
  m.attr("__version__") = SSC_XSTR(VERSION_INFO);
#endif
}
