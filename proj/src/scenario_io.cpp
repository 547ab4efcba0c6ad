#include "ssc/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kParseError, path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string at_index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void allow_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  require_object(obj, path);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail(join(path, it.key()), "unknown field");
  }
}

const json& required(const json& obj, const char* key, const std::string& path) {
  require_object(obj, path);
  auto it = obj.find(key);
  if (it == obj.end()) fail(join(path, key), "missing required field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "must be finite");
  return x;
}

double req_number(const json& obj, const char* key, const std::string& path) {
  return number(required(obj, key, path), join(path, key));
}

double opt_number(const json& obj, const char* key, const std::string& path, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, join(path, key));
}

std::string req_string(const json& obj, const char* key, const std::string& path) {
  const json& v = required(obj, key, path);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

Interval interval(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [lower, upper]");
  Interval iv{number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  if (!(iv.lo <= iv.hi)) fail(path, "lower must not exceed upper");
  return iv;
}

Vec2 vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) fail(path, "expected [x, y]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

// ---- reference lane ----------------------------------------------------

std::vector<Vec2> lane_points(const json& j, const std::string& path) {
  require_object(j, path);
  if (j.contains("points")) {
    allow_keys(j, {"points"}, path);
    const json& pts = j["points"];
    if (!pts.is_array()) fail(join(path, "points"), "expected an array");
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(vec2(pts[i], at_index(join(path, "points"), i)));
    return out;
  }
  allow_keys(j, {"start", "heading_deg", "segments"}, path);
  Vec2 p = j.contains("start") ? vec2(j["start"], join(path, "start")) : Vec2{};
  double heading = opt_number(j, "heading_deg", path, 0.0) * std::numbers::pi / 180.0;
  const json& segs = required(j, "segments", path);
  if (!segs.is_array() || segs.empty()) fail(join(path, "segments"), "expected a non-empty array");
  std::vector<Vec2> out{p};
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string sp = at_index(join(path, "segments"), i);
    const json& seg = segs[i];
    require_object(seg, sp);
    if (seg.contains("straight")) {
      allow_keys(seg, {"straight"}, sp);
      const double len = number(seg["straight"], join(sp, "straight"));
      if (!(len > 0.0)) fail(join(sp, "straight"), "length must be > 0");
      p = {p.x + len * std::cos(heading), p.y + len * std::sin(heading)};
      out.push_back(p);
    } else if (seg.contains("arc")) {
      allow_keys(seg, {"arc"}, sp);
      const std::string ap = join(sp, "arc");
      const json& arc = seg["arc"];
      allow_keys(arc, {"radius", "sweep_deg", "step"}, ap);
      const double r = req_number(arc, "radius", ap);
      const double sweep = req_number(arc, "sweep_deg", ap) * std::numbers::pi / 180.0;
      const double step = opt_number(arc, "step", ap, 0.5);
      if (!(r > 0.0)) fail(join(ap, "radius"), "must be > 0");
      if (sweep == 0.0) fail(join(ap, "sweep_deg"), "must be non-zero");
      if (!(step > 0.0)) fail(join(ap, "step"), "must be > 0");
      // Positive sweep turns left.
      const double side = sweep > 0.0 ? 1.0 : -1.0;
      const Vec2 c{p.x - side * r * std::sin(heading), p.y + side * r * std::cos(heading)};
      const double a0 = std::atan2(p.y - c.y, p.x - c.x);
      const int n = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) * r / step)));
      for (int k = 1; k <= n; ++k) {
        const double a = a0 + sweep * k / n;
        out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
      }
      p = out.back();
      heading += sweep;
    } else {
      fail(sp, "expected a 'straight' or 'arc' segment");
    }
  }
  return out;
}

// ---- semantic elements -------------------------------------------------

SemanticElement parse_element(const json& j, const std::string& path) {
  const std::string type = req_string(j, "type", path);
  SemanticElement e;
  if (type == "static_obstacle") {
    allow_keys(j, {"type", "s", "l"}, path);
    e = StaticObstacle{interval(required(j, "s", path), join(path, "s")),
                       interval(required(j, "l", path), join(path, "l"))};
  } else if (type == "dynamic_obstacle") {
    allow_keys(j, {"type", "half_length", "half_width", "trajectory", "constant_velocity"}, path);
    DynamicObstacle d;
    d.half_length = req_number(j, "half_length", path);
    d.half_width = req_number(j, "half_width", path);
    if (j.contains("trajectory") == j.contains("constant_velocity")) {
      fail(path, "needs exactly one of 'trajectory' or 'constant_velocity'");
    }
    if (j.contains("trajectory")) {
      const std::string tp = join(path, "trajectory");
      const json& arr = j["trajectory"];
      if (!arr.is_array() || arr.empty()) fail(tp, "expected a non-empty array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string ip = at_index(tp, i);
        allow_keys(arr[i], {"t", "s", "l"}, ip);
        d.trajectory.push_back({req_number(arr[i], "t", ip), req_number(arr[i], "s", ip),
                                req_number(arr[i], "l", ip)});
      }
    } else {
      const std::string cp = join(path, "constant_velocity");
      const json& cv = j["constant_velocity"];
      allow_keys(cv, {"s", "l", "s_dot", "l_dot", "t_begin", "t_end"}, cp);
      const double s0 = req_number(cv, "s", cp);
      const double l0 = req_number(cv, "l", cp);
      const double vs = req_number(cv, "s_dot", cp);
      const double vl = opt_number(cv, "l_dot", cp, 0.0);
      const double t0 = opt_number(cv, "t_begin", cp, 0.0);
      const double t1 = req_number(cv, "t_end", cp);
      if (!(t1 > t0)) fail(join(cp, "t_end"), "must exceed t_begin");
      // Straight-line motion is exact under linear interpolation.
      d.trajectory.push_back({t0, s0, l0});
      d.trajectory.push_back({t1, s0 + vs * (t1 - t0), l0 + vl * (t1 - t0)});
    }
    e = d;
  } else if (type == "red_light") {
    allow_keys(j, {"type", "stop_s", "t_on", "t_off"}, path);
    e = RedLight{req_number(j, "stop_s", path), req_number(j, "t_on", path), req_number(j, "t_off", path)};
  } else if (type == "speed_limit") {
    allow_keys(j, {"type", "v_max", "s_begin", "s_end"}, path);
    e = SpeedLimit{req_number(j, "v_max", path), req_number(j, "s_begin", path), req_number(j, "s_end", path)};
  } else if (type == "stop_sign") {
    allow_keys(j, {"type", "stop_s"}, path);
    e = StopSign{req_number(j, "stop_s", path)};
  } else if (type == "lane_change_duration") {
    allow_keys(j, {"type", "max_duration", "d_begin", "d_end"}, path);
    e = LaneChangeDuration{req_number(j, "max_duration", path), req_number(j, "d_begin", path),
                           req_number(j, "d_end", path)};
  } else {
    fail(join(path, "type"), "unknown element type '" + type + "'");
  }
  try {
    validate_element(e);
  } catch (const Error& err) {
    fail(path, err.what());
  }
  return e;
}

FrenetState parse_state(const json& j, const std::string& path, const ReferenceLane& lane,
                        double capture_radius) {
  allow_keys(j, {"t", "s", "l", "x", "y", "s_dot", "l_dot", "s_ddot", "l_ddot"}, path);
  FrenetState st;
  st.t = opt_number(j, "t", path, 0.0);
  if (st.t < 0.0) fail(join(path, "t"), "must be >= 0");
  const bool frenet = j.contains("s") || j.contains("l");
  const bool cartesian = j.contains("x") || j.contains("y");
  if (frenet == cartesian) fail(path, "needs either s/l or x/y");
  if (frenet) {
    st.s = req_number(j, "s", path);
    st.l = opt_number(j, "l", path, 0.0);
  } else {
    const Vec2 p{req_number(j, "x", path), req_number(j, "y", path)};
    try {
      const FrenetPoint fp = to_frenet(p, lane, capture_radius);
      st.s = fp.s;
      st.l = fp.l;
    } catch (const Error& err) {
      fail(path, err.what());
    }
  }
  st.s_dot = opt_number(j, "s_dot", path, 0.0);
  st.l_dot = opt_number(j, "l_dot", path, 0.0);
  st.s_ddot = opt_number(j, "s_ddot", path, 0.0);
  st.l_ddot = opt_number(j, "l_ddot", path, 0.0);
  return st;
}

Behavior parse_behavior(const json& j, const std::string& path, const FrenetState& ego) {
  const std::string type = req_string(j, "type", path);
  Behavior b;
  if (type == "lane_keep") {
    allow_keys(j, {"type", "target_speed", "lateral_offset"}, path);
    b.kind = BehaviorKind::kLaneKeep;
    b.target_speed = req_number(j, "target_speed", path);
    b.lateral_offset = opt_number(j, "lateral_offset", path, 0.0);
  } else if (type == "lane_change") {
    allow_keys(j, {"type", "target_speed", "target_offset", "duration", "start_time"}, path);
    b.kind = BehaviorKind::kLaneChange;
    b.target_speed = opt_number(j, "target_speed", path, ego.s_dot);
    b.target_offset = req_number(j, "target_offset", path);
    b.duration = req_number(j, "duration", path);
    b.start_time = opt_number(j, "start_time", path, ego.t);
    if (!(b.duration > 0.0)) fail(join(path, "duration"), "must be > 0");
  } else {
    fail(join(path, "type"), "unknown behavior '" + type + "'");
  }
  if (b.target_speed < 0.0) fail(join(path, "target_speed"), "must be >= 0");
  return b;
}

// ---- config overrides --------------------------------------------------

void set_num(const json& obj, const char* key, const std::string& path, double& dst, bool positive) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const double v = number(*it, join(path, key));
  if (positive && !(v > 0.0)) fail(join(path, key), "must be > 0");
  dst = v;
}

void set_int(const json& obj, const char* key, const std::string& path, int& dst) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer()) fail(join(path, key), "expected an integer");
  dst = it->get<int>();
}

void set_interval(const json& obj, const char* key, const std::string& path, Interval& dst) {
  auto it = obj.find(key);
  if (it != obj.end()) dst = interval(*it, join(path, key));
}

// ---- seed simulation ---------------------------------------------------

struct StopTarget {
  double s;
  bool committed = false;
  double decel = 0.0;
};

double snap_time(double t) { return std::round(t * 1e9) / 1e9; }

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, path + ": cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void apply_config_overrides(PlannerConfig& cfg, const json& o, const std::string& where) {
  allow_keys(o, {"grid", "boundary", "corridor", "limits", "optimizer", "verification", "seeds",
                 "output_dt", "capture_radius"},
             where);
  if (o.contains("grid")) {
    const std::string p = join(where, "grid");
    const json& g = o["grid"];
    allow_keys(g, {"ds", "dl", "dt", "s_min", "s_max", "l_min", "l_max", "red_light_depth"}, p);
    set_num(g, "ds", p, cfg.grid.ds, true);
    set_num(g, "dl", p, cfg.grid.dl, true);
    set_num(g, "dt", p, cfg.grid.dt, true);
    set_num(g, "s_min", p, cfg.grid.s_min, false);
    set_num(g, "s_max", p, cfg.grid.s_max, false);
    set_num(g, "l_min", p, cfg.grid.l_min, false);
    set_num(g, "l_max", p, cfg.grid.l_max, false);
    set_num(g, "red_light_depth", p, cfg.grid.red_light_depth, true);
  }
  if (o.contains("boundary")) {
    const std::string p = join(where, "boundary");
    allow_keys(o["boundary"], {"stop_zone_depth"}, p);
    set_num(o["boundary"], "stop_zone_depth", p, cfg.boundary.stop_zone_depth, true);
  }
  if (o.contains("corridor")) {
    const std::string p = join(where, "corridor");
    const json& c = o["corridor"];
    allow_keys(c, {"max_inflate_s", "max_inflate_l", "max_inflate_t", "lane_change_fluctuation"}, p);
    set_num(c, "max_inflate_s", p, cfg.corridor.max_inflate_s, false);
    set_num(c, "max_inflate_l", p, cfg.corridor.max_inflate_l, false);
    set_num(c, "max_inflate_t", p, cfg.corridor.max_inflate_t, false);
    set_num(c, "lane_change_fluctuation", p, cfg.corridor.lane_change_fluctuation, false);
  }
  if (o.contains("limits")) {
    const std::string p = join(where, "limits");
    const json& l = o["limits"];
    allow_keys(l, {"vel_s", "vel_l", "acc_s", "acc_l"}, p);
    auto& lim = cfg.corridor.limits;
    set_interval(l, "vel_s", p, lim.vel[0]);
    set_interval(l, "vel_l", p, lim.vel[1]);
    set_interval(l, "acc_s", p, lim.acc[0]);
    set_interval(l, "acc_l", p, lim.acc[1]);
  }
  if (o.contains("optimizer")) {
    const std::string p = join(where, "optimizer");
    const json& c = o["optimizer"];
    allow_keys(c, {"w_s", "w_l", "tolerance", "max_iterations", "continuity_order"}, p);
    set_num(c, "w_s", p, cfg.optimizer.w_s, true);
    set_num(c, "w_l", p, cfg.optimizer.w_l, true);
    set_num(c, "tolerance", p, cfg.optimizer.tolerance, true);
    set_int(c, "max_iterations", p, cfg.optimizer.max_iterations);
    set_int(c, "continuity_order", p, cfg.optimizer.continuity_order);
    if (cfg.optimizer.continuity_order < 2 || cfg.optimizer.continuity_order > 3) {
      fail(join(p, "continuity_order"), "must be 2 or 3");
    }
  }
  if (o.contains("verification")) {
    const std::string p = join(where, "verification");
    const json& c = o["verification"];
    allow_keys(c, {"sample_dt", "position_tolerance", "derivative_tolerance", "continuity_tolerance",
                   "boundary_tolerance"},
               p);
    set_num(c, "sample_dt", p, cfg.verification.sample_dt, true);
    set_num(c, "position_tolerance", p, cfg.verification.position_tolerance, true);
    set_num(c, "derivative_tolerance", p, cfg.verification.derivative_tolerance, true);
    set_num(c, "continuity_tolerance", p, cfg.verification.continuity_tolerance, true);
    set_num(c, "boundary_tolerance", p, cfg.verification.boundary_tolerance, true);
  }
  if (o.contains("seeds")) {
    const std::string p = join(where, "seeds");
    const json& c = o["seeds"];
    allow_keys(c, {"dt", "accel_max", "decel_max", "commit_decel", "plan_decel", "stop_buffer",
                   "lateral_rate", "speed_margin"},
               p);
    set_num(c, "dt", p, cfg.seeds.dt, true);
    set_num(c, "accel_max", p, cfg.seeds.accel_max, true);
    set_num(c, "decel_max", p, cfg.seeds.decel_max, true);
    set_num(c, "commit_decel", p, cfg.seeds.commit_decel, true);
    set_num(c, "plan_decel", p, cfg.seeds.plan_decel, true);
    set_num(c, "stop_buffer", p, cfg.seeds.stop_buffer, false);
    set_num(c, "lateral_rate", p, cfg.seeds.lateral_rate, true);
    set_num(c, "speed_margin", p, cfg.seeds.speed_margin, false);
  }
  set_num(o, "output_dt", where, cfg.output_dt, true);
  set_num(o, "capture_radius", where, cfg.capture_radius, true);
  cfg.optimizer.limits = cfg.corridor.limits;
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    const auto nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const std::size_t col = nl == std::string::npos ? upto + 1 : upto - nl;
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": malformed document";
    throw Error(ErrorCode::kParseError, os.str());
  }
  allow_keys(doc, {"schema_version", "name", "reference_lane", "ego", "elements", "behavior", "horizon",
                   "config"},
             "");
  const json& ver = required(doc, "schema_version", "");
  if (!ver.is_number_integer()) fail("schema_version", "expected an integer");
  if (ver.get<int>() != kSchemaVersion) {
    throw Error(ErrorCode::kSchemaVersionMismatch,
                "schema_version " + std::to_string(ver.get<int>()) + " is not supported (expected " +
                    std::to_string(kSchemaVersion) + ")");
  }

  Scenario sc;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("name", "expected a string");
    sc.name = doc["name"].get<std::string>();
  }
  try {
    sc.lane = ReferenceLane(lane_points(required(doc, "reference_lane", ""), "reference_lane"));
  } catch (const Error& err) {
    if (err.code() == ErrorCode::kParseError) throw;
    fail("reference_lane", err.what());
  }

  PlannerConfig cfg;
  // The capture radius may be overridden and is needed to project x/y states.
  json overrides = json::object();
  if (doc.contains("config")) {
    overrides = doc["config"];
    require_object(overrides, "config");
    if (overrides.contains("capture_radius")) {
      cfg.capture_radius = number(overrides["capture_radius"], "config.capture_radius");
    }
  }

  const json& ego = required(doc, "ego", "");
  allow_keys(ego, {"state", "half_length", "half_width"}, "ego");
  sc.ego.state = parse_state(required(ego, "state", "ego"), "ego.state", sc.lane, cfg.capture_radius);
  sc.ego.half_length = opt_number(ego, "half_length", "ego", 0.0);
  sc.ego.half_width = opt_number(ego, "half_width", "ego", 0.0);
  if (sc.ego.half_length < 0.0 || sc.ego.half_width < 0.0) fail("ego", "half dimensions must be >= 0");

  if (doc.contains("elements")) {
    const json& arr = doc["elements"];
    if (!arr.is_array()) fail("elements", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      sc.scene.elements.push_back(parse_element(arr[i], at_index("elements", i)));
    }
  }
  sc.behavior = parse_behavior(required(doc, "behavior", ""), "behavior", sc.ego.state);
  sc.horizon = req_number(doc, "horizon", "");
  if (!(sc.horizon > 0.0)) fail("horizon", "must be > 0");

  cfg.grid.s_min = 0.0;
  cfg.grid.s_max = sc.lane.length();
  cfg.grid.t_origin = sc.ego.state.t;
  cfg.grid.ego_half_length = sc.ego.half_length;
  cfg.grid.ego_half_width = sc.ego.half_width;
  apply_config_overrides(cfg, overrides, "config");
  sc.config = cfg;
  return sc;
}

Scenario load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_scenario(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::vector<FrenetState> simulate_seeds(const Scenario& sc, const SltGrid& grid) {
  const SeedConfig& sp = sc.config.seeds;
  const FrenetState& init = sc.ego.state;
  const Behavior& beh = sc.behavior;
  const double dt = sp.dt;
  const double t0 = init.t;
  const long steps = static_cast<long>(std::floor(sc.horizon / dt + 1e-9));

  // Lateral ramp: l(t) = l0 + rate * clamp(t - ramp_start, 0, ramp_len).
  double l0 = init.l;
  double rate = 0.0;
  double ramp_start = t0;
  double ramp_len = 0.0;
  const double target_l = beh.kind == BehaviorKind::kLaneChange ? beh.target_offset : beh.lateral_offset;
  if (std::abs(target_l - l0) > 1e-9) {
    if (beh.kind == BehaviorKind::kLaneChange && t0 < beh.start_time + beh.duration) {
      ramp_start = std::max(t0, beh.start_time);
      ramp_len = beh.start_time + beh.duration - ramp_start;
    } else {
      ramp_len = std::abs(target_l - l0) / sp.lateral_rate;
    }
    rate = (target_l - l0) / ramp_len;
  }
  auto lateral = [&](double t) { return l0 + rate * std::clamp(t - ramp_start, 0.0, ramp_len); };
  auto lateral_rate = [&](double t) {
    return (t >= ramp_start && t < ramp_start + ramp_len) ? rate : 0.0;
  };

  std::vector<const SpeedLimit*> limits;
  for (const auto& e : sc.scene.elements) {
    if (const auto* v = std::get_if<SpeedLimit>(&e)) limits.push_back(v);
  }
  auto allowed_speed = [&](double s) {
    double v = beh.target_speed;
    for (const SpeedLimit* lim : limits) {
      if (s >= lim->s_end) continue;
      // Reach the limit a little before the band so the cube that enters it
      // already holds the bound.
      const double entry = lim->s_begin - 2.0 * lim->v_max * dt - sc.config.grid.ds;
      const double d = entry - s;
      const double v_band = std::max(0.0, lim->v_max - sp.speed_margin);
      v = std::min(v, d <= 0.0 ? v_band : std::sqrt(v_band * v_band + 2.0 * sp.plan_decel * d));
    }
    return v;
  };
  auto stop_target = [&](double s, double t) -> std::optional<double> {
    std::optional<double> best;
    for (const auto& e : sc.scene.elements) {
      double target;
      if (const auto* st = std::get_if<StopSign>(&e)) {
        target = st->stop_s - 0.5 * sc.config.grid.ds;
      } else if (const auto* r = std::get_if<RedLight>(&e)) {
        if (!(t >= r->t_on && t < r->t_off)) continue;
        target = r->stop_s - sc.ego.half_length - sp.stop_buffer;
      } else {
        continue;
      }
      if (s > target + 1e-9) continue;
      if (!best || target < *best) best = target;
    }
    return best;
  };

  std::vector<FrenetState> states;
  states.reserve(steps + 1);
  double s = init.s;
  double v = std::max(0.0, init.s_dot);
  double a_prev = init.s_ddot;
  std::optional<StopTarget> commit;
  for (long k = 0; k <= steps; ++k) {
    const double t = k == 0 ? t0 : snap_time(t0 + static_cast<double>(k) * dt);
    FrenetState st;
    st.t = t;
    st.s = s;
    st.l = lateral(t);
    st.s_dot = v;
    st.l_dot = lateral_rate(t);
    st.s_ddot = a_prev;
    states.push_back(st);
    if (k == steps) break;

    const auto target = stop_target(s, t);
    if (commit && (!target || std::abs(*target - commit->s) > 1e-9)) commit.reset();
    double a = 0.0;
    if (target && !commit) {
      const double d = *target - s;
      if (d <= 1e-9) {
        commit = StopTarget{*target, true, 0.0};
      } else if (v * v / (2.0 * d) >= sp.commit_decel) {
        commit = StopTarget{*target, true, v * v / (2.0 * d)};
      }
    }
    if (commit) {
      // Constant deceleration that ends exactly at the target.
      const double decel = commit->decel;
      const double t_stop = decel > 0.0 ? v / decel : 0.0;
      if (t_stop <= dt) {
        s = decel > 0.0 ? commit->s : s;
        v = 0.0;
        a = 0.0;
      } else {
        s += v * dt - 0.5 * decel * dt * dt;
        v -= decel * dt;
        a = -decel;
      }
    } else {
      const double v_des = allowed_speed(s + v * dt);
      a = std::clamp((v_des - v) / dt, -sp.decel_max, sp.accel_max);
      double v_next = v + a * dt;
      double ds;
      if (v_next < 0.0) {
        ds = v * v / (2.0 * -a);
        v_next = 0.0;
      } else {
        ds = 0.5 * (v + v_next) * dt;
      }
      if (target) ds = std::min(ds, std::max(0.0, *target - s));
      s += ds;
      v = v_next;
    }
    a_prev = a;
  }

  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const Seed a{states[k].s, states[k].l, states[k].t};
    const Seed b{states[k + 1].s, states[k + 1].l, states[k + 1].t};
    if (!check_initial_cube_free(initial_cube(a, b, grid), grid)) {
      std::ostringstream os;
      os << "simulated motion from (t=" << a.t << ", s=" << a.s << ", l=" << a.l << ") to (t=" << b.t
         << ", s=" << b.s << ", l=" << b.l << ") hits an occupied cell";
      throw Error(ErrorCode::kSeedCollision, os.str());
    }
  }
  return states;
}

FrenetState goal_state(const std::vector<FrenetState>& simulated) {
  if (simulated.empty()) throw Error(ErrorCode::kEmptyInput, "no simulated states");
  return simulated.back();
}

// ---- serialization -----------------------------------------------------

json to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json j = {{"id", c.id},           {"passed", c.passed},   {"worst_violation", c.worst_violation},
              {"tolerance", c.tolerance}, {"t_worst", c.t_worst}, {"samples", c.samples}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(std::move(j));
  }
  return {{"pass", report.pass}, {"checks", std::move(checks)}};
}

json to_json(const Corridor& corridor) {
  auto iv = [](const Interval& i) { return json::array({i.lo, i.hi}); };
  json cubes = json::array();
  for (const auto& c : corridor.cubes) {
    json faces = json::object();
    for (Axis a : kAllAxes) {
      for (int sign : {1, -1}) {
        faces[std::string(to_string(a)) + (sign > 0 ? "+" : "-")] = to_string(c.face_stop[face_index(a, sign)]);
      }
    }
    cubes.push_back({{"s", iv(c.bounds[Axis::kS])},
                     {"l", iv(c.bounds[Axis::kL])},
                     {"t", iv(c.bounds[Axis::kT])},
                     {"vel_s", iv(c.vel_bounds[0])},
                     {"vel_l", iv(c.vel_bounds[1])},
                     {"acc_s", iv(c.acc_bounds[0])},
                     {"acc_l", iv(c.acc_bounds[1])},
                     {"soft_margins", c.soft_margins},
                     {"seeds", c.seeds},
                     {"faces", std::move(faces)}});
  }
  return {{"schema_version", kSchemaVersion}, {"cubes", std::move(cubes)}};
}

std::vector<Sample> sample_trajectory(const PiecewiseBezierTrajectory& traj, double dt) {
  std::vector<Sample> out;
  const double t0 = traj.t_begin();
  const double t1 = traj.t_end();
  const long n = static_cast<long>(std::floor((t1 - t0) / dt + 1e-9));
  auto push = [&](double t) {
    using bezier::Dim;
    out.push_back({t, traj.eval(t, 0, Dim::kS), traj.eval(t, 0, Dim::kL), traj.eval(t, 1, Dim::kS),
                   traj.eval(t, 1, Dim::kL), traj.eval(t, 2, Dim::kS), traj.eval(t, 2, Dim::kL)});
  };
  for (long k = 0; k <= n; ++k) push(std::min(t1, t0 + static_cast<double>(k) * dt));
  if (t0 + static_cast<double>(n) * dt < t1 - 1e-9) push(t1);
  return out;
}

json trajectory_to_json(const PiecewiseBezierTrajectory& traj, const ReferenceLane& lane,
                        double sample_dt) {
  json segs = json::array();
  for (const auto& seg : traj.segments()) {
    segs.push_back({{"t_start", seg.t_start},
                    {"alpha", seg.alpha},
                    {"degree", seg.degree},
                    {"s", seg.control_points[0]},
                    {"l", seg.control_points[1]}});
  }
  json cols = {{"t", json::array()},     {"s", json::array()},      {"l", json::array()},
               {"s_dot", json::array()}, {"l_dot", json::array()},  {"s_ddot", json::array()},
               {"l_ddot", json::array()}, {"x", json::array()},     {"y", json::array()}};
  for (const Sample& sm : sample_trajectory(traj, sample_dt)) {
    cols["t"].push_back(sm.t);
    cols["s"].push_back(sm.s);
    cols["l"].push_back(sm.l);
    cols["s_dot"].push_back(sm.s_dot);
    cols["l_dot"].push_back(sm.l_dot);
    cols["s_ddot"].push_back(sm.s_ddot);
    cols["l_ddot"].push_back(sm.l_ddot);
    if (sm.s >= 0.0 && sm.s <= lane.length()) {
      const Vec2 p = to_cartesian(sm.s, sm.l, lane);
      cols["x"].push_back(p.x);
      cols["y"].push_back(p.y);
    } else {
      cols["x"].push_back(nullptr);
      cols["y"].push_back(nullptr);
    }
  }
  return {{"schema_version", kSchemaVersion},
          {"segments", std::move(segs)},
          {"junction_times", traj.junction_times()},
          {"samples", std::move(cols)}};
}

PiecewiseBezierTrajectory trajectory_from_json(const json& doc) {
  const json& segs = required(doc, "segments", "");
  if (!segs.is_array() || segs.empty()) fail("segments", "expected a non-empty array");
  std::vector<bezier::BezierSegment> out;
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const std::string p = at_index("segments", j);
    const json& sj = segs[j];
    bezier::BezierSegment seg;
    seg.t_start = req_number(sj, "t_start", p);
    seg.alpha = req_number(sj, "alpha", p);
    const json& deg = required(sj, "degree", p);
    if (!deg.is_number_integer()) fail(join(p, "degree"), "expected an integer");
    seg.degree = deg.get<int>();
    for (int d = 0; d < 2; ++d) {
      const char* key = d == 0 ? "s" : "l";
      const json& arr = required(sj, key, p);
      if (!arr.is_array()) fail(join(p, key), "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        seg.control_points[d].push_back(number(arr[i], at_index(join(p, key), i)));
      }
    }
    out.push_back(std::move(seg));
  }
  try {
    return PiecewiseBezierTrajectory(std::move(out));
  } catch (const Error& e) {
    fail("segments", e.what());
  }
}

}  // namespace ssc
