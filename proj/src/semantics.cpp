#include "ssc/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc {

const char* to_string(Axis a) {
  switch (a) {
    case Axis::kS: return "s";
    case Axis::kL: return "l";
    case Axis::kT: return "t";
  }
  return "?";
}

namespace {

constexpr double kIndexEps = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

bool finite_range(double a, double b) { return std::isfinite(a) && std::isfinite(b) && a < b; }

}  // namespace

std::optional<TimedPoint> DynamicObstacle::at(double t) const {
  if (trajectory.empty() || t < trajectory.front().t || t > trajectory.back().t) {
    return std::nullopt;
  }
  auto it = std::lower_bound(trajectory.begin(), trajectory.end(), t,
                             [](const TimedPoint& p, double v) { return p.t < v; });
  if (it->t == t || it == trajectory.begin()) return *it;
  const TimedPoint& b = *it;
  const TimedPoint& a = *(it - 1);
  const double w = (t - a.t) / (b.t - a.t);
  return TimedPoint{t, a.s + w * (b.s - a.s), a.l + w * (b.l - a.l)};
}

bool is_obstacle_like(const SemanticElement& e) {
  return std::holds_alternative<StaticObstacle>(e) || std::holds_alternative<DynamicObstacle>(e) ||
         std::holds_alternative<RedLight>(e);
}

std::string element_name(const SemanticElement& e) {
  return std::visit(Overloaded{
                        [](const StaticObstacle&) { return std::string("static_obstacle"); },
                        [](const DynamicObstacle&) { return std::string("dynamic_obstacle"); },
                        [](const RedLight&) { return std::string("red_light"); },
                        [](const SpeedLimit&) { return std::string("speed_limit"); },
                        [](const StopSign&) { return std::string("stop_sign"); },
                        [](const LaneChangeDuration&) {
                          return std::string("lane_change_duration");
                        },
                    },
                    e);
}

void validate_element(const SemanticElement& e) {
  std::visit(
      Overloaded{
          [](const StaticObstacle& o) {
            if (!finite_range(o.s.lo, o.s.hi) || !finite_range(o.l.lo, o.l.hi)) {
              invalid("static_obstacle needs non-degenerate s and l ranges");
            }
          },
          [](const DynamicObstacle& o) {
            if (!(o.half_length >= 0.0) || !(o.half_width >= 0.0)) {
              invalid("dynamic_obstacle half dimensions must be >= 0");
            }
            if (o.trajectory.empty()) invalid("dynamic_obstacle needs a predicted trajectory");
            for (std::size_t i = 0; i < o.trajectory.size(); ++i) {
              const auto& p = o.trajectory[i];
              if (!std::isfinite(p.t) || !std::isfinite(p.s) || !std::isfinite(p.l)) {
                invalid("dynamic_obstacle trajectory sample is not finite");
              }
              if (i > 0 && !(p.t > o.trajectory[i - 1].t)) {
                invalid("dynamic_obstacle trajectory timestamps must be strictly increasing");
              }
            }
          },
          [](const RedLight& r) {
            if (!std::isfinite(r.stop_s) || !finite_range(r.t_on, r.t_off)) {
              invalid("red_light needs t_on < t_off");
            }
          },
          [](const SpeedLimit& v) {
            if (!(v.v_max > 0.0) || !std::isfinite(v.v_max)) invalid("speed_limit v_max must be > 0");
            if (!finite_range(v.s_begin, v.s_end)) invalid("speed_limit needs s_begin < s_end");
          },
          [](const StopSign& st) {
            if (!std::isfinite(st.stop_s)) invalid("stop_sign position is not finite");
          },
          [](const LaneChangeDuration& lc) {
            if (!(lc.max_duration > 0.0) || !std::isfinite(lc.max_duration)) {
              invalid("lane_change_duration max_duration must be > 0");
            }
            if (!finite_range(lc.d_begin, lc.d_end)) {
              invalid("lane_change_duration needs d_begin < d_end");
            }
          },
      },
      e);
}

std::vector<SemanticBoundary> extract_boundaries(const SemanticScene& scene,
                                                 const BoundaryConfig& cfg) {
  std::vector<SemanticBoundary> out;
  for (std::size_t i = 0; i < scene.elements.size(); ++i) {
    const auto& e = scene.elements[i];
    if (const auto* v = std::get_if<SpeedLimit>(&e)) {
      SemanticBoundary b;
      b.axis = Axis::kS;
      b.lower = v->s_begin;
      b.upper = v->s_end;
      b.bound = DerivativeBound{1, Axis::kS, 0.0, v->v_max};
      b.hardness = Hardness::kHard;
      b.source = i;
      out.push_back(b);
    } else if (const auto* st = std::get_if<StopSign>(&e)) {
      // The lower face is the position boundary; inside the zone the ego is
      // held at rest.
      SemanticBoundary b;
      b.axis = Axis::kS;
      b.lower = st->stop_s;
      b.upper = st->stop_s + cfg.stop_zone_depth;
      b.bound = DerivativeBound{1, Axis::kS, 0.0, 0.0};
      b.hardness = Hardness::kHard;
      b.source = i;
      out.push_back(b);
    } else if (const auto* lc = std::get_if<LaneChangeDuration>(&e)) {
      SemanticBoundary b;
      b.axis = Axis::kL;
      b.lower = lc->d_begin;
      b.upper = lc->d_end;
      b.time_budget = lc->max_duration;
      b.hardness = Hardness::kSoft;
      b.source = i;
      out.push_back(b);
    }
  }
  return out;
}

// ---- SltGrid -----------------------------------------------------------

SltGrid::SltGrid(std::array<double, 3> origin, std::array<double, 3> resolution,
                 std::array<long, 3> extent)
    : origin_(origin), resolution_(resolution), extent_(extent) {
  for (int a = 0; a < 3; ++a) {
    if (!(resolution_[a] > 0.0) || !std::isfinite(resolution_[a])) {
      invalid("grid resolutions must be > 0");
    }
    if (extent_[a] <= 0) invalid("grid extents must be positive");
  }
  cells_.assign(static_cast<std::size_t>(extent_[0]) * extent_[1] * extent_[2], 0);
}

Interval SltGrid::axis_span(Axis a) const {
  const int k = index(a);
  return {origin_[k], origin_[k] + extent_[k] * resolution_[k]};
}

bool SltGrid::in_extent(long is, long il, long it) const {
  return is >= 0 && il >= 0 && it >= 0 && is < extent_[0] && il < extent_[1] && it < extent_[2];
}

bool SltGrid::occupied(long is, long il, long it) const {
  if (!in_extent(is, il, it)) return true;
  return cells_[flat(is, il, it)] != 0;
}

void SltGrid::set_occupied(long is, long il, long it) {
  if (in_extent(is, il, it)) cells_[flat(is, il, it)] = 1;
}

long SltGrid::cell_of(Axis a, double x) const {
  const int k = index(a);
  return static_cast<long>(std::floor((x - origin_[k]) / resolution_[k] + kIndexEps));
}

CellRange SltGrid::cells_overlapping(Axis a, Interval iv) const {
  const int k = index(a);
  const double lo = (iv.lo - origin_[k]) / resolution_[k];
  const double hi = (iv.hi - origin_[k]) / resolution_[k];
  CellRange r;
  r.first = static_cast<long>(std::floor(lo + kIndexEps));
  r.last = static_cast<long>(std::ceil(hi - kIndexEps)) - 1;
  if (r.last < r.first) r.last = r.first;
  return r;
}

bool SltGrid::box_occupied(const Box3& box) const {
  const CellRange rs = cells_overlapping(Axis::kS, box[Axis::kS]);
  const CellRange rl = cells_overlapping(Axis::kL, box[Axis::kL]);
  const CellRange rt = cells_overlapping(Axis::kT, box[Axis::kT]);
  if (rs.first < 0 || rl.first < 0 || rt.first < 0 || rs.last >= extent_[0] ||
      rl.last >= extent_[1] || rt.last >= extent_[2]) {
    return true;
  }
  for (long it = rt.first; it <= rt.last; ++it) {
    for (long il = rl.first; il <= rl.last; ++il) {
      const std::size_t row = flat(0, il, it);
      for (long is = rs.first; is <= rs.last; ++is) {
        if (cells_[row + is]) return true;
      }
    }
  }
  return false;
}

void SltGrid::fill_box(const Box3& box) {
  CellRange r[3];
  for (Axis a : kAllAxes) {
    CellRange c = cells_overlapping(a, box[a]);
    c.first = std::max(c.first, 0L);
    c.last = std::min(c.last, extent_[index(a)] - 1);
    r[index(a)] = c;
  }
  if (r[0].empty() || r[1].empty() || r[2].empty()) return;
  for (long it = r[2].first; it <= r[2].last; ++it) {
    for (long il = r[1].first; il <= r[1].last; ++il) {
      const std::size_t row = flat(0, il, it);
      std::fill(cells_.begin() + static_cast<std::ptrdiff_t>(row + r[0].first),
                cells_.begin() + static_cast<std::ptrdiff_t>(row + r[0].last + 1), 1);
    }
  }
}

std::size_t SltGrid::occupied_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

// ---- rendering ---------------------------------------------------------

SltGrid render_occupancy(const SemanticScene& scene, double horizon, const GridConfig& cfg) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    std::ostringstream os;
    os << "horizon must be > 0, got " << horizon;
    throw Error(ErrorCode::kInvalidHorizon, os.str());
  }
  if (!(cfg.s_max > cfg.s_min) || !(cfg.l_max > cfg.l_min)) {
    invalid("grid extent must be non-empty");
  }
  const std::array<long, 3> extent = {
      static_cast<long>(std::ceil((cfg.s_max - cfg.s_min) / cfg.ds - kIndexEps)),
      static_cast<long>(std::ceil((cfg.l_max - cfg.l_min) / cfg.dl - kIndexEps)),
      static_cast<long>(std::ceil(horizon / cfg.dt - kIndexEps)),
  };
  SltGrid grid({cfg.s_min, cfg.l_min, cfg.t_origin}, {cfg.ds, cfg.dl, cfg.dt}, extent);
  const Interval full_t = grid.axis_span(Axis::kT);
  const Interval full_l = grid.axis_span(Axis::kL);

  for (const auto& e : scene.elements) {
    validate_element(e);
    if (const auto* o = std::get_if<StaticObstacle>(&e)) {
      Box3 box;
      box[Axis::kS] = {o->s.lo - cfg.ego_half_length, o->s.hi + cfg.ego_half_length};
      box[Axis::kL] = {o->l.lo - cfg.ego_half_width, o->l.hi + cfg.ego_half_width};
      box[Axis::kT] = full_t;
      grid.fill_box(box);
    } else if (const auto* d = std::get_if<DynamicObstacle>(&e)) {
      const double hs = d->half_length + cfg.ego_half_length;
      const double hl = d->half_width + cfg.ego_half_width;
      const double t_first = d->trajectory.front().t;
      const double t_last = d->trajectory.back().t;
      for (long k = 0; k < extent[2]; ++k) {
        const double t0 = std::max(grid.cell_lower(Axis::kT, k), t_first);
        const double t1 = std::min(grid.cell_lower(Axis::kT, k + 1), t_last);
        if (t0 > t1) continue;
        // Swept footprint over [t0, t1]: bounding box of interpolated end
        // positions and every sample in between.
        const TimedPoint a = *d->at(t0);
        const TimedPoint b = *d->at(t1);
        Interval s_rng{std::min(a.s, b.s), std::max(a.s, b.s)};
        Interval l_rng{std::min(a.l, b.l), std::max(a.l, b.l)};
        for (const auto& p : d->trajectory) {
          if (p.t > t0 && p.t < t1) {
            s_rng = {std::min(s_rng.lo, p.s), std::max(s_rng.hi, p.s)};
            l_rng = {std::min(l_rng.lo, p.l), std::max(l_rng.hi, p.l)};
          }
        }
        Box3 box;
        box[Axis::kS] = {s_rng.lo - hs, s_rng.hi + hs};
        box[Axis::kL] = {l_rng.lo - hl, l_rng.hi + hl};
        box[Axis::kT] = {grid.cell_lower(Axis::kT, k), grid.cell_lower(Axis::kT, k)};
        grid.fill_box(box);
      }
    } else if (const auto* r = std::get_if<RedLight>(&e)) {
      Box3 box;
      box[Axis::kS] = {r->stop_s - cfg.ego_half_length, r->stop_s + cfg.red_light_depth};
      box[Axis::kL] = full_l;
      box[Axis::kT] = {r->t_on, r->t_off};
      grid.fill_box(box);
    }
  }
  return grid;
}

}  // namespace ssc
