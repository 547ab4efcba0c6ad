#include "ssc/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc {
namespace {

constexpr double kEps = 1e-9;
// Shortest duration left to a cube whose t face moves during relaxation (s).
constexpr double kMinRelaxedDuration = 0.3;

struct Step {
  double target;
  FaceStop reason;  // kOpen when the step is a plain grid step
};

double max_inflation(Axis a, const CorridorConfig& cfg) {
  switch (a) {
    case Axis::kS: return cfg.max_inflate_s;
    case Axis::kL: return cfg.max_inflate_l;
    case Axis::kT: return cfg.max_inflate_t;
  }
  return 0.0;
}

FaceStop boundary_stop(const SemanticBoundary& b) {
  return b.hard() ? FaceStop::kHardBoundary : FaceStop::kSoftBoundary;
}

// Clamps a step from `cur` toward `target` at the first boundary face it
// would cross.
Step clamp_to_faces(double cur, Step step, int sign, Axis axis,
                    std::span<const SemanticBoundary> boundaries, bool hard_only) {
  for (const auto& b : boundaries) {
    if (b.axis != axis || (hard_only && !b.hard())) continue;
    for (double f : {b.lower, b.upper}) {
      const bool crosses = sign > 0 ? (cur <= f + kEps && step.target > f + kEps)
                                    : (cur >= f - kEps && step.target < f - kEps);
      if (crosses && sign * (step.target - f) > 0.0) step = {f, boundary_stop(b)};
    }
  }
  return step;
}

Box3 slab(const Box3& box, Axis axis, double a, double b) {
  Box3 out = box;
  out[axis] = {std::min(a, b), std::max(a, b)};
  return out;
}

double& face_ref(Box3& box, Axis axis, int sign) {
  return sign > 0 ? box[axis].hi : box[axis].lo;
}

// Entry direction (+1 / -1) of the seed chain into a boundary region, or 0.
int entry_direction(const SemanticBoundary& b, std::span<const Seed> seeds) {
  const Interval region = b.range();
  for (std::size_t k = 0; k + 1 < seeds.size(); ++k) {
    const double x0 = seeds[k][b.axis];
    const double x1 = seeds[k + 1][b.axis];
    if (!region.contains(x0) && region.contains(x1)) return x1 > x0 ? 1 : -1;
    if (region.contains(x0)) {
      if (k == 0) return 0;  // chain starts inside: no entry face
    }
  }
  return 0;
}

// Sign of the seed-chain step that first leaves the boundary region; 0 if
// the chain never leaves it.
int exit_direction(const SemanticBoundary& b, std::span<const Seed> seeds) {
  const Interval region = b.range();
  for (std::size_t k = 0; k + 1 < seeds.size(); ++k) {
    const double x0 = seeds[k][b.axis];
    const double x1 = seeds[k + 1][b.axis];
    if (region.contains(x0) && !region.contains(x1)) return x1 > x0 ? 1 : -1;
  }
  return 0;
}

// Midpoint of the times in [a.t, min(t_cap, b.t)] at which the linear motion
// from a to b lies inside both boxes (s and l only). a is inside both.
double shared_time(const Seed& a, const Seed& b, const Box3& prev, const Box3& next, double t_cap) {
  double lo = a.t;
  double hi = std::min(t_cap, b.t);
  for (Axis ax : {Axis::kS, Axis::kL}) {
    const double x0 = a[ax];
    const double v = (b[ax] - a[ax]) / (b.t - a.t);
    if (v == 0.0) continue;
    for (const Box3* box : {&prev, &next}) {
      const Interval iv = (*box)[ax];
      double t_in = a.t + (iv.lo - x0) / v;
      double t_out = a.t + (iv.hi - x0) / v;
      if (t_in > t_out) std::swap(t_in, t_out);
      lo = std::max(lo, t_in);
      hi = std::min(hi, t_out);
    }
  }
  if (hi < lo) hi = lo;
  return 0.5 * (std::max(lo, a.t) + std::max(hi, a.t));
}

// First time after t_from at which the piecewise-linear seed motion leaves
// the s-l footprint of box.
double exit_time(std::span<const Seed> seeds, const Box3& box, double t_from) {
  for (std::size_t k = 1; k < seeds.size(); ++k) {
    const Seed& a = seeds[k - 1];
    const Seed& b = seeds[k];
    if (b.t <= t_from) continue;
    double hi = b.t;
    for (Axis ax : {Axis::kS, Axis::kL}) {
      const double v = (b[ax] - a[ax]) / (b.t - a.t);
      const Interval iv = box[ax];
      if (v > 0.0) hi = std::min(hi, a.t + (iv.hi - a[ax]) / v);
      if (v < 0.0) hi = std::min(hi, a.t + (iv.lo - a[ax]) / v);
      if (v == 0.0 && !iv.contains(a[ax])) hi = a.t;
    }
    if (hi < b.t) return std::max(hi, t_from);
  }
  return seeds.back().t;
}

}  // namespace

Axis axis_of(Direction d) {
  switch (d) {
    case Direction::kSPos:
    case Direction::kSNeg: return Axis::kS;
    case Direction::kLPos:
    case Direction::kLNeg: return Axis::kL;
    case Direction::kTPos: return Axis::kT;
  }
  return Axis::kT;
}

int sign_of(Direction d) {
  return (d == Direction::kSNeg || d == Direction::kLNeg) ? -1 : 1;
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::kSPos: return "s+";
    case Direction::kSNeg: return "s-";
    case Direction::kLPos: return "l+";
    case Direction::kLNeg: return "l-";
    case Direction::kTPos: return "t+";
  }
  return "?";
}

const char* to_string(FaceStop f) {
  switch (f) {
    case FaceStop::kOpen: return "open";
    case FaceStop::kObstacle: return "obstacle";
    case FaceStop::kHardBoundary: return "hard_boundary";
    case FaceStop::kSoftBoundary: return "soft_boundary";
    case FaceStop::kLimit: return "limit";
    case FaceStop::kDisabled: return "disabled";
  }
  return "?";
}

DirectionSet DirectionSet::all() {
  DirectionSet d;
  for (Direction x : kInflationOrder) d.add(x);
  return d;
}

int DirectionSet::size() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<Seed> generate_seeds(std::span<const FrenetState> simulated,
                                 const FrenetState& initial) {
  if (simulated.empty()) throw Error(ErrorCode::kEmptyInput, "no simulated states");
  if (!initial.valid()) throw Error(ErrorCode::kInvalidArgument, "initial state is not finite");
  if (initial.t > simulated.front().t) {
    throw Error(ErrorCode::kNonIncreasingTime, "initial state is later than the first simulated state");
  }
  std::vector<Seed> seeds;
  seeds.reserve(simulated.size() + 1);
  seeds.push_back({initial.s, initial.l, initial.t});
  for (const auto& st : simulated) {
    if (!st.valid()) throw Error(ErrorCode::kInvalidArgument, "simulated state is not finite");
    if (st.t < seeds.back().t) {
      throw Error(ErrorCode::kNonIncreasingTime, "simulated states are not sorted by t");
    }
    if (st.t == seeds.back().t) continue;
    seeds.push_back({st.s, st.l, st.t});
  }
  return seeds;
}

DrivingCube initial_cube(const Seed& prev, const Seed& next, const SltGrid& grid) {
  if (!(prev.t < next.t)) {
    std::ostringstream os;
    os << "seed times " << prev.t << " and " << next.t << " are not increasing";
    throw Error(ErrorCode::kNonIncreasingTime, os.str());
  }
  DrivingCube cube;
  for (Axis a : kAllAxes) {
    Interval iv{std::min(prev[a], next[a]), std::max(prev[a], next[a])};
    if (iv.lo == iv.hi) {
      const double half = 0.5 * grid.resolution(a);
      iv = {iv.lo - half, iv.hi + half};
    }
    cube.bounds[a] = iv;
  }
  return cube;
}

bool check_initial_cube_free(const DrivingCube& cube, const SltGrid& grid) {
  return !grid.box_occupied(cube.bounds);
}

DirectionSet inflation_directions(const DrivingCube& cube,
                                  std::span<const SemanticBoundary> boundaries,
                                  std::span<const Seed> seeds) {
  DirectionSet dirs = DirectionSet::all();
  for (const auto& b : boundaries) {
    if (!b.hard()) continue;
    const Interval along = cube.bounds[b.axis];
    const Interval region = b.range();
    if (!along.overlaps_open(region) || region.contains(along)) continue;
    const bool s_axis = b.axis == Axis::kS;
    const int entry = entry_direction(b, seeds);
    if (entry > 0) {
      dirs.remove(s_axis ? Direction::kSNeg : Direction::kLNeg);
    } else if (entry < 0) {
      dirs.remove(s_axis ? Direction::kSPos : Direction::kLPos);
    }
    // A cube holding the exit face keeps the region's bounds, so it must not
    // grow further out of the region.
    const int exit = exit_direction(b, seeds);
    if (exit > 0 && along.lo < region.hi && region.hi < along.hi) {
      dirs.remove(s_axis ? Direction::kSPos : Direction::kLPos);
    } else if (exit < 0 && along.lo < region.lo && region.lo < along.hi) {
      dirs.remove(s_axis ? Direction::kSNeg : Direction::kLNeg);
    }
  }
  return dirs;
}

DrivingCube inflate_cube(const DrivingCube& cube, DirectionSet dirs,
                         std::span<const SemanticBoundary> boundaries, const SltGrid& grid,
                         const CorridorConfig& cfg) {
  DrivingCube out = cube;
  const Box3 base = cube.bounds;
  std::array<bool, 5> closed{};
  for (Direction d : kInflationOrder) {
    const int fi = face_index(axis_of(d), sign_of(d));
    closed[static_cast<int>(d)] = !dirs.has(d);
    out.face_stop[fi] = dirs.has(d) ? FaceStop::kOpen : FaceStop::kDisabled;
  }
  out.face_stop[face_index(Axis::kT, -1)] = FaceStop::kDisabled;

  auto all_closed = [&] { return std::all_of(closed.begin(), closed.end(), [](bool c) { return c; }); };
  while (!all_closed()) {
    for (Direction d : kInflationOrder) {
      const int di = static_cast<int>(d);
      if (closed[di]) continue;
      const Axis axis = axis_of(d);
      const int sign = sign_of(d);
      const int fi = face_index(axis, sign);
      const double cur = face_ref(out.bounds, axis, sign);
      const double limit = (sign > 0 ? base[axis].hi : base[axis].lo) + sign * max_inflation(axis, cfg);

      Step step{cur + sign * grid.resolution(axis), FaceStop::kOpen};
      if (sign * (step.target - limit) >= -kEps) step = {limit, FaceStop::kLimit};
      step = clamp_to_faces(cur, step, sign, axis, boundaries, /*hard_only=*/false);
      // The grid edge acts as an obstacle face.
      const Interval span = grid.axis_span(axis);
      const double edge = sign > 0 ? span.hi : span.lo;
      if (sign * (step.target - edge) > kEps) step = {edge, FaceStop::kObstacle};

      if (sign * (step.target - cur) <= kEps) {
        // Already flush up to rounding: snap onto the face.
        if (std::abs(step.target - cur) <= kEps) face_ref(out.bounds, axis, sign) = step.target;
        closed[di] = true;
        out.face_stop[fi] = step.reason == FaceStop::kOpen ? FaceStop::kLimit : step.reason;
        continue;
      }
      if (grid.box_occupied(slab(out.bounds, axis, cur, step.target))) {
        closed[di] = true;
        out.face_stop[fi] = FaceStop::kObstacle;
        continue;
      }
      face_ref(out.bounds, axis, sign) = step.target;
      if (step.reason != FaceStop::kOpen) {
        closed[di] = true;
        out.face_stop[fi] = step.reason;
      }
    }
  }
  return out;
}

Corridor generate_corridor(std::span<const Seed> seeds,
                           std::span<const SemanticBoundary> boundaries, const SltGrid& grid,
                           const CorridorConfig& cfg) {
  if (seeds.size() < 2) throw Error(ErrorCode::kEmptyInput, "corridor generation needs >= 2 seeds");
  Corridor corridor;
  auto& cubes = corridor.cubes;
  for (std::size_t i = 1; i < seeds.size(); ++i) {
    const Seed& cur = seeds[i];
    if (!cubes.empty() && cubes.back().bounds.contains_point(cur.s, cur.l, cur.t)) {
      cubes.back().seeds.push_back(i);
      continue;
    }
    DrivingCube cube = initial_cube(seeds[i - 1], cur, grid);
    if (!check_initial_cube_free(cube, grid)) {
      std::ostringstream os;
      os << "initial cube of seeds " << i - 1 << " (s=" << seeds[i - 1].s << ", l=" << seeds[i - 1].l
         << ", t=" << seeds[i - 1].t << ") and " << i << " (s=" << cur.s << ", l=" << cur.l
         << ", t=" << cur.t << ") intersects an occupied cell";
      throw Error(ErrorCode::kSeedCubeCollision, os.str());
    }
    const DirectionSet dirs = inflation_directions(cube, boundaries, seeds);
    cube = inflate_cube(cube, dirs, boundaries, grid, cfg);
    cube.seeds = {i - 1, i};

    if (!cubes.empty()) {
      // Split the t-overlap inside the window where the straight seed motion
      // lies in both cubes; capped so the new seed stays in the new cube.
      Interval& prev_t = cubes.back().bounds[Axis::kT];
      const double shared = shared_time(seeds[i - 1], cur, cubes.back().bounds, cube.bounds, prev_t.hi);
      prev_t.hi = shared;
      cube.bounds[Axis::kT].lo = shared;
    }
    cubes.push_back(std::move(cube));
  }
  cubes.back().bounds[Axis::kT].hi = seeds.back().t;
  cubes.back().face_stop[face_index(Axis::kT, 1)] = FaceStop::kLimit;
  return corridor;
}

Corridor associate_constraints(Corridor corridor, std::span<const SemanticBoundary> boundaries,
                               const CorridorConfig& cfg) {
  for (std::size_t j = 0; j < corridor.cubes.size(); ++j) {
    auto& cube = corridor.cubes[j];
    cube.vel_bounds = cfg.limits.vel;
    cube.acc_bounds = cfg.limits.acc;
    cube.soft_margins = {0.0, 0.0, 0.0};
    for (const auto& b : boundaries) {
      if (!b.hard() || !b.bound) continue;
      if (!cube.bounds[b.axis].overlaps_open(b.range())) continue;
      const int dim = index(b.bound->dim);
      Interval& target = b.bound->order == 1 ? cube.vel_bounds[dim] : cube.acc_bounds[dim];
      target = target.intersect({b.bound->lower, b.bound->upper});
      if (target.lo > target.hi) {
        std::ostringstream os;
        os << "cube " << j << ": derivative order " << b.bound->order << " bounds on "
           << to_string(b.bound->dim) << " become [" << target.lo << ", " << target.hi << "]";
        throw Error(ErrorCode::kEmptyFeasibleInterval, os.str());
      }
    }
    for (const auto& b : boundaries) {
      if (b.hard() || !cube.bounds[b.axis].overlaps_closed(b.range())) continue;
      auto& m = cube.soft_margins;
      if (b.time_budget) {
        const double budget = *b.time_budget;
        const double fluct = cfg.lane_change_fluctuation;
        // Lateral distance covered at the nominal lane-change rate during the
        // allowed fluctuation.
        m[index(Axis::kL)] = std::max(m[index(Axis::kL)], (b.upper - b.lower) * fluct / budget);
        const double spare = std::max(0.0, budget - cube.bounds[Axis::kT].length());
        m[index(Axis::kT)] = std::max(m[index(Axis::kT)], std::min(spare, fluct));
      }
      if (b.bound && b.bound->order == 1) {
        // Velocity-matching distance: dv * (dv / a).
        const int dim = index(b.bound->dim);
        const double va = cube.vel_bounds[dim].hi;
        const double vb = b.bound->upper;
        const double dv = std::abs(va - vb);
        const double a = vb < va ? -cfg.limits.acc[dim].lo : cfg.limits.acc[dim].hi;
        if (a > 0.0) m[index(b.axis)] = std::max(m[index(b.axis)], dv * (dv / a));
      }
    }
  }
  return corridor;
}

Corridor relax_cubes(Corridor corridor, std::span<const SemanticBoundary> boundaries,
                     std::span<const Seed> seeds, const SltGrid& grid,
                     const CorridorConfig& cfg) {
  (void)cfg;
  auto& cubes = corridor.cubes;
  for (std::size_t j = 0; j < cubes.size(); ++j) {
    DrivingCube& cube = cubes[j];
    for (Axis axis : {Axis::kS, Axis::kL}) {
      for (int sign : {1, -1}) {
        const int fi = face_index(axis, sign);
        const double margin = cube.soft_margins[index(axis)];
        if (cube.face_stop[fi] != FaceStop::kSoftBoundary || margin <= 0.0) continue;
        const double start = face_ref(cube.bounds, axis, sign);
        const double limit = start + sign * margin;
        for (;;) {
          const double cur = face_ref(cube.bounds, axis, sign);
          Step step{cur + sign * grid.resolution(axis), FaceStop::kOpen};
          if (sign * (step.target - limit) >= -kEps) step = {limit, FaceStop::kLimit};
          step = clamp_to_faces(cur, step, sign, axis, boundaries, /*hard_only=*/true);
          if (sign * (step.target - cur) <= kEps) break;
          if (grid.box_occupied(slab(cube.bounds, axis, cur, step.target))) break;
          face_ref(cube.bounds, axis, sign) = step.target;
          if (step.reason != FaceStop::kOpen) break;
        }
      }
    }

    // A cube straddling a soft lateral region is a lane-change cube; its
    // shared t face may move forward to leave time for the maneuver.
    const double t_margin = cube.soft_margins[index(Axis::kT)];
    if (j + 1 >= cubes.size() || t_margin <= 0.0) continue;
    bool lane_change_cube = false;
    for (const auto& b : boundaries) {
      if (b.hard() || !b.time_budget) continue;
      const Interval along = cube.bounds[b.axis];
      if (along.overlaps_open(b.range()) && !b.range().contains(along)) lane_change_cube = true;
    }
    if (!lane_change_cube) continue;

    DrivingCube& next = cubes[j + 1];
    const double shared = cube.bounds[Axis::kT].hi;
    // The seed motion must stay inside the cube while the face moves.
    const double cap = std::min(shared + t_margin, exit_time(seeds, cube.bounds, shared));
    const Interval next_t = next.bounds[Axis::kT];
    const double limit = std::min(cap, next_t.hi - std::max(0.5 * next_t.length(), kMinRelaxedDuration));
    double t_hi = shared;
    const double dt = grid.resolution(Axis::kT);
    while (t_hi < limit - kEps) {
      const double target = std::min(t_hi + dt, limit);
      if (grid.box_occupied(slab(cube.bounds, Axis::kT, t_hi, target))) break;
      t_hi = target;
    }
    if (t_hi > shared) {
      cube.bounds[Axis::kT].hi = t_hi;
      next.bounds[Axis::kT].lo = t_hi;
    }
  }
  return corridor;
}

Corridor build_corridor(std::span<const Seed> seeds, std::span<const SemanticBoundary> boundaries,
                        const SltGrid& grid, const CorridorConfig& cfg) {
  Corridor c = generate_corridor(seeds, boundaries, grid, cfg);
  c = associate_constraints(std::move(c), boundaries, cfg);
  return relax_cubes(std::move(c), boundaries, seeds, grid, cfg);
}

Corridor split_first_cube(Corridor corridor, const FrenetState& start, std::span<const Seed> seeds,
                          double min_piece) {
  if (corridor.cubes.empty()) return corridor;
  const DrivingCube& first = corridor.cubes.front();
  const Interval span = first.bounds[Axis::kT];
  double reach = std::numeric_limits<double>::infinity();
  const double v[2] = {start.s_dot, start.l_dot};
  const double a[2] = {start.s_ddot, start.l_ddot};
  for (int d = 0; d < 2; ++d) {
    const Interval vb = first.vel_bounds[d];
    if (a[d] < 0.0 && v[d] > vb.lo) reach = std::min(reach, (v[d] - vb.lo) / -a[d]);
    if (a[d] > 0.0 && v[d] < vb.hi) reach = std::min(reach, (vb.hi - v[d]) / a[d]);
  }
  if (!std::isfinite(reach)) return corridor;
  // A bound reached past the cube still leaves a long pinned first segment.
  const double cut = span.lo + std::min(reach, 0.5 * span.length());
  if (!(cut > span.lo + min_piece && cut < span.hi - min_piece)) return corridor;

  DrivingCube head = first, tail = first;
  head.bounds[Axis::kT].hi = cut;
  tail.bounds[Axis::kT].lo = cut;
  head.face_stop[face_index(Axis::kT, 1)] = FaceStop::kLimit;
  tail.face_stop[face_index(Axis::kT, -1)] = FaceStop::kDisabled;
  head.seeds.clear();
  tail.seeds.clear();
  for (std::size_t i : first.seeds) (seeds[i].t <= cut ? head : tail).seeds.push_back(i);
  corridor.cubes.front() = std::move(head);
  corridor.cubes.insert(corridor.cubes.begin() + 1, std::move(tail));
  return corridor;
}

std::vector<std::string> corridor_violations(const Corridor& corridor,
                                             std::span<const Seed> seeds, const SltGrid& grid) {
  std::vector<std::string> out;
  const auto& cubes = corridor.cubes;
  if (cubes.empty()) out.push_back("corridor is empty");
  for (std::size_t j = 0; j < cubes.size(); ++j) {
    const auto& c = cubes[j];
    for (Axis a : kAllAxes) {
      if (!(c.bounds[a].lo < c.bounds[a].hi)) {
        out.push_back("cube " + std::to_string(j) + " is degenerate on axis " + to_string(a));
      }
    }
    if (grid.box_occupied(c.bounds)) out.push_back("cube " + std::to_string(j) + " intersects an occupied cell");
    for (int d = 0; d < 2; ++d) {
      if (!c.vel_bounds[d].valid() || !c.acc_bounds[d].valid()) {
        out.push_back("cube " + std::to_string(j) + " has invalid derivative bounds");
      }
    }
    if (j + 1 < cubes.size()) {
      const auto& n = cubes[j + 1];
      if (c.bounds[Axis::kT].hi != n.bounds[Axis::kT].lo) {
        out.push_back("cubes " + std::to_string(j) + " and " + std::to_string(j + 1) + " are not t-chained");
      }
      if (!c.bounds[Axis::kS].overlaps_closed(n.bounds[Axis::kS]) ||
          !c.bounds[Axis::kL].overlaps_closed(n.bounds[Axis::kL])) {
        out.push_back("cubes " + std::to_string(j) + " and " + std::to_string(j + 1) + " do not overlap in s-l");
      }
    }
  }
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const auto& sd = seeds[k];
    const bool covered = std::any_of(cubes.begin(), cubes.end(), [&](const DrivingCube& c) {
      return c.bounds.contains_point(sd.s, sd.l, sd.t, 1e-9);
    });
    if (!covered) out.push_back("seed " + std::to_string(k) + " is not covered");
  }
  return out;
}

}  // namespace ssc
