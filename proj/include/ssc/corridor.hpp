#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ssc/frenet.hpp"
#include "ssc/geometry.hpp"
#include "ssc/semantics.hpp"

namespace ssc {

struct Seed {
  double s = 0.0;
  double l = 0.0;
  double t = 0.0;

  double operator[](Axis a) const { return a == Axis::kS ? s : (a == Axis::kL ? l : t); }
};

// Inflation directions, in round-robin order. Time never inflates backward.
enum class Direction : int { kSPos = 0, kSNeg, kLPos, kLNeg, kTPos };
inline constexpr std::array<Direction, 5> kInflationOrder = {
    Direction::kSPos, Direction::kSNeg, Direction::kLPos, Direction::kLNeg, Direction::kTPos};

Axis axis_of(Direction d);
int sign_of(Direction d);
const char* to_string(Direction d);

class DirectionSet {
 public:
  static DirectionSet all();
  static DirectionSet none() { return {}; }

  bool has(Direction d) const { return bits_[static_cast<int>(d)]; }
  void add(Direction d) { bits_[static_cast<int>(d)] = true; }
  void remove(Direction d) { bits_[static_cast<int>(d)] = false; }
  int size() const;

  friend bool operator==(const DirectionSet&, const DirectionSet&) = default;

 private:
  std::array<bool, 5> bits_{};
};

// Why a cube face stopped moving.
enum class FaceStop { kOpen, kObstacle, kHardBoundary, kSoftBoundary, kLimit, kDisabled };
const char* to_string(FaceStop f);

// Faces indexed s+, s-, l+, l-, t+, t-.
inline constexpr int face_index(Axis a, int sign) { return 2 * index(a) + (sign > 0 ? 0 : 1); }

struct DrivingCube {
  Box3 bounds;
  std::array<Interval, 2> vel_bounds{};  // per planning dimension (s, l)
  std::array<Interval, 2> acc_bounds{};
  std::array<double, 3> soft_margins{};  // relaxation allowance per axis (m, m, s)
  std::vector<std::size_t> seeds;        // indices into the seed list
  std::array<FaceStop, 6> face_stop{FaceStop::kOpen, FaceStop::kOpen, FaceStop::kOpen,
                                    FaceStop::kOpen, FaceStop::kOpen, FaceStop::kDisabled};
};

struct Corridor {
  std::vector<DrivingCube> cubes;
};

struct DynamicLimits {
  std::array<Interval, 2> vel{Interval{0.0, 30.0}, Interval{-2.5, 2.5}};
  std::array<Interval, 2> acc{Interval{-3.0, 2.0}, Interval{-2.5, 2.5}};
};

struct CorridorConfig {
  // Maximum growth of each face away from the initial cube (m, m, s).
  double max_inflate_s = 50.0;
  double max_inflate_l = 3.5;
  double max_inflate_t = 3.0;
  DynamicLimits limits;
  // Allowed fluctuation of a lane-change duration (s).
  double lane_change_fluctuation = 1.0;
};

// Initial state followed by the simulated states; later duplicates in t are
// dropped. Throws kEmptyInput, kNonIncreasingTime.
std::vector<Seed> generate_seeds(std::span<const FrenetState> simulated,
                                 const FrenetState& initial);

// Bounding box of two seeds; degenerate s/l axes widened by one cell.
DrivingCube initial_cube(const Seed& prev, const Seed& next, const SltGrid& grid);

bool check_initial_cube_free(const DrivingCube& cube, const SltGrid& grid);

DirectionSet inflation_directions(const DrivingCube& cube,
                                  std::span<const SemanticBoundary> boundaries,
                                  std::span<const Seed> seeds);

DrivingCube inflate_cube(const DrivingCube& cube, DirectionSet dirs,
                         std::span<const SemanticBoundary> boundaries, const SltGrid& grid,
                         const CorridorConfig& cfg);

// Cube inflation over the whole seed chain with exact t-chaining. Throws
// Error(kSeedCubeCollision) naming the seed pair.
Corridor generate_corridor(std::span<const Seed> seeds,
                           std::span<const SemanticBoundary> boundaries, const SltGrid& grid,
                           const CorridorConfig& cfg);

// Throws Error(kEmptyFeasibleInterval) on contradictory bounds.
Corridor associate_constraints(Corridor corridor, std::span<const SemanticBoundary> boundaries,
                               const CorridorConfig& cfg);

Corridor relax_cubes(Corridor corridor, std::span<const SemanticBoundary> boundaries,
                     std::span<const Seed> seeds, const SltGrid& grid,
                     const CorridorConfig& cfg);

// generate -> associate -> relax.
Corridor build_corridor(std::span<const Seed> seeds, std::span<const SemanticBoundary> boundaries,
                        const SltGrid& grid, const CorridorConfig& cfg);

// Splits the first cube in time where the start velocity, held at the start
// acceleration, would reach the cube's velocity bound in some dimension.
// Returns the corridor unchanged when that happens within min_piece of
// either end of the cube.
Corridor split_first_cube(Corridor corridor, const FrenetState& start, std::span<const Seed> seeds,
                          double min_piece = 0.05);

// Human-readable invariant violations (empty when the corridor is valid).
std::vector<std::string> corridor_violations(const Corridor& corridor,
                                             std::span<const Seed> seeds, const SltGrid& grid);

}  // namespace ssc
