#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarm/world.hpp"

namespace swarm {

struct ClusterSpec {
  int count = 0;
  double pile_side = 0.0;  // 0 = tightest grid
};

struct DistributionSpec {
  enum class Kind { kUniform, kClustered, kLargeCluster };

  Kind kind = Kind::kUniform;
  int count = 128;                    // Uniform and LargeCluster
  std::vector<ClusterSpec> clusters;  // Clustered
  double exclusion_radius = 1.5;

  int total() const;

  static DistributionSpec uniform(int n) { return {Kind::kUniform, n, {}, 1.5}; }
  static DistributionSpec large_cluster(int n) { return {Kind::kLargeCluster, n, {}, 1.5}; }
  static DistributionSpec clustered(std::vector<ClusterSpec> piles) {
    return {Kind::kClustered, 0, std::move(piles), 1.5};
  }
};

std::string to_string(DistributionSpec::Kind k);

struct SetupOptions {
  bool competition_rules = false;  // enforce preset arena, 3-6 robots, 128-256 cubes
  double pile_spacing_factor = 2.2;  // grid pitch in cube radii
  double pile_jitter = 0.005;
  double spawn_clearance = 0.1;
};

/// Arena for a named preset ("15", "22") or a custom side length in meters.
Arena arena_preset(const std::string& name, double zone_side = 1.0);

/// Square pile: side = (k-1) * pitch + 2 * cube_radius for a k x k grid.
double pile_extent(int count, double pitch, double cube_radius);

struct PileFootprint {
  Vec2 center;
  double side = 0.0;
};

/// Builds a legal initial world. Deterministic in `seed`; throws SetupError when
/// the requested layout cannot be placed and ConfigError for rule violations.
WorldState generate_world(const Arena& arena, int robot_count, const DistributionSpec& dist, std::uint64_t seed,
                          const BodyParams& body = {}, const SetupOptions& options = {},
                          std::vector<PileFootprint>* piles = nullptr);

/// Checks the WorldState invariants (no overlap, walls, cube bookkeeping). Returns a description of
/// the first violation, or an empty string.
std::string validate_world(const WorldState& world);

}  // namespace swarm
