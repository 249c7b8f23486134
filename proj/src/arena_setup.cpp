#include "swarm/arena_setup.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "swarm/errors.hpp"
#include "swarm/random.hpp"

namespace swarm {

int DistributionSpec::total() const {
  if (kind != Kind::kClustered) return count;
  int n = 0;
  for (const auto& c : clusters) n += c.count;
  return n;
}

std::string to_string(DistributionSpec::Kind k) {
  switch (k) {
    case DistributionSpec::Kind::kUniform: return "uniform";
    case DistributionSpec::Kind::kClustered: return "clustered";
    case DistributionSpec::Kind::kLargeCluster: return "large_cluster";
  }
  return "?";
}

Arena arena_preset(const std::string& name, double zone_side) {
  double side = 0.0;
  const auto* end = name.data() + name.size();
  const auto res = std::from_chars(name.data(), end, side);
  if (res.ec != std::errc() || res.ptr != end || !(side > 0.0))
    throw ConfigError("arena preset must be a side length in meters, got '" + name + "'");
  if (!(zone_side > 0.0) || zone_side >= side) throw ConfigError("collection zone must lie strictly inside the arena");
  return {side, zone_side};
}

double pile_extent(int count, double pitch, double cube_radius) {
  const int k = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)) - 1e-9)));
  return (k - 1) * pitch + 2.0 * cube_radius;
}

namespace {

struct Placer {
  const Arena& arena;
  const BodyParams& body;
  const std::vector<RobotBody>& robots;
  double exclusion;
  std::vector<Vec2> cubes;

  bool inside_walls(Vec2 p) const {
    const double lim = arena.half() - body.cube_radius;
    return std::abs(p.x) <= lim && std::abs(p.y) <= lim;
  }

  bool clear(Vec2 p) const {
    if (!inside_walls(p) || p.norm() < exclusion) return false;
    const double min_gap = 2.0 * body.cube_radius;
    for (const auto& q : cubes)
      if ((p - q).norm() < min_gap) return false;
    for (const auto& r : robots)
      if ((p - r.pose.position()).norm() < r.radius + body.cube_radius) return false;
    return true;
  }
};

// Closest distance from the origin to an axis-aligned square.
double square_distance_to_origin(Vec2 c, double side) {
  const double h = 0.5 * side;
  const double dx = std::max(0.0, std::abs(c.x) - h);
  const double dy = std::max(0.0, std::abs(c.y) - h);
  return std::hypot(dx, dy);
}

void place_uniform(Placer& placer, int n, Rng& rng) {
  const double lim = placer.arena.half() - placer.body.cube_radius;
  const long max_attempts = 2000L * std::max(1, n) + 10000L;
  long attempts = 0;
  while (static_cast<int>(placer.cubes.size()) < n) {
    if (++attempts > max_attempts)
      throw SetupError(fmt::format(
          "infeasible packing: placed {} of {} cubes; each needs {:.3f} m spacing inside a {:.1f} m arena "
          "and {:.2f} m from the zone center",
          placer.cubes.size(), n, 2.0 * placer.body.cube_radius, placer.arena.side_length, placer.exclusion));
    const Vec2 p{uniform(rng, -lim, lim), uniform(rng, -lim, lim)};
    if (placer.clear(p)) placer.cubes.push_back(p);
  }
}

}  // namespace

WorldState generate_world(const Arena& arena, int robot_count, const DistributionSpec& dist, std::uint64_t seed,
                          const BodyParams& body, const SetupOptions& options, std::vector<PileFootprint>* piles) {
  if (robot_count < 1) throw ConfigError("robot_count must be at least 1");
  if (!(arena.zone_side > 0.0) || arena.zone_side >= arena.side_length)
    throw ConfigError("collection zone must lie strictly inside the arena");
  if (options.competition_rules) {
    if (robot_count < 3 || robot_count > 6) throw ConfigError("competition rounds use 3 to 6 robots");
    if (arena.side_length != 15.0 && arena.side_length != 22.0)
      throw ConfigError("competition arenas are the 15 m or 22 m presets");
    if (dist.total() < 128 || dist.total() > 256) throw ConfigError("competition rounds place 128 to 256 cubes");
  }
  if (dist.total() < 0) throw ConfigError("cube count must be non-negative");
  if (dist.exclusion_radius < 0.0) throw ConfigError("exclusion_radius must be non-negative");

  WorldState world;
  world.arena = arena;
  world.body = body;

  const double ring = arena.zone_half() + body.robot_radius + options.spawn_clearance;
  if (ring + body.robot_radius >= arena.half()) throw SetupError("spawn ring does not fit inside the arena");
  for (int i = 0; i < robot_count; ++i) {
    const double a = 2.0 * kPi * i / robot_count;
    RobotBody r;
    r.id = i;
    r.radius = body.robot_radius;
    r.max_range = body.max_range;
    r.pose = {ring * std::cos(a), ring * std::sin(a), wrap_angle(a)};
    world.robots.push_back(r);
  }
  for (std::size_t i = 0; i < world.robots.size(); ++i)
    for (std::size_t j = i + 1; j < world.robots.size(); ++j)
      if ((world.robots[i].pose.position() - world.robots[j].pose.position()).norm() < 2.0 * body.robot_radius)
        throw SetupError(fmt::format("spawn ring too small for {} robots", robot_count));

  Rng rng = make_stream(seed, StreamPurpose::kWorldSetup);
  Placer placer{arena, body, world.robots, dist.exclusion_radius, {}};

  std::vector<ClusterSpec> pile_specs;
  if (dist.kind == DistributionSpec::Kind::kLargeCluster) pile_specs.push_back({dist.count, 0.0});
  if (dist.kind == DistributionSpec::Kind::kClustered) pile_specs = dist.clusters;

  if (dist.kind == DistributionSpec::Kind::kUniform) {
    place_uniform(placer, dist.count, rng);
  } else {
    const double min_pitch = options.pile_spacing_factor * body.cube_radius;
    std::vector<PileFootprint> placed;
    for (const auto& spec : pile_specs) {
      if (spec.count < 1) throw ConfigError("cluster count must be positive");
      const int k = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.count)) - 1e-9)));
      double pitch = min_pitch;
      if (spec.pile_side > 0.0 && k > 1) {
        pitch = (spec.pile_side - 2.0 * body.cube_radius) / (k - 1);
        if (pitch < min_pitch)
          throw SetupError(fmt::format("infeasible packing: {} cubes need a pile side of at least {:.3f} m, got {:.3f} m",
                                       spec.count, pile_extent(spec.count, min_pitch, body.cube_radius), spec.pile_side));
      }
      const double side = pile_extent(spec.count, pitch, body.cube_radius);
      const double lim = arena.half() - 0.5 * side;
      if (lim <= 0.0) throw SetupError(fmt::format("infeasible packing: a {:.2f} m pile does not fit the arena", side));
      bool ok = false;
      Vec2 center;
      for (int attempt = 0; attempt < 20000 && !ok; ++attempt) {
        center = {uniform(rng, -lim, lim), uniform(rng, -lim, lim)};
        if (square_distance_to_origin(center, side) < dist.exclusion_radius) continue;
        ok = std::none_of(placed.begin(), placed.end(), [&](const PileFootprint& o) {
          const double gap = 0.5 * (o.side + side) + 2.0 * body.cube_radius;
          return std::abs(o.center.x - center.x) < gap && std::abs(o.center.y - center.y) < gap;
        });
      }
      if (!ok)
        throw SetupError(fmt::format(
            "infeasible packing: no room for a {:.2f} m pile outside the {:.2f} m exclusion radius and other piles",
            side, dist.exclusion_radius));
      placed.push_back({center, side});

      // Jitter is clamped so neighbours stay at least one cube diameter apart.
      const double jitter_cap = 0.45 * (pitch - 2.0 * body.cube_radius);
      const Vec2 origin = center - Vec2{0.5 * side - body.cube_radius, 0.5 * side - body.cube_radius};
      for (int idx = 0; idx < spec.count; ++idx) {
        const Vec2 grid = origin + Vec2{(idx % k) * pitch, (idx / k) * pitch};
        const double jx = std::clamp(gaussian(rng, options.pile_jitter), -jitter_cap, jitter_cap);
        const double jy = std::clamp(gaussian(rng, options.pile_jitter), -jitter_cap, jitter_cap);
        placer.cubes.push_back(grid + Vec2{jx, jy});
      }
    }
    if (piles != nullptr) *piles = placed;
  }

  for (std::size_t i = 0; i < placer.cubes.size(); ++i)
    world.cubes.push_back({static_cast<int>(i), Loose{placer.cubes[i]}});

  if (auto err = validate_world(world); !err.empty()) throw SetupError("generated world is illegal: " + err);
  return world;
}

std::string validate_world(const WorldState& world) {
  const double half = world.arena.half();
  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    const auto& a = world.robots[i];
    if (!(a.radius > 0.0)) return fmt::format("robot {} has non-positive radius", a.id);
    if (std::abs(a.pose.x) > half - a.radius || std::abs(a.pose.y) > half - a.radius)
      return fmt::format("robot {} overlaps a wall", a.id);
    if (!(a.pose.theta > -kPi && a.pose.theta <= kPi)) return fmt::format("robot {} heading not normalized", a.id);
    for (std::size_t j = i + 1; j < world.robots.size(); ++j) {
      const auto& b = world.robots[j];
      if ((a.pose.position() - b.pose.position()).norm() < a.radius + b.radius)
        return fmt::format("robots {} and {} overlap", a.id, b.id);
    }
    if (a.carried_cube) {
      const auto* c = std::get_if<Carried>(&world.cube(*a.carried_cube).state);
      if (c == nullptr || c->robot_id != a.id) return fmt::format("robot {} carry bookkeeping broken", a.id);
    }
  }
  for (const auto& c : world.cubes) {
    if (const auto* carried = std::get_if<Carried>(&c.state)) {
      const auto& r = world.robot(carried->robot_id);
      if (r.carried_cube != c.id) return fmt::format("cube {} carried by a robot that does not hold it", c.id);
      continue;
    }
    const Vec2 p = *c.resting_position();
    const double lim = half - world.body.cube_radius + 1e-12;
    if (std::abs(p.x) > lim || std::abs(p.y) > lim) return fmt::format("cube {} outside the walls", c.id);
  }
  return {};
}

}  // namespace swarm
