#include "swarm/world.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "swarm/errors.hpp"

namespace swarm {

Vec2 zone_marker_position(int k, double zone_side) {
  const double h = 0.5 * zone_side;
  const int per_side = kZoneMarkerCount / 4;
  const int side = (k / per_side) % 4;
  const double s = static_cast<double>(k % per_side) / per_side * zone_side;
  switch (side) {
    case 0: return {-h + s, -h};
    case 1: return {h, -h + s};
    case 2: return {h - s, h};
    default: return {-h, h - s};
  }
}

std::optional<Vec2> Cube::resting_position() const {
  if (const auto* l = std::get_if<Loose>(&state)) return l->position;
  if (const auto* b = std::get_if<Banked>(&state)) return b->position;
  return std::nullopt;
}

RobotBody& WorldState::robot(int id) {
  return const_cast<RobotBody&>(std::as_const(*this).robot(id));
}

const RobotBody& WorldState::robot(int id) const {
  for (const auto& r : robots)
    if (r.id == id) return r;
  throw ConfigError("unknown robot id " + std::to_string(id));
}

Cube& WorldState::cube(int id) { return const_cast<Cube&>(std::as_const(*this).cube(id)); }

const Cube& WorldState::cube(int id) const {
  for (const auto& c : cubes)
    if (c.id == id) return c;
  throw ConfigError("unknown cube id " + std::to_string(id));
}

std::vector<WorldEvent> WorldState::take_events() {
  std::vector<WorldEvent> out;
  out.swap(events);
  return out;
}

int score(const WorldState& world) {
  return static_cast<int>(
      std::count_if(world.cubes.begin(), world.cubes.end(), [](const Cube& c) { return c.banked(); }));
}

Vec2 gripper_point(const WorldState& world, const RobotBody& robot) {
  return robot.pose.position() + unit(robot.pose.theta) * world.body.gripper_offset();
}

namespace {

Vec2 clamp_cube_to_arena(const WorldState& world, Vec2 p) {
  const double lim = world.arena.half() - world.body.cube_radius;
  return {std::clamp(p.x, -lim, lim), std::clamp(p.y, -lim, lim)};
}

// A resting cube is Banked exactly when it lies inside the zone.
void settle_cube(WorldState& world, Cube& cube, Vec2 p, int robot_id) {
  const bool was_banked = cube.banked();
  const bool now_banked = world.arena.in_zone(p);
  if (now_banked) {
    cube.state = Banked{p};
  } else {
    cube.state = Loose{p};
  }
  if (was_banked && !now_banked) world.events.push_back({EventKind::kPushOut, robot_id, cube.id, p});
  if (!was_banked && now_banked) world.events.push_back({EventKind::kPushIn, robot_id, cube.id, p});
}

// Largest fraction of `d` the disc at p can travel before touching the disc at q.
double contact_fraction(Vec2 p, Vec2 d, Vec2 q, double min_dist) {
  const Vec2 w = p - q;
  const double a = d.dot(d);
  const double b = 2.0 * w.dot(d);
  const double c = w.dot(w) - min_dist * min_dist;
  if (a == 0.0 || b >= 0.0) return 1.0;
  if (c <= 0.0) return 0.0;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return 1.0;
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  return std::clamp(t, 0.0, 1.0);
}

double wall_fraction(double p, double d, double lim) {
  if (d > 0.0) return std::max(0.0, (lim - p) / d);
  if (d < 0.0) return std::max(0.0, (-lim - p) / d);
  return 1.0;
}

bool overlaps_any(const WorldState& world, std::size_t self, Vec2 p) {
  const auto& me = world.robots[self];
  for (std::size_t j = 0; j < world.robots.size(); ++j) {
    if (j == self) continue;
    const auto& other = world.robots[j];
    if ((p - other.pose.position()).norm() < me.radius + other.radius) return true;
  }
  return false;
}

void move_robot(WorldState& world, std::size_t index, const BehaviorCommand& cmd, double dt) {
  RobotBody& r = world.robots[index];
  if (r.exhausted()) {
    r.executed_v = 0.0;
    r.executed_omega = 0.0;
    return;
  }
  r.pose.theta = wrap_angle(r.pose.theta + cmd.omega * dt);
  r.executed_omega = cmd.omega;

  const Vec2 p = r.pose.position();
  const Vec2 heading = unit(r.pose.theta);
  const Vec2 d = heading * (cmd.v * dt);
  const double step_len = std::abs(cmd.v * dt);

  double t = 1.0;
  const double lim = world.arena.half() - r.radius;
  t = std::min(t, wall_fraction(p.x, d.x, lim));
  t = std::min(t, wall_fraction(p.y, d.y, lim));
  for (std::size_t j = 0; j < world.robots.size(); ++j) {
    if (j == index) continue;
    const auto& other = world.robots[j];
    t = std::min(t, contact_fraction(p, d, other.pose.position(), r.radius + other.radius));
  }

  bool budget_hit = false;
  const double remaining = r.max_range - r.distance_traveled;
  if (step_len * t > remaining) {
    t = remaining / step_len;
    budget_hit = true;
  }

  Vec2 next = p + d * t;
  next = {std::clamp(next.x, -lim, lim), std::clamp(next.y, -lim, lim)};
  for (int i = 0; i < 60 && t > 0.0 && overlaps_any(world, index, next); ++i) {
    t *= 0.5;
    budget_hit = false;
    next = p + d * t;
    next = {std::clamp(next.x, -lim, lim), std::clamp(next.y, -lim, lim)};
  }
  if (t > 0.0 && overlaps_any(world, index, next)) {
    t = 0.0;
    next = p;
  }

  r.pose.x = next.x;
  r.pose.y = next.y;
  r.executed_v = cmd.v * t;
  if (budget_hit) {
    r.distance_traveled = r.max_range;
  } else {
    r.distance_traveled += step_len * t;
  }
}

}  // namespace

void step_world(WorldState& world, std::span<const RobotCommand> commands, double dt) {
  if (!(dt > 0.0)) throw ConfigError("step_world: dt must be positive");
  std::vector<const BehaviorCommand*> by_index(world.robots.size(), nullptr);
  for (const auto& rc : commands) {
    bool found = false;
    for (std::size_t i = 0; i < world.robots.size(); ++i) {
      if (world.robots[i].id != rc.robot_id) continue;
      if (by_index[i] != nullptr)
        throw ConfigError("duplicate command for robot " + std::to_string(rc.robot_id));
      by_index[i] = &rc.command;
      found = true;
    }
    if (!found) throw ConfigError("command references unknown robot " + std::to_string(rc.robot_id));
  }
  for (std::size_t i = 0; i < by_index.size(); ++i)
    if (by_index[i] == nullptr)
      throw ConfigError("missing command for robot " + std::to_string(world.robots[i].id));

  for (std::size_t i = 0; i < world.robots.size(); ++i) {
    move_robot(world, i, *by_index[i], dt);
    if (!world.body.pushing) continue;
    const int rid = world.robots[i].id;
    for (auto& cube : world.cubes) {
      if (!cube.carried()) push_cube(world, rid, cube.id);
    }
  }
  world.tick += 1;
  world.sim_time = static_cast<double>(world.tick) * dt;
}

void push_cube(WorldState& world, int robot_id, int cube_id) {
  const RobotBody& r = world.robot(robot_id);
  Cube& cube = world.cube(cube_id);
  const auto rest = cube.resting_position();
  if (!rest) return;
  const Vec2 center = r.pose.position();
  const Vec2 rel = *rest - center;
  const double dist = rel.norm();
  const double contact = r.radius + world.body.cube_radius;
  if (dist >= contact) return;
  const Vec2 dir = dist > 0.0 ? rel * (1.0 / dist) : unit(r.pose.theta);
  const Vec2 target = clamp_cube_to_arena(world, center + dir * (contact + world.body.push_epsilon));
  settle_cube(world, cube, target, robot_id);
}

bool attempt_pickup(WorldState& world, int robot_id, Rng& rng) {
  RobotBody& r = world.robot(robot_id);
  if (r.carried_cube) return false;
  const Vec2 front = r.pose.position() + unit(r.pose.theta) * r.radius;
  Cube* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (auto& cube : world.cubes) {
    const auto* l = std::get_if<Loose>(&cube.state);
    if (l == nullptr) continue;
    const double reach = (l->position - front).norm();
    if (reach > world.body.grasp_reach) continue;
    const Vec2 rel = l->position - r.pose.position();
    const double bearing = wrap_angle(std::atan2(rel.y, rel.x) - r.pose.theta);
    if (std::abs(bearing) > world.body.grasp_half_angle) continue;
    if (reach < best_dist) {
      best_dist = reach;
      best = &cube;
    }
  }
  if (best == nullptr) return false;
  const Vec2 at = std::get<Loose>(best->state).position;
  if (bernoulli(rng, world.body.grasp_probability)) {
    best->state = Carried{robot_id};
    r.carried_cube = best->id;
    world.events.push_back({EventKind::kPickup, robot_id, best->id, at});
    return true;
  }
  const Vec2 jittered = clamp_cube_to_arena(
      world, at + Vec2{gaussian(rng, world.body.fumble_sigma), gaussian(rng, world.body.fumble_sigma)});
  settle_cube(world, *best, jittered, robot_id);
  return false;
}

void drop_cube(WorldState& world, int robot_id) {
  RobotBody& r = world.robot(robot_id);
  if (!r.carried_cube) return;
  Cube& cube = world.cube(*r.carried_cube);
  const Vec2 at = clamp_cube_to_arena(world, gripper_point(world, r));
  if (world.arena.in_zone(at)) {
    cube.state = Banked{at};
  } else {
    cube.state = Loose{at};
  }
  r.carried_cube.reset();
  world.events.push_back({EventKind::kDrop, robot_id, cube.id, at});
}

}  // namespace swarm
