#pragma once

#include <vector>

#include "swarm/world.hpp"

namespace swarm::test {

inline WorldState make_world(double side = 15.0, double zone_side = 1.0) {
  WorldState w;
  w.arena = {side, zone_side};
  return w;
}

inline int add_robot(WorldState& w, Pose pose) {
  RobotBody r;
  r.id = static_cast<int>(w.robots.size());
  r.pose = pose;
  r.radius = w.body.robot_radius;
  r.max_range = w.body.max_range;
  w.robots.push_back(r);
  return r.id;
}

inline int add_cube(WorldState& w, Vec2 p) {
  const int id = static_cast<int>(w.cubes.size());
  if (w.arena.in_zone(p)) {
    w.cubes.push_back({id, Banked{p}});
  } else {
    w.cubes.push_back({id, Loose{p}});
  }
  return id;
}

inline std::vector<RobotCommand> commands(const WorldState& w, BehaviorCommand c) {
  std::vector<RobotCommand> out;
  for (const auto& r : w.robots) out.push_back({r.id, c});
  return out;
}

}  // namespace swarm::test
