#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "swarm/command.hpp"
#include "swarm/geometry.hpp"
#include "swarm/random.hpp"

namespace swarm {

/// Physical constants of robots, cubes and the gripper.
struct BodyParams {
  double robot_radius = 0.15;
  double cube_radius = 0.035;
  double push_epsilon = 0.005;
  double grasp_reach = 0.1;        // beyond the footprint front
  double grasp_half_angle = 0.3;   // rad, measured from the robot center
  double grasp_probability = 0.95;
  double fumble_sigma = 0.01;      // m, per-axis jitter on a failed grasp
  double max_range = 5750.0;       // m of travel per robot
  bool pushing = true;

  /// Distance from robot center to a cube held in (or dropped from) the gripper.
  double gripper_offset() const { return robot_radius + cube_radius + push_epsilon; }
};

struct Arena {
  double side_length = 15.0;
  double zone_side = 1.0;

  double half() const { return 0.5 * side_length; }
  double zone_half() const { return 0.5 * zone_side; }
  bool in_zone(Vec2 p) const { return inside_centered_square(p, zone_side); }
};

/// Number of fiducial markers on the collection-zone perimeter.
inline constexpr int kZoneMarkerCount = 16;

/// Position of perimeter marker k, walking counter-clockwise from corner (-h, -h).
Vec2 zone_marker_position(int k, double zone_side);

struct RobotBody {
  int id = 0;
  Pose pose;
  double radius = 0.15;
  std::optional<int> carried_cube;
  double distance_traveled = 0.0;
  double max_range = 5750.0;
  // Motion actually realized during the last step, after clamping.
  double executed_v = 0.0;
  double executed_omega = 0.0;

  bool exhausted() const { return distance_traveled >= max_range; }
};

struct Loose {
  Vec2 position;
};
struct Carried {
  int robot_id = 0;
};
struct Banked {
  Vec2 position;
};
using CubeState = std::variant<Loose, Carried, Banked>;

struct Cube {
  int id = 0;
  CubeState state = Loose{};

  bool loose() const { return std::holds_alternative<Loose>(state); }
  bool carried() const { return std::holds_alternative<Carried>(state); }
  bool banked() const { return std::holds_alternative<Banked>(state); }
  /// Resting position; empty while carried.
  std::optional<Vec2> resting_position() const;
};

enum class EventKind { kPickup, kDrop, kPushOut, kPushIn };

struct WorldEvent {
  EventKind kind = EventKind::kPickup;
  int robot_id = 0;
  int cube_id = 0;
  Vec2 position;
};

struct WorldState {
  Arena arena;
  BodyParams body;
  std::vector<RobotBody> robots;
  std::vector<Cube> cubes;
  double sim_time = 0.0;
  std::int64_t tick = 0;
  // Events raised since the last call to take_events().
  std::vector<WorldEvent> events;

  RobotBody& robot(int id);
  const RobotBody& robot(int id) const;
  Cube& cube(int id);
  const Cube& cube(int id) const;

  std::vector<WorldEvent> take_events();
};

/// Cubes currently Banked.
int score(const WorldState& world);

Vec2 gripper_point(const WorldState& world, const RobotBody& robot);

/// Advances every robot by one fixed step, resolving wall and robot contact and pushing cubes.
/// Throws ConfigError unless `commands` holds exactly one command per robot.
void step_world(WorldState& world, std::span<const RobotCommand> commands, double dt);

/// Displaces an overlapped Loose/Banked cube out of the robot footprint. No-op without overlap.
void push_cube(WorldState& world, int robot_id, int cube_id);

/// Tries to grasp the nearest Loose cube inside the grasp envelope.
bool attempt_pickup(WorldState& world, int robot_id, Rng& rng);

/// Releases the held cube at the gripper point. No-op when not carrying.
void drop_cube(WorldState& world, int robot_id);

}  // namespace swarm
