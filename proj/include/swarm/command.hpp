#pragma once

#include <string_view>

namespace swarm {

enum class GripperAction { kNone, kGrasp, kRelease };

/// Wheel-velocity and gripper output of one controller tick.
struct BehaviorCommand {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
  GripperAction gripper = GripperAction::kNone;

  bool operator==(const BehaviorCommand&) const = default;
};

struct RobotCommand {
  int robot_id = 0;
  BehaviorCommand command;
};

inline std::string_view to_string(GripperAction a) {
  switch (a) {
    case GripperAction::kNone: return "none";
    case GripperAction::kGrasp: return "grasp";
    case GripperAction::kRelease: return "release";
  }
  return "?";
}

}  // namespace swarm
