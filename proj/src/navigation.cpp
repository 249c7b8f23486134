#include "swarm/navigation.hpp"

#include <algorithm>
#include <cmath>

namespace swarm {

NavResult navigate_to(Vec2 goal, const Pose& estimate, const NavParams& params) {
  const Vec2 rel = goal - estimate.position();
  NavResult out;
  out.distance = rel.norm();
  out.reached = out.distance < params.goal_tolerance;
  const double error = wrap_angle(std::atan2(rel.y, rel.x) - estimate.theta);
  out.command.omega = std::clamp(params.heading_gain * error, -params.omega_max, params.omega_max);
  out.command.v = std::abs(error) < params.heading_gate ? params.v_max : 0.0;
  return out;
}

BehaviorCommand turn_toward(double heading, const Pose& estimate, const NavParams& params) {
  const double error = wrap_angle(heading - estimate.theta);
  BehaviorCommand cmd;
  cmd.omega = std::clamp(params.heading_gain * error, -params.omega_max, params.omega_max);
  return cmd;
}

}  // namespace swarm
