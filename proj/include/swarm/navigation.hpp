#pragma once

#include "swarm/command.hpp"
#include "swarm/geometry.hpp"

namespace swarm {

struct NavParams {
  double v_max = 0.2;
  double omega_max = 1.0;
  double heading_gain = 2.0;
  double heading_gate = 0.5;  // drive only when |heading error| is below this
  double goal_tolerance = 0.5;
};

struct NavResult {
  BehaviorCommand command;
  bool reached = false;
  double distance = 0.0;  // estimated
};

/// Proportional heading controller toward `goal` from the estimated pose.
NavResult navigate_to(Vec2 goal, const Pose& estimate, const NavParams& params);

/// Rotate in place toward an absolute heading.
BehaviorCommand turn_toward(double heading, const Pose& estimate, const NavParams& params);

}  // namespace swarm
