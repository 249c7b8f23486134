#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swarm/config.hpp"
#include "swarm/controller.hpp"
#include "swarm/world.hpp"

namespace swarm {

struct RobotStats {
  int robot_id = 0;
  double distance = 0.0;
  int cubes_banked = 0;
  int grasp_attempts = 0;
  int grasp_successes = 0;
  int collisions_avoided = 0;
};

struct RoundResult {
  int score = 0;
  std::vector<RobotStats> robots;
  std::string config_digest;
  std::vector<int> score_history;  // score after every tick, starting with the initial world
  std::vector<WorldEvent> events;
  double wall_clock_seconds = 0.0;  // never serialized; it would break byte-identical results
};

/// Observer called once per tick after localization, before the controllers run.
struct TickView {
  std::int64_t tick;
  const WorldState& world;
  const std::vector<PoseEstimatePair>& estimates;
};
using TickObserver = std::function<void(const TickView&)>;

struct RoundOptions {
  std::ostream* trace = nullptr;
  TickObserver observer;
  ControllerParams controller;  // geometry fields are overwritten from the config
};

/// Generates the world from the config and runs it to completion.
RoundResult run_round(const RoundConfig& config, const RoundOptions& options = {});

/// Runs a prepared world; used for constructed scenarios.
RoundResult run_world(const RoundConfig& config, WorldState world, const RoundOptions& options = {});

nlohmann::json to_json(const RoundResult& result);

}  // namespace swarm
