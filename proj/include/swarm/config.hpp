#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "swarm/arena_setup.hpp"
#include "swarm/localization.hpp"
#include "swarm/sensors.hpp"
#include "swarm/strategy.hpp"
#include "swarm/world.hpp"

namespace swarm {

/// Fully determines one round.
struct RoundConfig {
  std::string arena_preset = "15";
  double zone_side = 1.0;
  int robot_count = 3;
  bool competition_rules = false;
  StrategySpec strategy;
  DistributionSpec distribution;
  double duration = 1800.0;  // s
  double dt = 0.1;
  std::uint64_t seed = 1;
  NoiseParams noise;
  BodyParams body;
  bool blackboard = true;
  double blackboard_latency = 0.0;  // s
  double blackboard_loss = 0.0;
  int trace_interval = 10;  // ticks

  std::int64_t total_ticks() const;
  Arena arena() const { return swarm::arena_preset(arena_preset, zone_side); }
};

/// Throws ConfigError describing the first invalid field.
void validate(const RoundConfig& config);

/// Parses a YAML (or JSON) round config. Unknown keys are rejected.
RoundConfig parse_round_config(const std::string& text);
RoundConfig load_round_config(const std::filesystem::path& path);

/// Canonical representation used for digests and result files.
nlohmann::json to_json(const RoundConfig& config);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_digest(const RoundConfig& config);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace swarm
