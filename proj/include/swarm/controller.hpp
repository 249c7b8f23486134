#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include "swarm/command.hpp"
#include "swarm/localization.hpp"
#include "swarm/navigation.hpp"
#include "swarm/sensors.hpp"
#include "swarm/strategy.hpp"

namespace swarm {

enum class Mode { kSearching, kApproaching, kGrasping, kTransporting, kDropping, kAvoiding };

std::string_view to_string(Mode m);

struct ControllerParams {
  NavParams nav;
  double avoid_threshold = 0.4;
  double avoid_release = 0.45;  // hysteresis: leave avoidance once every reading clears this
  double creep_speed = 0.05;
  double avoid_min_time = 0.8;  // s a maneuver lasts at least
  // Encoders reporting far less speed than commanded mean the robot is wedged against
  // something the ultrasounds miss; that triggers a longer avoidance turn.
  double stall_ratio = 0.25;
  double stall_time = 1.0;      // s
  double stall_turn_time = 2.0; // s

  // Geometry the robot knows about itself.
  double robot_radius = 0.15;
  double camera_offset = 0.0;
  double grasp_reach = 0.1;
  double grasp_half_angle = 0.3;
  double grasp_margin = 0.85;  // fraction of the envelope used before commanding Grasp
  double gripper_offset = 0.19;

  double approach_gain = 2.0;
  double approach_slow_radius = 0.5;
  double approach_min_speed = 0.04;
  int max_grasp_failures = 4;
  double grasp_cooldown = 5.0;  // s spent ignoring cubes after repeated failures

  double zone_side = 1.0;
  double release_margin = 0.15;      // gripper point must be this far inside the zone edge
  double nest_fix_lifetime = 20.0;   // s a marker-derived position correction stays valid
  double nest_keepout = 0.6;         // searching robots turn away from markers closer than this
  double nest_cube_margin = 0.5;     // cubes estimated this close to the zone (no markers in view) are ignored
  double drop_turn_tolerance = 0.2;
};

struct ControllerState {
  Mode mode = Mode::kSearching;
  Mode resume_mode = Mode::kSearching;  // meaningful while Avoiding
  double avoid_direction = -1.0;        // latched turn sign for the current maneuver
  std::int64_t avoid_until = 0;
  std::optional<Vec2> target;           // estimated world position of the current target
  int grasp_failures = 0;
  std::int64_t cooldown_until = -1;
  std::optional<Vec2> nest_offset;      // marker-derived correction applied to the odom filter
  std::int64_t nest_fix_tick = 0;
  double drop_heading = 0.0;
  std::int64_t homing_search_ticks = 0;
};

struct ControllerStats {
  int avoidance_events = 0;
  int grasp_attempts = 0;
  int grasp_successes = 0;
  int stalls = 0;
};

/// Per-robot subsumption controller: avoidance over drop-off over pickup over search.
/// Reads only its own SensorFrame, its filter estimates and its StrategyContext.
class Controller {
 public:
  Controller(const ControllerParams& params, std::unique_ptr<SearchStrategy> strategy);

  BehaviorCommand tick(const SensorFrame& frame, const PoseEstimatePair& est, StrategyContext& ctx);

  /// Feedback from the gripper after a Grasp command was executed.
  void on_grasp_result(bool success, StrategyContext& ctx);
  /// Feedback after a Release command was executed.
  void on_released(StrategyContext& ctx);

  /// Steering toward a cube detection; switches to Grasping once inside the envelope.
  /// Throws std::invalid_argument for zone-boundary detections.
  BehaviorCommand approach_and_grasp(const TagDetection& detection);

  const ControllerState& state() const { return state_; }
  const ControllerStats& stats() const { return stats_; }
  const ControllerParams& params() const { return params_; }
  SearchStrategy& strategy() { return *strategy_; }

  /// Mode ignoring a pending avoidance maneuver.
  Mode effective_mode() const { return state_.mode == Mode::kAvoiding ? state_.resume_mode : state_.mode; }
  bool transporting() const { return effective_mode() == Mode::kTransporting; }

 private:
  BehaviorCommand arbitrate(const SensorFrame& frame, const PoseEstimatePair& est, StrategyContext& ctx);
  BehaviorCommand avoid(const SensorFrame& frame);
  BehaviorCommand transport(const SensorFrame& frame, const PoseEstimatePair& est, StrategyContext& ctx);
  BehaviorCommand turn_after_drop(const PoseEstimatePair& est, StrategyContext& ctx);
  void update_nest_fix(const SensorFrame& frame, const PoseEstimatePair& est);
  bool nest_fix_valid(std::int64_t tick, double dt) const;
  Pose best_local_pose(const PoseEstimatePair& est, std::int64_t tick, double dt) const;
  const TagDetection* pick_cube(const SensorFrame& frame, const PoseEstimatePair& est, double dt);
  std::optional<BehaviorCommand> nest_keepout(const SensorFrame& frame);
  bool in_grasp_envelope(const TagDetection& d) const;
  Vec2 detection_offset(const TagDetection& d) const;

  ControllerParams params_;
  std::unique_ptr<SearchStrategy> strategy_;
  ControllerState state_;
  ControllerStats stats_;
  std::int64_t tick_ = 0;
  int cubes_in_view_ = 0;
  std::optional<Vec2> last_cube_estimate_;
  double last_commanded_v_ = 0.0;
  std::int64_t stall_ticks_ = 0;
};

}  // namespace swarm
