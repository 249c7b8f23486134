#include "swarm/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "swarm/world.hpp"

namespace swarm {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kSearching: return "Searching";
    case Mode::kApproaching: return "Approaching";
    case Mode::kGrasping: return "Grasping";
    case Mode::kTransporting: return "Transporting";
    case Mode::kDropping: return "Dropping";
    case Mode::kAvoiding: return "Avoiding";
  }
  return "?";
}

namespace {

Vec2 rotate(Vec2 v, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double chebyshev(Vec2 p) { return std::max(std::abs(p.x), std::abs(p.y)); }

}  // namespace

Controller::Controller(const ControllerParams& params, std::unique_ptr<SearchStrategy> strategy)
    : params_(params), strategy_(std::move(strategy)) {
  if (!strategy_) throw std::invalid_argument("Controller requires a strategy");
}

Vec2 Controller::detection_offset(const TagDetection& d) const {
  return Vec2{params_.camera_offset, 0.0} + unit(d.relative_bearing) * d.distance;
}

bool Controller::in_grasp_envelope(const TagDetection& d) const {
  const Vec2 rel = detection_offset(d);
  const double front_dist = (rel - Vec2{params_.robot_radius, 0.0}).norm();
  const double bearing = std::atan2(rel.y, rel.x);
  return front_dist <= params_.grasp_margin * params_.grasp_reach &&
         std::abs(bearing) <= params_.grasp_margin * params_.grasp_half_angle;
}

void Controller::update_nest_fix(const SensorFrame& frame, const PoseEstimatePair& est) {
  const Pose odom = est.odom_filter.pose();
  Vec2 sum;
  int n = 0;
  for (const auto& d : frame.detections) {
    if (d.kind != TagKind::kZoneBoundary) continue;
    const Vec2 marker = zone_marker_position(d.tag_id, params_.zone_side);
    sum = sum + (marker - rotate(detection_offset(d), odom.theta));
    ++n;
  }
  if (n == 0) return;
  state_.nest_offset = sum * (1.0 / n) - odom.position();
  state_.nest_fix_tick = frame.tick;
}

bool Controller::nest_fix_valid(std::int64_t tick, double dt) const {
  return state_.nest_offset && static_cast<double>(tick - state_.nest_fix_tick) * dt <= params_.nest_fix_lifetime;
}

Pose Controller::best_local_pose(const PoseEstimatePair& est, std::int64_t tick, double dt) const {
  if (nest_fix_valid(tick, dt)) {
    const Pose odom = est.odom_filter.pose();
    return {odom.x + state_.nest_offset->x, odom.y + state_.nest_offset->y, odom.theta};
  }
  return est.global_filter.pose();
}

BehaviorCommand Controller::avoid(const SensorFrame& frame) {
  const auto& us = frame.ultrasound;
  if (state_.mode != Mode::kAvoiding) {
    int nearest = 0;
    for (int i = 1; i < 3; ++i)
      if (us[i].range < us[nearest].range) nearest = i;
    // Positive omega turns left. Ties (and a blocked center with equal sides) turn right.
    // The sign is latched so the robot does not dither between the two sides.
    state_.avoid_direction = -1.0;
    if (nearest == 2) state_.avoid_direction = 1.0;
    if (nearest == 1 && us[0].range > us[2].range) state_.avoid_direction = 1.0;
  }
  return {params_.creep_speed, state_.avoid_direction * params_.nav.omega_max, GripperAction::kNone};
}

std::optional<BehaviorCommand> Controller::nest_keepout(const SensorFrame& frame) {
  double bearing_sum = 0.0;
  int n = 0;
  for (const auto& d : frame.detections) {
    if (d.kind != TagKind::kZoneBoundary || d.distance >= params_.nest_keepout) continue;
    bearing_sum += d.relative_bearing;
    ++n;
  }
  if (n == 0) return std::nullopt;
  const double dir = bearing_sum < 0.0 ? 1.0 : -1.0;
  return BehaviorCommand{params_.creep_speed, dir * params_.nav.omega_max, GripperAction::kNone};
}

const TagDetection* Controller::pick_cube(const SensorFrame& frame, const PoseEstimatePair& est, double dt) {
  cubes_in_view_ = 0;
  if (frame.tick < state_.cooldown_until) return nullptr;
  const bool fix = nest_fix_valid(frame.tick, dt);
  const Pose local = best_local_pose(est, frame.tick, dt);
  const double zone_half = 0.5 * params_.zone_side;
  const double margin = fix ? 0.05 : params_.nest_cube_margin;
  const TagDetection* best = nullptr;
  for (const auto& d : frame.detections) {
    if (d.kind != TagKind::kResourceCube) continue;
    const Vec2 world = local.position() + rotate(detection_offset(d), local.theta);
    if (chebyshev(world) <= zone_half + margin) continue;
    ++cubes_in_view_;
    if (best == nullptr || d.distance < best->distance) best = &d;
  }
  if (best != nullptr) {
    const Pose g = est.global_filter.pose();
    last_cube_estimate_ = g.position() + rotate(detection_offset(*best), g.theta);
  }
  return best;
}

BehaviorCommand Controller::approach_and_grasp(const TagDetection& detection) {
  if (detection.kind != TagKind::kResourceCube)
    throw std::invalid_argument("approach_and_grasp: detection is not a resource cube");
  if (in_grasp_envelope(detection)) {
    state_.mode = Mode::kGrasping;
    return {0.0, 0.0, GripperAction::kGrasp};
  }
  state_.mode = Mode::kApproaching;
  const Vec2 rel = detection_offset(detection);
  const double bearing = std::atan2(rel.y, rel.x);
  const double front_dist = (rel - Vec2{params_.robot_radius, 0.0}).norm();
  BehaviorCommand cmd;
  cmd.omega = std::clamp(params_.approach_gain * bearing, -params_.nav.omega_max, params_.nav.omega_max);
  const double closeness = std::clamp(front_dist / params_.approach_slow_radius, 0.0, 1.0);
  const double alignment = std::max(0.0, 1.0 - std::abs(bearing) / 0.6);
  cmd.v = params_.nav.v_max * closeness * alignment;
  if (alignment > 0.0) cmd.v = std::max(cmd.v, params_.approach_min_speed * alignment);
  return cmd;
}

BehaviorCommand Controller::transport(const SensorFrame& frame, const PoseEstimatePair& est, StrategyContext& ctx) {
  if (nest_fix_valid(frame.tick, ctx.dt)) {
    state_.homing_search_ticks = 0;
    const Pose local = best_local_pose(est, frame.tick, ctx.dt);
    const Vec2 grip = local.position() + unit(local.theta) * params_.gripper_offset;
    if (chebyshev(grip) <= 0.5 * params_.zone_side - params_.release_margin)
      return {0.0, 0.0, GripperAction::kRelease};
    NavParams nav = params_.nav;
    nav.goal_tolerance = 0.0;
    return navigate_to({0.0, 0.0}, local, nav).command;
  }
  const NavResult nav = navigate_to({0.0, 0.0}, est.global_filter.pose(), params_.nav);
  if (!nav.reached && state_.homing_search_ticks == 0) return nav.command;
  // Near the zone by dead reckoning but no markers in view: widen a spiral until one appears.
  ++state_.homing_search_ticks;
  const double t = static_cast<double>(state_.homing_search_ticks) * ctx.dt;
  const double radius = 0.3 + 0.02 * t;
  const double v = 0.5 * params_.nav.v_max;
  if (radius > 4.0) state_.homing_search_ticks = 0;
  return {v, std::min(params_.nav.omega_max, v / radius), GripperAction::kNone};
}

BehaviorCommand Controller::turn_after_drop(const PoseEstimatePair& est, StrategyContext& ctx) {
  const Pose odom = est.odom_filter.pose();
  if (std::abs(wrap_angle(state_.drop_heading - odom.theta)) <= params_.drop_turn_tolerance) {
    state_.mode = Mode::kSearching;
    strategy_->on_drop(ctx);
    return {};
  }
  BehaviorCommand cmd;
  cmd.omega = wrap_angle(state_.drop_heading - odom.theta) >= 0.0 ? params_.nav.omega_max : -params_.nav.omega_max;
  return cmd;
}

BehaviorCommand Controller::tick(const SensorFrame& frame, const PoseEstimatePair& est, StrategyContext& ctx) {
  if (last_commanded_v_ > 0.5 * params_.creep_speed &&
      frame.nav.encoder_v < params_.stall_ratio * last_commanded_v_) {
    ++stall_ticks_;
  } else {
    stall_ticks_ = 0;
  }
  const BehaviorCommand cmd = arbitrate(frame, est, ctx);
  last_commanded_v_ = cmd.v;
  return cmd;
}

BehaviorCommand Controller::arbitrate(const SensorFrame& frame, const PoseEstimatePair& est, StrategyContext& ctx) {
  tick_ = frame.tick;
  // Gripper proprioception keeps the transport state coherent with the body.
  if (frame.holding != transporting()) {
    const Mode synced = frame.holding ? Mode::kTransporting : Mode::kSearching;
    (state_.mode == Mode::kAvoiding ? state_.resume_mode : state_.mode) = synced;
  }

  update_nest_fix(frame, est);

  // Layer 1: obstacle avoidance preempts everything.
  double min_range = std::numeric_limits<double>::infinity();
  for (const auto& u : frame.ultrasound) min_range = std::min(min_range, u.range);
  const bool threatened = min_range < params_.avoid_threshold;
  if (stall_ticks_ >= std::llround(params_.stall_time / ctx.dt) && state_.mode != Mode::kAvoiding) {
    stall_ticks_ = 0;
    ++stats_.stalls;
    const BehaviorCommand cmd = avoid(frame);
    state_.avoid_until = frame.tick + std::llround(params_.stall_turn_time / ctx.dt);
    Mode resume = state_.mode;
    if (resume == Mode::kGrasping || resume == Mode::kApproaching) resume = Mode::kSearching;
    state_.resume_mode = resume;
    state_.mode = Mode::kAvoiding;
    ++stats_.avoidance_events;
    return cmd;
  }
  const bool holding_on = state_.mode == Mode::kAvoiding &&
                          (min_range < params_.avoid_release || frame.tick < state_.avoid_until);
  if (threatened || holding_on) {
    if (state_.mode != Mode::kAvoiding) {
      const BehaviorCommand cmd = avoid(frame);
      state_.avoid_until = frame.tick + std::llround(params_.avoid_min_time / ctx.dt);
      Mode resume = state_.mode;
      if (resume == Mode::kGrasping || resume == Mode::kApproaching) resume = Mode::kSearching;
      state_.resume_mode = resume;
      state_.mode = Mode::kAvoiding;
      ++stats_.avoidance_events;
      return cmd;
    }
    return avoid(frame);
  }
  if (state_.mode == Mode::kAvoiding) {
    state_.mode = state_.resume_mode;
    if (state_.mode == Mode::kSearching) strategy_->on_obstacle(ctx);
  }

  // Layer 2: drop-off.
  if (state_.mode == Mode::kTransporting) return transport(frame, est, ctx);
  if (state_.mode == Mode::kDropping) {
    const BehaviorCommand cmd = turn_after_drop(est, ctx);
    if (state_.mode == Mode::kDropping) return cmd;
  }

  // Layer 3: pickup.
  if (const TagDetection* cube = pick_cube(frame, est, ctx.dt)) {
    state_.target = last_cube_estimate_;
    const BehaviorCommand cmd = approach_and_grasp(*cube);
    if (cmd.gripper == GripperAction::kGrasp) ++stats_.grasp_attempts;
    return cmd;
  }
  state_.target.reset();

  // Layer 4: search, with a keep-out so searchers do not bulldoze the zone.
  state_.mode = Mode::kSearching;
  if (auto keepout = nest_keepout(frame)) return *keepout;
  return strategy_->propose(ctx);
}

void Controller::on_grasp_result(bool success, StrategyContext& ctx) {
  if (success) {
    ++stats_.grasp_successes;
    state_.grasp_failures = 0;
    state_.mode = Mode::kTransporting;
    GraspReport report;
    report.cube_estimate = last_cube_estimate_.value_or(ctx.global_pose().position());
    report.other_cubes_in_view = std::max(0, cubes_in_view_ - 1);
    strategy_->on_grasp(ctx, report);
    return;
  }
  state_.mode = Mode::kApproaching;
  if (++state_.grasp_failures >= params_.max_grasp_failures) {
    state_.grasp_failures = 0;
    state_.cooldown_until = tick_ + std::llround(params_.grasp_cooldown / ctx.dt);
  }
}

void Controller::on_released(StrategyContext& ctx) {
  state_.mode = Mode::kDropping;
  state_.drop_heading = wrap_angle(ctx.odom_pose().theta + kPi);
  state_.nest_offset.reset();
}

}  // namespace swarm
