#include "swarm/round.hpp"

#include <chrono>
#include <memory>

#include "swarm/arena_setup.hpp"
#include "swarm/localization.hpp"
#include "swarm/sensors.hpp"
#include "swarm/strategy.hpp"
#include "swarm/trace.hpp"

namespace swarm {

namespace {

struct Agent {
  Localizer localizer;
  NavSampler sampler;
  Controller controller;
  Rng camera_rng;
  Rng grasp_rng;
  Rng strategy_rng;
  RawNavSamples nav;
};

ControllerParams controller_params(const RoundConfig& config, ControllerParams p, const SensorParams& sensors) {
  p.robot_radius = config.body.robot_radius;
  p.grasp_reach = config.body.grasp_reach;
  p.grasp_half_angle = config.body.grasp_half_angle;
  p.gripper_offset = config.body.gripper_offset();
  p.camera_offset = sensors.camera_offset;
  p.zone_side = config.zone_side;
  return p;
}

}  // namespace

RoundResult run_round(const RoundConfig& config, const RoundOptions& options) {
  validate(config);
  SetupOptions setup;
  setup.competition_rules = config.competition_rules;
  WorldState world =
      generate_world(config.arena(), config.robot_count, config.distribution, config.seed, config.body, setup);
  return run_world(config, std::move(world), options);
}

RoundResult run_world(const RoundConfig& config, WorldState world, const RoundOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const double dt = config.dt;
  const std::int64_t ticks = config.total_ticks();
  const SensorParams sensors;

  LocalizationParams loc;
  loc.sigma_imu = config.noise.sigma_imu;
  loc.sigma_gps = config.noise.sigma_gps;
  const ControllerParams cparams = controller_params(config, options.controller, sensors);

  BlackboardParams bb;
  bb.stale_ticks = stale_ticks_for(config.strategy, dt);
  bb.latency_ticks = std::llround(config.blackboard_latency / dt);
  bb.loss_probability = config.blackboard_loss;
  Blackboard blackboard(bb, make_stream(config.seed, StreamPurpose::kBlackboard));

  const int n = static_cast<int>(world.robots.size());
  std::vector<Agent> agents;
  agents.reserve(n);
  for (int i = 0; i < n; ++i) {
    StrategySetup ss{i, n, world.arena.side_length, world.arena.zone_side, sensors.camera_range, dt, cparams.nav};
    agents.push_back(Agent{Localizer(world.robots[i].pose, loc),
                           NavSampler(config.noise, dt, make_stream(config.seed, StreamPurpose::kNav, i)),
                           Controller(cparams, make_strategy(config.strategy, ss)),
                           make_stream(config.seed, StreamPurpose::kCamera, i),
                           make_stream(config.seed, StreamPurpose::kGrasp, i),
                           make_stream(config.seed, StreamPurpose::kStrategy, i),
                           {}});
  }

  std::unique_ptr<TraceWriter> trace;
  if (options.trace != nullptr)
    trace = std::make_unique<TraceWriter>(*options.trace, TraceMeta{world.arena.side_length, world.arena.zone_side, n});

  RoundResult result;
  result.config_digest = config_digest(config);
  result.robots.resize(n);
  result.score_history.push_back(score(world));

  std::vector<PoseEstimatePair> estimates(n);
  std::vector<RobotCommand> commands(n);
  auto record_rows = [&](std::int64_t tick) {
    if (!trace) return;
    const int s = score(world);
    for (int i = 0; i < n; ++i) {
      const auto& r = world.robots[i];
      const auto& c = agents[i].controller;
      trace->robot_row(tick, tick * dt, r.id, r.pose, estimates[i].global_filter.pose(),
                       std::string(to_string(c.state().mode)), r.carried_cube.has_value(), s);
    }
  };
  auto context = [&](int i, std::int64_t tick) {
    StrategyContext ctx;
    ctx.robot_id = i;
    ctx.robot_count = n;
    ctx.arena_side = world.arena.side_length;
    ctx.zone_side = world.arena.zone_side;
    ctx.dt = dt;
    ctx.tick = tick;
    ctx.estimates = &estimates[i];
    ctx.rng = &agents[i].strategy_rng;
    ctx.blackboard = config.blackboard ? &blackboard : nullptr;
    ctx.nav = cparams.nav;
    return ctx;
  };

  std::int64_t last_recorded = -1;
  for (std::int64_t tick = 0; tick < ticks; ++tick) {
    // Sense and localize. Nav samples describe the step that just finished.
    std::vector<SensorFrame> frames(n);
    for (int i = 0; i < n; ++i) {
      auto& a = agents[i];
      if (tick > 0) a.localizer.step(a.nav, dt);
      estimates[i] = a.localizer.estimates();
      auto& f = frames[i];
      f.robot_id = i;
      f.tick = tick;
      f.ultrasound = sense_ultrasound(world, i, sensors);
      f.detections = sense_camera(world, i, sensors, &config.noise, &a.camera_rng);
      f.nav = a.nav;
      f.holding = world.robots[i].carried_cube.has_value();
    }
    if (options.observer) options.observer(TickView{tick, world, estimates});
    if (tick % config.trace_interval == 0) {
      record_rows(tick);
      last_recorded = tick;
    }

    for (int i = 0; i < n; ++i) {
      StrategyContext ctx = context(i, tick);
      commands[i] = {i, agents[i].controller.tick(frames[i], estimates[i], ctx)};
    }
    step_world(world, commands, dt);

    for (int i = 0; i < n; ++i) {
      StrategyContext ctx = context(i, tick);
      const auto action = commands[i].command.gripper;
      if (action == GripperAction::kGrasp) {
        agents[i].controller.on_grasp_result(attempt_pickup(world, i, agents[i].grasp_rng), ctx);
      } else if (action == GripperAction::kRelease && world.robots[i].carried_cube) {
        drop_cube(world, i);
        agents[i].controller.on_released(ctx);
      }
    }
    for (int i = 0; i < n; ++i) agents[i].nav = agents[i].sampler.sample(world, i);
    blackboard.commit(world.tick);

    const int s = score(world);
    for (const auto& e : world.take_events()) {
      if (e.robot_id >= 0 && e.robot_id < n) {
        if (e.kind == EventKind::kDrop && world.arena.in_zone(e.position)) ++result.robots[e.robot_id].cubes_banked;
        if (e.kind == EventKind::kPushIn) ++result.robots[e.robot_id].cubes_banked;
        if (e.kind == EventKind::kPushOut) --result.robots[e.robot_id].cubes_banked;
      }
      if (trace) trace->event_row(world.tick, world.sim_time, e, s);
      result.events.push_back(e);
    }
    result.score_history.push_back(s);
  }

  // Final state.
  for (int i = 0; i < n; ++i) {
    if (ticks > 0) agents[i].localizer.step(agents[i].nav, dt);
    estimates[i] = agents[i].localizer.estimates();
  }
  if (options.observer) options.observer(TickView{world.tick, world, estimates});
  if (world.tick != last_recorded) record_rows(world.tick);
  result.score = score(world);
  if (trace) {
    for (const auto& c : world.cubes) {
      // Carried cubes are written at the carrier's center.
      const auto* carried = std::get_if<Carried>(&c.state);
      const Vec2 pos = carried ? world.robot(carried->robot_id).pose.position() : *c.resting_position();
      trace->cube_row(world.tick, world.sim_time, c.id, pos, c.banked(), result.score);
    }
  }

  for (int i = 0; i < n; ++i) {
    auto& s = result.robots[i];
    const auto& st = agents[i].controller.stats();
    s.robot_id = i;
    s.distance = world.robots[i].distance_traveled;
    s.grasp_attempts = st.grasp_attempts;
    s.grasp_successes = st.grasp_successes;
    s.collisions_avoided = st.avoidance_events;
  }
  result.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

nlohmann::json to_json(const RoundResult& r) {
  nlohmann::json robots = nlohmann::json::array();
  for (const auto& s : r.robots)
    robots.push_back({{"robot_id", s.robot_id},
                      {"distance_m", std::round(s.distance * 1e6) / 1e6},
                      {"cubes_banked", s.cubes_banked},
                      {"grasp_attempts", s.grasp_attempts},
                      {"grasp_successes", s.grasp_successes},
                      {"collisions_avoided", s.collisions_avoided}});
  return {{"score", r.score}, {"config_digest", r.config_digest}, {"robots", robots}};
}

}  // namespace swarm
