#include "swarm/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "swarm/errors.hpp"

namespace swarm {

// --- blackboard --------------------------------------------------------------

Blackboard::Blackboard(const BlackboardParams& params, Rng rng) : params_(params), rng_(std::move(rng)) {}

void Blackboard::post(Vec2 position, std::int64_t tick) {
  if (bernoulli(rng_, params_.loss_probability)) return;
  pending_.push_back({position, tick, tick + params_.latency_ticks});
}

void Blackboard::commit(std::int64_t tick) {
  std::vector<Pending> later;
  for (const auto& p : pending_) {
    if (p.deliver_tick > tick) {
      later.push_back(p);
      continue;
    }
    auto near = std::find_if(sites_.begin(), sites_.end(), [&](const Site& s) {
      return (s.position - p.position).norm() < params_.merge_radius;
    });
    if (near != sites_.end()) {
      near->position = p.position;
      near->refreshed_tick = std::max(near->refreshed_tick, p.posted_tick);
    } else {
      sites_.push_back({next_id_++, p.position, p.posted_tick, p.posted_tick});
    }
  }
  pending_ = std::move(later);
  std::erase_if(sites_, [&](const Site& s) { return tick - s.refreshed_tick >= params_.stale_ticks; });
}

std::optional<Site> Blackboard::freshest() const {
  if (sites_.empty()) return std::nullopt;
  return *std::max_element(sites_.begin(), sites_.end(), [](const Site& a, const Site& b) {
    if (a.refreshed_tick != b.refreshed_tick) return a.refreshed_tick < b.refreshed_tick;
    return a.id > b.id;
  });
}

// --- random walk -------------------------------------------------------------

RandomWalk::RandomWalk(const RandomWalkParams& params) : params_(params) {
  if (params.sigma_turn < 0.0) throw ConfigError("random_walk: sigma_turn must be >= 0");
  if (params.hold_min <= 0.0 || params.hold_max < params.hold_min)
    throw ConfigError("random_walk: need 0 < hold_min <= hold_max");
}

BehaviorCommand RandomWalk::propose(StrategyContext& ctx) {
  const Pose est = ctx.odom_pose();
  auto draw_hold = [&] {
    const double s = uniform(*ctx.rng, params_.hold_min, params_.hold_max);
    hold_ticks_left_ = std::max<std::int64_t>(1, std::llround(s / ctx.dt));
  };
  if (hold_ticks_left_ < 0) draw_hold();

  if (!turning_ && hold_ticks_left_ == 0) {
    last_turn_ = gaussian(*ctx.rng, params_.sigma_turn);
    ++turns_drawn_;
    target_heading_ = wrap_angle(est.theta + last_turn_);
    turning_ = true;
  }
  if (turning_) {
    if (std::abs(wrap_angle(target_heading_ - est.theta)) > 0.05) return turn_toward(target_heading_, est, ctx.nav);
    turning_ = false;
    draw_hold();
  }
  --hold_ticks_left_;
  return {ctx.nav.v_max, 0.0, GripperAction::kNone};
}

// Abandon a turn that may point back at the obstacle and start a fresh straight leg.
void RandomWalk::on_obstacle(StrategyContext& ctx) {
  turning_ = false;
  const double s = uniform(*ctx.rng, params_.hold_min, params_.hold_max);
  hold_ticks_left_ = std::max<std::int64_t>(1, std::llround(s / ctx.dt));
}

// --- spoke ---------------------------------------------------------------------

Spoke::Spoke(const StrategySetup& setup, const SpokeParams& params) : setup_(setup), params_(params) {
  if (params.n_spokes < 1) throw ConfigError("spoke: n_spokes must be >= 1");
  if (params.reach_fraction <= 0.0 || params.reach_fraction > 1.0)
    throw ConfigError("spoke: reach_fraction must be in (0, 1]");
  const double lim = 0.5 * setup.arena_side - params.wall_margin;
  if (params.return_radius >= lim) throw ConfigError("spoke: return point lies outside the arena");
  if (params.return_radius < 0.5 * setup.zone_side) throw ConfigError("spoke: return point inside the zone");
}

double Spoke::bearing(int trip) const {
  const double n = setup_.robot_count;
  return wrap_angle(2.0 * kPi * (setup_.robot_id + trip * n * params_.gamma) / params_.n_spokes);
}

Vec2 Spoke::endpoint(int trip) const {
  const double half = 0.5 * setup_.arena_side;
  const double lim = half - params_.wall_margin;
  const Vec2 p = unit(bearing(trip)) * (params_.reach_fraction * half * std::sqrt(2.0));
  return {std::clamp(p.x, -lim, lim), std::clamp(p.y, -lim, lim)};
}

// The return leg aims at the base of the next spoke so it crosses unsearched ground.
Vec2 Spoke::return_point(int trip) const { return unit(bearing(trip + 1)) * params_.return_radius; }

BehaviorCommand Spoke::propose(StrategyContext& ctx) {
  const Pose est = ctx.global_pose();
  for (int guard = 0; guard < 2; ++guard) {
    const Vec2 goal = outbound_ ? endpoint(trip_) : return_point(trip_);
    const NavResult nav = navigate_to(goal, est, ctx.nav);
    if (!nav.reached) return nav.command;
    if (outbound_) {
      outbound_ = false;
    } else {
      outbound_ = true;
      ++trip_;
    }
  }
  return navigate_to(outbound_ ? endpoint(trip_) : return_point(trip_), est, ctx.nav).command;
}

// --- lawnmower -----------------------------------------------------------------

Stripe lawnmower_stripe(double arena_side, int count, int index) {
  const double half = 0.5 * arena_side;
  const double w = arena_side / count;
  Stripe s{-half + index * w, -half + (index + 1) * w};
  if (index == count - 1) s.x_max = half;
  return s;
}

std::vector<Vec2> plan_lawnmower(double arena_side, int count, int index, double spacing, double wall_margin) {
  if (count < 1 || index < 0 || index >= count) throw ConfigError("lawnmower: bad stripe index");
  if (!(spacing > 0.0)) throw ConfigError("lawnmower: spacing must be positive");
  const double half = 0.5 * arena_side;
  if (wall_margin >= half) throw ConfigError("lawnmower: wall margin leaves no room");
  const Stripe s = lawnmower_stripe(arena_side, count, index);
  const double width = s.x_max - s.x_min;
  const int tracks = std::max(1, static_cast<int>(std::ceil(width / spacing - 1e-9)));
  const double gap = width / tracks;
  const double y_lo = -half + wall_margin;
  const double y_hi = half - wall_margin;
  std::vector<Vec2> out;
  out.reserve(2 * tracks);
  for (int j = 0; j < tracks; ++j) {
    const double x = s.x_min + (j + 0.5) * gap;
    if (j % 2 == 0) {
      out.push_back({x, y_lo});
      out.push_back({x, y_hi});
    } else {
      out.push_back({x, y_hi});
      out.push_back({x, y_lo});
    }
  }
  return out;
}

Lawnmower::Lawnmower(const StrategySetup& setup, const LawnmowerParams& params)
    : spacing_(params.spacing > 0.0 ? params.spacing : 2.0 * setup.camera_range * params.overlap) {
  if (spacing_ > 2.0 * setup.camera_range)
    throw ConfigError("lawnmower: track spacing exceeds twice the camera range");
  waypoints_ = plan_lawnmower(setup.arena_side, setup.robot_count, setup.robot_id, spacing_, params.wall_margin);
}

BehaviorCommand Lawnmower::propose(StrategyContext& ctx) {
  const Pose est = ctx.global_pose();
  NavResult nav = navigate_to(waypoints_[next_], est, ctx.nav);
  if (nav.reached) {
    next_ = (next_ + 1) % waypoints_.size();
    nav = navigate_to(waypoints_[next_], est, ctx.nav);
  }
  return nav.command;
}

// --- explore / exploit ---------------------------------------------------------

int exploiter_count(double rho, int robot_count) {
  return std::clamp(static_cast<int>(std::floor(rho * robot_count + 0.5)), 0, robot_count);
}

ExploreExploit::ExploreExploit(const StrategySetup& setup, const ExploreExploitParams& params,
                               std::unique_ptr<SearchStrategy> base)
    : setup_(setup),
      params_(params),
      base_(std::move(base)),
      exploiter_(setup.robot_id < exploiter_count(params.rho, setup.robot_count)) {
  if (params.rho < 0.0 || params.rho > 1.0) throw ConfigError("explore_exploit: rho must be in [0, 1]");
  if (params.site_threshold < 0) throw ConfigError("explore_exploit: site_threshold must be >= 0");
  if (params.spiral_pitch <= 0.0 || params.spiral_pitch > 2.0 * setup.camera_range)
    throw ConfigError("explore_exploit: spiral pitch must be in (0, 2 * camera range]");
  if (!base_) throw ConfigError("explore_exploit: missing base strategy");
}

BehaviorCommand ExploreExploit::propose(StrategyContext& ctx) {
  if (!exploiter_ || ctx.blackboard == nullptr) return base_->propose(ctx);
  const auto site = ctx.blackboard->freshest();
  if (!site) {
    site_id_.reset();
    spiraling_ = false;
    return base_->propose(ctx);
  }
  if (site_id_ != site->id) {
    site_id_ = site->id;
    spiraling_ = false;
  }
  const Pose est = ctx.global_pose();
  if (!spiraling_) {
    const NavResult nav = navigate_to(site->position, est, ctx.nav);
    if (!nav.reached) return nav.command;
    spiraling_ = true;
    spiral_angle_ = 0.0;
  }
  NavParams tight = ctx.nav;
  tight.goal_tolerance = 0.25;
  const double half = 0.5 * setup_.arena_side - 0.5;
  for (int guard = 0; guard < 64; ++guard) {
    const double r = 0.3 + params_.spiral_pitch * spiral_angle_ / (2.0 * kPi);
    if (r > params_.spiral_max_radius) {
      spiral_angle_ = 0.0;
      continue;
    }
    Vec2 goal = site->position + unit(spiral_angle_) * r;
    goal = {std::clamp(goal.x, -half, half), std::clamp(goal.y, -half, half)};
    const NavResult nav = navigate_to(goal, est, tight);
    if (!nav.reached) return nav.command;
    spiral_angle_ += std::min(1.0, 0.5 / r);
  }
  return base_->propose(ctx);
}

void ExploreExploit::on_grasp(StrategyContext& ctx, const GraspReport& report) {
  if (ctx.blackboard != nullptr && report.other_cubes_in_view >= params_.site_threshold)
    ctx.blackboard->post(report.cube_estimate, ctx.tick);
  base_->on_grasp(ctx, report);
}

void ExploreExploit::on_drop(StrategyContext& ctx) {
  spiraling_ = false;
  base_->on_drop(ctx);
}

void ExploreExploit::on_obstacle(StrategyContext& ctx) { base_->on_obstacle(ctx); }

// --- factory -------------------------------------------------------------------

namespace {

class ParamReader {
 public:
  ParamReader(std::string_view strategy, const StrategyParams& params) : strategy_(strategy), params_(params) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  StrategyParams rest() const {
    StrategyParams out;
    for (const auto& [k, v] : params_)
      if (!used_.count(k)) out.emplace(k, v);
    return out;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : params_)
      if (!used_.count(k)) throw ConfigError(std::string(strategy_) + ": unknown parameter '" + k + "'");
  }

 private:
  std::string_view strategy_;
  const StrategyParams& params_;
  std::set<std::string> used_;
};

}  // namespace

std::int64_t stale_ticks_for(const StrategySpec& spec, double dt) {
  double seconds = ExploreExploitParams{}.stale_seconds;
  if (auto it = spec.params.find("stale_seconds"); it != spec.params.end()) seconds = it->second;
  return std::max<std::int64_t>(1, std::llround(seconds / dt));
}

std::unique_ptr<SearchStrategy> make_strategy(const StrategySpec& spec, const StrategySetup& setup) {
  ParamReader p(spec.name, spec.params);
  if (spec.name == "random_walk") {
    RandomWalkParams rw;
    rw.sigma_turn = p.get("sigma_turn", rw.sigma_turn);
    rw.hold_min = p.get("hold_min", rw.hold_min);
    rw.hold_max = p.get("hold_max", rw.hold_max);
    p.reject_unknown();
    return std::make_unique<RandomWalk>(rw);
  }
  if (spec.name == "spoke") {
    SpokeParams sp;
    sp.n_spokes = static_cast<int>(p.get("n_spokes", sp.n_spokes));
    sp.gamma = p.get("gamma", sp.gamma);
    sp.reach_fraction = p.get("reach_fraction", sp.reach_fraction);
    sp.return_radius = p.get("return_radius", sp.return_radius);
    sp.wall_margin = p.get("wall_margin", sp.wall_margin);
    p.reject_unknown();
    return std::make_unique<Spoke>(setup, sp);
  }
  if (spec.name == "lawnmower") {
    LawnmowerParams lp;
    lp.overlap = p.get("overlap", lp.overlap);
    lp.spacing = p.get("spacing", lp.spacing);
    lp.wall_margin = p.get("wall_margin", lp.wall_margin);
    p.reject_unknown();
    return std::make_unique<Lawnmower>(setup, lp);
  }
  if (spec.name == "explore_exploit") {
    if (spec.base == "explore_exploit") throw ConfigError("explore_exploit cannot wrap itself");
    ExploreExploitParams ep;
    ep.rho = p.get("rho", ep.rho);
    ep.site_threshold = static_cast<int>(p.get("site_threshold", ep.site_threshold));
    ep.stale_seconds = p.get("stale_seconds", ep.stale_seconds);
    ep.spiral_pitch = p.get("spiral_pitch", ep.spiral_pitch);
    ep.spiral_max_radius = p.get("spiral_max_radius", ep.spiral_max_radius);
    StrategySpec base_spec{spec.base, p.rest(), ""};
    return std::make_unique<ExploreExploit>(setup, ep, make_strategy(base_spec, setup));
  }
  throw ConfigError("unknown strategy '" + spec.name + "'");
}

std::vector<std::string> strategy_names() { return {"random_walk", "spoke", "lawnmower", "explore_exploit"}; }

}  // namespace swarm
