#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarm/command.hpp"
#include "swarm/localization.hpp"
#include "swarm/navigation.hpp"
#include "swarm/random.hpp"

namespace swarm {

/// A found-site announcement on the shared blackboard.
struct Site {
  int id = 0;
  Vec2 position;
  std::int64_t posted_tick = 0;
  std::int64_t refreshed_tick = 0;
};

struct BlackboardParams {
  double merge_radius = 1.0;      // posts closer than this refresh an existing site
  std::int64_t stale_ticks = 1200;
  std::int64_t latency_ticks = 0;
  double loss_probability = 0.0;
};

/// Zero-latency shared memory of cluster sites. Posts are buffered and applied
/// between ticks by commit(), so every robot sees the same board within a tick.
class Blackboard {
 public:
  explicit Blackboard(const BlackboardParams& params = {}, Rng rng = Rng(0));

  void post(Vec2 position, std::int64_t tick);
  void commit(std::int64_t tick);

  std::optional<Site> freshest() const;
  const std::vector<Site>& sites() const { return sites_; }
  const BlackboardParams& params() const { return params_; }

 private:
  struct Pending {
    Vec2 position;
    std::int64_t posted_tick;
    std::int64_t deliver_tick;
  };
  BlackboardParams params_;
  Rng rng_;
  std::vector<Pending> pending_;
  std::vector<Site> sites_;
  int next_id_ = 0;
};

/// Everything a strategy may read. Holds no ground truth.
struct StrategyContext {
  int robot_id = 0;
  int robot_count = 1;
  double arena_side = 15.0;
  double zone_side = 1.0;
  double dt = 0.1;
  std::int64_t tick = 0;
  const PoseEstimatePair* estimates = nullptr;
  Rng* rng = nullptr;
  Blackboard* blackboard = nullptr;
  NavParams nav;

  Pose global_pose() const { return estimates->global_filter.pose(); }
  Pose odom_pose() const { return estimates->odom_filter.pose(); }
};

/// Reported to the strategy after a successful grasp.
struct GraspReport {
  Vec2 cube_estimate;
  int other_cubes_in_view = 0;
};

class SearchStrategy {
 public:
  virtual ~SearchStrategy() = default;
  virtual std::string_view name() const = 0;
  virtual BehaviorCommand propose(StrategyContext& ctx) = 0;
  virtual void on_grasp(StrategyContext&, const GraspReport&) {}
  virtual void on_drop(StrategyContext&) {}
  /// Called when an avoidance maneuver that interrupted the search ends.
  virtual void on_obstacle(StrategyContext&) {}
};

using StrategyParams = std::map<std::string, double>;

/// Static facts known when a strategy is instantiated for one robot.
struct StrategySetup {
  int robot_id = 0;
  int robot_count = 1;
  double arena_side = 15.0;
  double zone_side = 1.0;
  double camera_range = 1.0;
  double dt = 0.1;
  NavParams nav;
};

// --- random walk -----------------------------------------------------------

struct RandomWalkParams {
  double sigma_turn = 1.0;  // rad
  double hold_min = 5.0;    // s
  double hold_max = 15.0;   // s
};

/// Correlated random walk: drive straight for a seeded duration, then turn by N(0, sigma_turn).
class RandomWalk final : public SearchStrategy {
 public:
  explicit RandomWalk(const RandomWalkParams& params = {});
  std::string_view name() const override { return "random_walk"; }
  BehaviorCommand propose(StrategyContext& ctx) override;
  void on_obstacle(StrategyContext& ctx) override;

  double last_turn() const { return last_turn_; }
  std::int64_t turns_drawn() const { return turns_drawn_; }

 private:
  RandomWalkParams params_;
  bool turning_ = false;
  std::int64_t hold_ticks_left_ = -1;
  double target_heading_ = 0.0;
  double last_turn_ = 0.0;
  std::int64_t turns_drawn_ = 0;
};

// --- spoke -----------------------------------------------------------------

struct SpokeParams {
  int n_spokes = 8;
  double gamma = 0.618;
  double reach_fraction = 0.9;  // of the arena half-diagonal, then clamped inside the walls
  double return_radius = 2.5;   // zone-vicinity turnaround, clear of the crowded nest
  double wall_margin = 0.5;
};

/// Out-and-back radial search; spoke bearings advance by a golden-ratio stride between trips.
class Spoke final : public SearchStrategy {
 public:
  Spoke(const StrategySetup& setup, const SpokeParams& params = {});
  std::string_view name() const override { return "spoke"; }
  BehaviorCommand propose(StrategyContext& ctx) override;

  double bearing(int trip) const;
  Vec2 endpoint(int trip) const;
  Vec2 return_point(int trip) const;
  int trip() const { return trip_; }
  bool outbound() const { return outbound_; }

 private:
  StrategySetup setup_;
  SpokeParams params_;
  int trip_ = 0;
  bool outbound_ = true;
};

// --- lawnmower -------------------------------------------------------------

struct LawnmowerParams {
  double overlap = 0.75;     // track spacing = 2 * camera_range * overlap
  double spacing = 0.0;      // explicit spacing; 0 derives it from overlap
  double wall_margin = 0.75;
};

struct Stripe {
  double x_min = 0.0;
  double x_max = 0.0;
};

/// Vertical stripe owned by robot `index` of `count`.
Stripe lawnmower_stripe(double arena_side, int count, int index);

/// Boustrophedon waypoints over one stripe, tracks alternating direction.
std::vector<Vec2> plan_lawnmower(double arena_side, int count, int index, double spacing, double wall_margin);

class Lawnmower final : public SearchStrategy {
 public:
  Lawnmower(const StrategySetup& setup, const LawnmowerParams& params = {});
  std::string_view name() const override { return "lawnmower"; }
  BehaviorCommand propose(StrategyContext& ctx) override;

  const std::vector<Vec2>& waypoints() const { return waypoints_; }
  std::size_t next_index() const { return next_; }
  double spacing() const { return spacing_; }

 private:
  double spacing_;
  std::vector<Vec2> waypoints_;
  std::size_t next_ = 0;
};

// --- explore / exploit -----------------------------------------------------

struct ExploreExploitParams {
  double rho = 0.5;            // fraction of robots (lowest ids) that exploit
  int site_threshold = 2;      // other cubes in view at grasp time
  double stale_seconds = 120.0;
  double spiral_pitch = 0.8;   // m per revolution
  double spiral_max_radius = 3.0;
};

/// Number of exploiting robots for a swarm of `robot_count`.
int exploiter_count(double rho, int robot_count);

/// Wraps a base strategy. Exploiters return to the freshest posted site and
/// spiral outward from it; everyone else keeps running the base strategy.
class ExploreExploit final : public SearchStrategy {
 public:
  ExploreExploit(const StrategySetup& setup, const ExploreExploitParams& params,
                 std::unique_ptr<SearchStrategy> base);
  std::string_view name() const override { return "explore_exploit"; }
  BehaviorCommand propose(StrategyContext& ctx) override;
  void on_grasp(StrategyContext& ctx, const GraspReport& report) override;
  void on_drop(StrategyContext& ctx) override;
  void on_obstacle(StrategyContext& ctx) override;

  bool exploiter() const { return exploiter_; }
  SearchStrategy& base() { return *base_; }

 private:
  StrategySetup setup_;
  ExploreExploitParams params_;
  std::unique_ptr<SearchStrategy> base_;
  bool exploiter_;
  std::optional<int> site_id_;
  bool spiraling_ = false;
  double spiral_angle_ = 0.0;
};

// --- factory ---------------------------------------------------------------

struct StrategySpec {
  std::string name = "random_walk";
  StrategyParams params;
  std::string base = "lawnmower";  // used by explore_exploit
};

/// Blackboard staleness in ticks implied by a spec (explore_exploit only).
std::int64_t stale_ticks_for(const StrategySpec& spec, double dt);

/// Builds one robot's strategy. Unknown names or parameter keys raise ConfigError.
std::unique_ptr<SearchStrategy> make_strategy(const StrategySpec& spec, const StrategySetup& setup);

std::vector<std::string> strategy_names();

}  // namespace swarm
