#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "swarm/errors.hpp"
#include "swarm/strategy.hpp"

using namespace swarm;

namespace {

struct Ctx {
  PoseEstimatePair est;
  Rng rng;
  Blackboard board;
  StrategyContext ctx;

  explicit Ctx(int id = 0, int n = 1, double side = 15.0, std::uint64_t seed = 1)
      : rng(make_stream(seed, StreamPurpose::kStrategy, id)) {
    ctx.robot_id = id;
    ctx.robot_count = n;
    ctx.arena_side = side;
    ctx.estimates = &est;
    ctx.rng = &rng;
    ctx.blackboard = &board;
    set_pose({0, 0, 0});
  }
  void set_pose(Pose p) {
    for (auto* f : {&est.odom_filter, &est.global_filter}) f->mean << p.x, p.y, p.theta;
  }
  // Integrates a command kinematically so the strategy sees its own motion.
  void apply(const BehaviorCommand& c) {
    Pose p = est.global_filter.pose();
    p.theta = wrap_angle(p.theta + c.omega * ctx.dt);
    p.x += c.v * std::cos(p.theta) * ctx.dt;
    p.y += c.v * std::sin(p.theta) * ctx.dt;
    set_pose(p);
    ++ctx.tick;
  }
};

StrategySetup setup_for(int id, int n, double side = 15.0) { return {id, n, side, 1.0, 1.0, 0.1, {}}; }

// Distance from p to segment ab.
double seg_dist(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.dot(ab), 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

}  // namespace

TEST_CASE("random walk with zero turn spread goes straight") {
  RandomWalk rw({0.0, 5.0, 15.0});
  Ctx c;
  for (int i = 0; i < 2000; ++i) {
    const auto cmd = rw.propose(c.ctx);
    REQUIRE(cmd.omega == 0.0);
    REQUIRE(cmd.v == 0.2);
    c.apply(cmd);
  }
  CHECK(rw.turns_drawn() > 0);
  CHECK(c.est.global_filter.mean(2) == 0.0);
}

TEST_CASE("random walk turn angles are centered") {
  RandomWalk rw({1.0, 0.1, 0.1});
  Ctx c(0, 1, 1e6);
  double sum = 0;
  std::int64_t seen = 0;
  const std::int64_t n = 10000;
  while (seen < n) {
    c.apply(rw.propose(c.ctx));
    if (rw.turns_drawn() > seen) {
      sum += rw.last_turn();
      seen = rw.turns_drawn();
    }
  }
  // Sample mean of n N(0, 1) draws: within 3 / sqrt(n) with probability 0.997.
  CHECK(std::abs(sum / n) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("random walk is deterministic in its stream") {
  auto run = [] {
    RandomWalk rw;
    Ctx c(0, 1, 15.0, 77);
    std::vector<double> out;
    for (int i = 0; i < 3000; ++i) {
      const auto cmd = rw.propose(c.ctx);
      out.push_back(cmd.v);
      out.push_back(cmd.omega);
      c.apply(cmd);
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("spoke geometry") {
  Spoke s0(setup_for(0, 3), {});
  CHECK(s0.bearing(0) == 0.0);
  SUBCASE("consecutive trips step by 2 pi gamma n / n_spokes") {
    for (int id = 0; id < 3; ++id) {
      Spoke s(setup_for(id, 3), {});
      const double step = 2.0 * kPi * 0.618 * 3 / 8;
      for (int k = 0; k < 50; ++k)
        CHECK(std::abs(wrap_angle(s.bearing(k + 1) - s.bearing(k) - step)) < 1e-9);
    }
  }
  SUBCASE("endpoints stay inside the walls") {
    for (double side : {15.0, 22.0, 4.0}) {
      for (int n = 1; n <= 6; ++n) {
        for (int id = 0; id < n; ++id) {
          SpokeParams sp;
          if (side < 5.0) sp.return_radius = 1.0;
          Spoke s(setup_for(id, n, side), sp);
          for (int k = 0; k < 100; ++k) {
            const Vec2 e = s.endpoint(k);
            REQUIRE(std::abs(e.x) < 0.5 * side);
            REQUIRE(std::abs(e.y) < 0.5 * side);
          }
        }
      }
    }
  }
  SUBCASE("a return radius beyond the walls is rejected") {
    CHECK_THROWS_AS(Spoke(setup_for(0, 3, 4.0), {}), ConfigError);
  }
  SUBCASE("out and back advances the trip") {
    Spoke s(setup_for(0, 1), {});
    Ctx c;
    for (int i = 0; i < 5000 && s.trip() < 2; ++i) c.apply(s.propose(c.ctx));
    CHECK(s.trip() == 2);
  }
}

TEST_CASE("lawnmower plan on a 4 m arena with 1.5 m spacing") {
  const auto wp = plan_lawnmower(4.0, 1, 0, 1.5, 0.75);
  // ceil(4 / 1.5) = 3 tracks with a 4/3 m gap, two waypoints each, alternating direction.
  REQUIRE(wp.size() == 6);
  const double g = 4.0 / 3.0;
  const std::vector<Vec2> expected{{-2 + 0.5 * g, -1.25}, {-2 + 0.5 * g, 1.25}, {-2 + 1.5 * g, 1.25},
                                   {-2 + 1.5 * g, -1.25}, {-2 + 2.5 * g, -1.25}, {-2 + 2.5 * g, 1.25}};
  for (std::size_t i = 0; i < wp.size(); ++i) {
    CHECK(wp[i].x == doctest::Approx(expected[i].x));
    CHECK(wp[i].y == doctest::Approx(expected[i].y));
  }
}

TEST_CASE("lawnmower stripes partition the arena") {
  for (double side : {15.0, 22.0}) {
    for (int n = 1; n <= 6; ++n) {
      double cursor = -0.5 * side;
      for (int i = 0; i < n; ++i) {
        const auto s = lawnmower_stripe(side, n, i);
        CHECK(s.x_min == doctest::Approx(cursor));
        CHECK(s.x_max > s.x_min);
        cursor = s.x_max;
      }
      CHECK(cursor == 0.5 * side);
    }
  }
}

TEST_CASE("lawnmower paths cover every 1 m cell") {
  for (double side : {4.0, 15.0, 22.0}) {
    for (int n = 1; n <= 6; ++n) {
      std::vector<std::vector<Vec2>> paths;
      for (int i = 0; i < n; ++i) paths.push_back(Lawnmower(setup_for(i, n, side), {}).waypoints());
      int gaps = 0;
      const int cells = static_cast<int>(side);
      for (int cx = 0; cx < cells; ++cx) {
        for (int cy = 0; cy < cells; ++cy) {
          const Vec2 p{-0.5 * side + cx + 0.5, -0.5 * side + cy + 0.5};
          double best = INFINITY;
          for (const auto& w : paths) {
            // The closed loop includes the wrap-around leg back to the first waypoint.
            for (std::size_t k = 0; k < w.size(); ++k) best = std::min(best, seg_dist(p, w[k], w[(k + 1) % w.size()]));
          }
          gaps += best > 1.0;
        }
      }
      CHECK_MESSAGE(gaps == 0, "side " << side << " robots " << n);
    }
  }
}

TEST_CASE("lawnmower rejects spacing wider than the camera sweep") {
  StrategySpec spec{"lawnmower", {{"spacing", 2.5}}, ""};
  CHECK_THROWS_AS(make_strategy(spec, setup_for(0, 3)), ConfigError);
}

TEST_CASE("blackboard") {
  Blackboard b({1.0, 100, 0, 0.0});
  b.post({3, 3}, 10);
  CHECK_FALSE(b.freshest());  // not visible until committed
  b.commit(10);
  REQUIRE(b.freshest());
  CHECK(b.freshest()->position == Vec2{3, 3});
  SUBCASE("a nearby post refreshes the site") {
    b.post({3.5, 3}, 50);
    b.commit(50);
    CHECK(b.sites().size() == 1);
    b.commit(149);
    CHECK(b.sites().size() == 1);
    b.commit(150);
    CHECK(b.sites().empty());
  }
  SUBCASE("unrefreshed sites expire") {
    b.commit(109);
    CHECK(b.sites().size() == 1);
    b.commit(110);
    CHECK(b.sites().empty());
  }
  SUBCASE("a far post is a new site and becomes the freshest") {
    b.post({-4, 1}, 20);
    b.commit(20);
    CHECK(b.sites().size() == 2);
    CHECK(b.freshest()->position == Vec2{-4, 1});
  }
}

TEST_CASE("blackboard latency and loss") {
  Blackboard late({1.0, 1000, 5, 0.0});
  late.post({1, 1}, 0);
  late.commit(4);
  CHECK(late.sites().empty());
  late.commit(5);
  CHECK(late.sites().size() == 1);

  Blackboard lossy({1.0, 1000, 0, 1.0});
  lossy.post({1, 1}, 0);
  lossy.commit(0);
  CHECK(lossy.sites().empty());
}

TEST_CASE("explore-exploit roles") {
  CHECK(exploiter_count(0.5, 3) == 2);
  CHECK(exploiter_count(0.5, 4) == 2);
  CHECK(exploiter_count(0.0, 6) == 0);
  CHECK(exploiter_count(1.0, 6) == 6);
}

TEST_CASE("explore-exploit with rho zero is the base strategy") {
  for (int id = 0; id < 3; ++id) {
    auto wrapped = make_strategy({"explore_exploit", {{"rho", 0.0}}, "random_walk"}, setup_for(id, 3));
    auto plain = make_strategy({"random_walk", {}, ""}, setup_for(id, 3));
    Ctx a(id, 3, 15.0, 5), b(id, 3, 15.0, 5);
    a.board.post({4, 4}, 0);
    a.board.commit(0);
    for (int i = 0; i < 3000; ++i) {
      const auto ca = wrapped->propose(a.ctx);
      const auto cb = plain->propose(b.ctx);
      REQUIRE(ca.v == cb.v);
      REQUIRE(ca.omega == cb.omega);
      if (i % 500 == 0) {
        wrapped->on_grasp(a.ctx, {{1, 1}, 5});
        plain->on_grasp(b.ctx, {{1, 1}, 5});
      }
      a.apply(ca);
      b.apply(cb);
    }
  }
}

TEST_CASE("explore-exploit posts dense sites and exploiters head there") {
  auto s = make_strategy({"explore_exploit", {}, "random_walk"}, setup_for(0, 3));
  Ctx c(0, 3);
  s->on_grasp(c.ctx, {{4, 4}, 1});
  c.board.commit(0);
  CHECK(c.board.sites().empty());
  s->on_grasp(c.ctx, {{4, 4}, 2});
  c.board.commit(0);
  REQUIRE(c.board.sites().size() == 1);
  // Facing away from the site, the exploiter turns toward it.
  c.set_pose({0, 0, kPi});
  const auto cmd = s->propose(c.ctx);
  CHECK(cmd.v == 0.0);
  CHECK(std::abs(cmd.omega) == 1.0);
}

TEST_CASE("strategy factory validation") {
  CHECK_THROWS_AS(make_strategy({"snail_shell", {}, ""}, setup_for(0, 3)), ConfigError);
  CHECK_THROWS_AS(make_strategy({"random_walk", {{"sigma", 1.0}}, ""}, setup_for(0, 3)), ConfigError);
  CHECK_THROWS_AS(make_strategy({"explore_exploit", {{"bogus", 1.0}}, "lawnmower"}, setup_for(0, 3)), ConfigError);
  CHECK_THROWS_AS(make_strategy({"spoke", {{"return_radius", 9.0}}, ""}, setup_for(0, 3)), ConfigError);
  CHECK_NOTHROW(make_strategy({"explore_exploit", {{"overlap", 0.5}}, "lawnmower"}, setup_for(0, 3)));
  std::set<std::string> names;
  for (const auto& n : strategy_names()) names.insert(n);
  CHECK(names == std::set<std::string>{"random_walk", "spoke", "lawnmower", "explore_exploit"});
}
