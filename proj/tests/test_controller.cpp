#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>

#include "helpers.hpp"
#include "swarm/controller.hpp"
#include "swarm/navigation.hpp"

using namespace swarm;
using namespace swarm::test;

namespace {

// Strategy that always proposes the same command.
class Fixed final : public SearchStrategy {
 public:
  explicit Fixed(BehaviorCommand c) : c_(c) {}
  std::string_view name() const override { return "fixed"; }
  BehaviorCommand propose(StrategyContext&) override {
    ++calls;
    return c_;
  }
  int calls = 0;

 private:
  BehaviorCommand c_;
};

struct Harness {
  PoseEstimatePair est;
  Rng rng{0};
  StrategyContext ctx;
  Fixed* strategy = nullptr;
  std::unique_ptr<Controller> ctrl;

  explicit Harness(Pose p = {3, 3, 0}, BehaviorCommand proposal = {0.13, 0.21, GripperAction::kNone}) {
    set_pose(p);
    auto s = std::make_unique<Fixed>(proposal);
    strategy = s.get();
    ctrl = std::make_unique<Controller>(ControllerParams{}, std::move(s));
    ctx.estimates = &est;
    ctx.rng = &rng;
  }
  void set_pose(Pose p) {
    for (auto* f : {&est.odom_filter, &est.global_filter}) {
      f->mean << p.x, p.y, p.theta;
      f->covariance = Matrix3::Identity() * 1e-4;
    }
  }
  static SensorFrame clear_frame(std::int64_t tick = 1) {
    SensorFrame f;
    f.tick = tick;
    for (int i = 0; i < 3; ++i) f.ultrasound[i] = {i, 3.0};
    return f;
  }
  BehaviorCommand tick(const SensorFrame& f) {
    ctx.tick = f.tick;
    return ctrl->tick(f, est, ctx);
  }
};

TagDetection cube_at(double bearing, double distance, int id = 0) {
  return {TagKind::kResourceCube, id, bearing, distance};
}

}  // namespace

TEST_CASE("obstacle ahead preempts search") {
  Harness h;
  auto f = Harness::clear_frame();
  f.ultrasound[1].range = 0.25;
  const auto c = h.tick(f);
  CHECK(h.ctrl->state().mode == Mode::kAvoiding);
  CHECK(h.ctrl->state().resume_mode == Mode::kSearching);
  CHECK(c.omega != 0.0);
  CHECK(h.strategy->calls == 0);
}

TEST_CASE("avoidance turns away from the nearest reading, ties break right") {
  auto turn_for = [](double l, double c, double r) {
    Harness h;
    auto f = Harness::clear_frame();
    f.ultrasound[0].range = l;
    f.ultrasound[1].range = c;
    f.ultrasound[2].range = r;
    return h.tick(f).omega;
  };
  CHECK(turn_for(0.2, 1.0, 1.0) < 0);  // obstacle left -> turn right
  CHECK(turn_for(1.0, 1.0, 0.2) > 0);
  CHECK(turn_for(1.0, 0.2, 1.0) < 0);  // dead ahead, tie -> right
  CHECK(turn_for(2.0, 0.2, 1.0) > 0);  // dead ahead, more room left
}

TEST_CASE("avoidance always wins, whatever else is in view") {
  Rng rng = make_stream(17, StreamPurpose::kStrategy, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    Harness h;
    auto f = Harness::clear_frame(trial + 1);
    f.holding = bernoulli(rng, 0.5);
    for (int i = 0; i < 3; ++i) f.ultrasound[i].range = uniform(rng, 0.01, 3.0);
    f.ultrasound[uniform(rng, 0, 1) < 0.5 ? 0 : 2].range = uniform(rng, 0.01, 0.399);
    f.detections.push_back(cube_at(uniform(rng, -0.5, 0.5), uniform(rng, 0.1, 1.0)));
    const auto c = h.tick(f);
    REQUIRE(h.ctrl->state().mode == Mode::kAvoiding);
    REQUIRE(c.gripper == GripperAction::kNone);
    REQUIRE(c.v == doctest::Approx(h.ctrl->params().creep_speed));
    REQUIRE(std::abs(c.omega) == doctest::Approx(h.ctrl->params().nav.omega_max));
  }
}

TEST_CASE("plain search delegates to the strategy verbatim") {
  Harness h({3, 3, 0}, {0.13, 0.21, GripperAction::kNone});
  const auto c = h.tick(Harness::clear_frame());
  CHECK(c.v == 0.13);
  CHECK(c.omega == 0.21);
  CHECK(c.gripper == GripperAction::kNone);
  CHECK(h.strategy->calls == 1);
}

TEST_CASE("approach and grasp") {
  Harness h;
  SUBCASE("outside the envelope steers toward the cube") {
    const auto c = h.ctrl->approach_and_grasp(cube_at(0.4, 0.8));
    CHECK(c.omega > 0);
    CHECK(c.gripper == GripperAction::kNone);
    CHECK(h.ctrl->state().mode == Mode::kApproaching);
  }
  SUBCASE("inside the envelope grasps") {
    const auto c = h.ctrl->approach_and_grasp(cube_at(0.0, 0.15 + 0.05));
    CHECK(c.gripper == GripperAction::kGrasp);
    CHECK(h.ctrl->state().mode == Mode::kGrasping);
  }
  SUBCASE("zone markers are rejected") {
    CHECK_THROWS_AS(h.ctrl->approach_and_grasp({TagKind::kZoneBoundary, 3, 0.0, 0.2}), std::invalid_argument);
  }
}

TEST_CASE("failed grasp goes back to approaching") {
  Harness h;
  auto world = make_world();
  world.body.grasp_probability = 0.5;
  add_robot(world, {3, 3, 0});
  Rng grasp = make_stream(3, StreamPurpose::kGrasp, 0);
  int failures = 0, successes = 0;
  for (int trial = 0; trial < 40 && (failures == 0 || successes == 0); ++trial) {
    world.cubes.clear();
    world.robots[0].carried_cube.reset();
    add_cube(world, {3.0 + 0.2, 3.0});
    Harness g;
    auto f = Harness::clear_frame();
    f.detections.push_back(cube_at(0.0, 0.2));
    REQUIRE(g.tick(f).gripper == GripperAction::kGrasp);
    const bool ok = attempt_pickup(world, 0, grasp);
    g.ctrl->on_grasp_result(ok, g.ctx);
    if (ok) {
      ++successes;
      CHECK(g.ctrl->state().mode == Mode::kTransporting);
    } else {
      ++failures;
      CHECK(g.ctrl->state().mode == Mode::kApproaching);
    }
  }
  CHECK(failures > 0);
  CHECK(successes > 0);
}

TEST_CASE("carrying with a zone marker ahead drives toward it") {
  // Robot at (-0.8, 0) facing +x; marker 14 sits at (-0.5, 0), 0.3 m ahead.
  Harness h({-0.8, 0.0, 0.0});
  auto f = Harness::clear_frame();
  f.holding = true;
  f.detections.push_back({TagKind::kZoneBoundary, 14, 0.0, 0.3});
  const auto c = h.tick(f);
  CHECK(h.ctrl->state().mode == Mode::kTransporting);
  CHECK(c.v > 0);
  CHECK(std::abs(c.omega) < 1e-9);
  CHECK(c.gripper == GripperAction::kNone);

  SUBCASE("releases once the gripper point is inside") {
    h.set_pose({-0.2, 0.0, 0.0});
    auto g = Harness::clear_frame(2);
    g.holding = true;
    g.detections.push_back({TagKind::kZoneBoundary, 6, 0.0, 0.7});  // marker 6 at (0.5, 0)
    CHECK(h.tick(g).gripper == GripperAction::kRelease);
  }
}

TEST_CASE("transport mode is coherent with the gripper") {
  Harness h;
  auto f = Harness::clear_frame();
  f.holding = true;
  h.tick(f);
  CHECK(h.ctrl->transporting());
  f.tick = 2;
  f.holding = false;
  h.tick(f);
  CHECK_FALSE(h.ctrl->transporting());
}

TEST_CASE("emitted commands respect the actuator limits") {
  Rng rng = make_stream(23, StreamPurpose::kStrategy, 0);
  Harness h({0, 0, 0}, {0.2, 1.0, GripperAction::kNone});
  for (int t = 1; t < 5000; ++t) {
    auto f = Harness::clear_frame(t);
    for (int i = 0; i < 3; ++i) f.ultrasound[i].range = uniform(rng, 0.3, 3.0);
    if (bernoulli(rng, 0.3)) f.detections.push_back(cube_at(uniform(rng, -0.5, 0.5), uniform(rng, 0.15, 1.0)));
    if (bernoulli(rng, 0.1)) f.holding = !h.ctrl->transporting();
    else f.holding = h.ctrl->transporting();
    h.set_pose({uniform(rng, -7, 7), uniform(rng, -7, 7), uniform(rng, -kPi, kPi)});
    const auto c = h.tick(f);
    REQUIRE(c.v >= 0.0);
    REQUIRE(c.v <= 0.2);
    REQUIRE(std::abs(c.omega) <= 1.0);
  }
}

TEST_CASE("navigate_to") {
  EkfState e;
  e.mean << 0, 0, 0;
  SUBCASE("goal straight ahead") {
    const auto r = navigate_to({5, 0}, e.pose(), {});
    CHECK(r.command.v == 0.2);
    CHECK(r.command.omega == doctest::Approx(0.0));
    CHECK_FALSE(r.reached);
  }
  SUBCASE("goal behind") {
    const auto r = navigate_to({-5, 0.01}, e.pose(), {});
    CHECK(r.command.v == 0.0);
    CHECK(std::abs(r.command.omega) == 1.0);
  }
  SUBCASE("reached inside the tolerance") {
    CHECK(navigate_to({0.3, 0.3}, e.pose(), {}).reached);
    CHECK_FALSE(navigate_to({0.4, 0.4}, e.pose(), {}).reached);
  }
}

TEST_CASE("ten meter traverse under default noise reaches the goal") {
  int successes = 0;
  for (int run = 0; run < 100; ++run) {
    auto w = make_world(15.0);
    add_robot(w, {-5.0, 0.0, 0.0});
    const Vec2 goal{5.0, 0.0};
    NavSampler nav(NoiseParams{}, 0.1, make_stream(run, StreamPurpose::kNav, 0));
    Localizer loc(w.robots[0].pose, {});
    bool ok = false;
    for (int t = 0; t < 1200 && !ok; ++t) {
      const auto cmd = navigate_to(goal, loc.estimates().global_filter.pose(), {}).command;
      step_world(w, commands(w, cmd), 0.1);
      loc.step(nav.sample(w, 0), 0.1);
      ok = (w.robots[0].pose.position() - goal).norm() < 0.5;
    }
    successes += ok;
  }
  MESSAGE("traverse successes: " << successes << "/100");
  CHECK(successes >= 95);
}
