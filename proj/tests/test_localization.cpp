#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "swarm/errors.hpp"
#include "swarm/localization.hpp"

using namespace swarm;
using namespace swarm::test;

namespace {

EkfState make_state(double x, double y, double th, double var = 0.01) {
  EkfState s;
  s.mean << x, y, th;
  s.covariance = Matrix3::Identity() * var;
  return s;
}

double min_eigen(const Matrix3& p) {
  Eigen::SelfAdjointEigenSolver<Matrix3> es(p);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("stationary prediction adds exactly Q") {
  const auto s = make_state(1, 2, 0.3);
  const ProcessNoise q;
  const auto p = ekf_predict(s, 0.0, 0.0, 0.1, q);
  CHECK(p.mean == s.mean);
  CHECK((p.covariance - (s.covariance + q.covariance(0, 0, 0.1))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(p.covariance.trace() > s.covariance.trace());
}

TEST_CASE("straight prediction") {
  const auto p = ekf_predict(make_state(0, 0, 0), 0.2, 0.0, 0.1);
  CHECK(p.mean(0) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(p.mean(1) == doctest::Approx(0.0));
}

TEST_CASE("motion jacobian matches central differences") {
  Rng rng = make_stream(99, StreamPurpose::kNav, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vector3 m(uniform(rng, -7, 7), uniform(rng, -7, 7), uniform(rng, -3.1, 3.1));
    const double v = uniform(rng, 0, 0.2), w = uniform(rng, -1, 1), dt = 0.1;
    const Matrix3 f = motion_jacobian(m, v, w, dt);
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Vector3 a = m, b = m;
      a(j) += h;
      b(j) -= h;
      Vector3 diff = motion_model(a, v, w, dt) - motion_model(b, v, w, dt);
      diff(2) = wrap_angle(diff(2));
      for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(diff(i) / (2 * h) - f(i, j)));
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("motion model is the world integrator") {
  auto w = make_world(50.0);
  add_robot(w, {0.3, -0.2, 2.9});
  Vector3 m(0.3, -0.2, 2.9);
  Rng rng = make_stream(3, StreamPurpose::kStrategy, 0);
  for (int i = 0; i < 1000; ++i) {
    const BehaviorCommand c{uniform(rng, 0, 0.2), uniform(rng, -1, 1)};
    step_world(w, commands(w, c), 0.1);
    m = motion_model(m, c.v, c.omega, 0.1);
    REQUIRE(m(0) == w.robots[0].pose.x);
    REQUIRE(m(1) == w.robots[0].pose.y);
    REQUIRE(m(2) == w.robots[0].pose.theta);
  }
}

TEST_CASE("heading update") {
  SUBCASE("zero innovation") {
    const auto s = make_state(0, 0, 0.4);
    const auto u = ekf_update_heading(s, 0.4, 0.05);
    CHECK(u.mean(2) == doctest::Approx(0.4));
    CHECK(u.covariance(2, 2) < s.covariance(2, 2));
  }
  SUBCASE("innovation wraps across the branch cut") {
    auto s = make_state(0, 0, 3.1, 1.0);
    const auto u = ekf_update_heading(s, -3.1, 1e-3);
    // Innovation is 2*pi - 6.2 = 0.0832, so a confident update moves theta past +pi.
    const double innovation = wrap_angle(-3.1 - 3.1);
    CHECK(innovation == doctest::Approx(0.083185).epsilon(1e-5));
    CHECK(std::abs(wrap_angle(u.mean(2) - (-3.1))) < 1e-5);
    CHECK(u.mean(2) > -kPi);
    CHECK(u.mean(2) <= kPi);
  }
  SUBCASE("repeated updates converge to the measurement") {
    auto s = make_state(0, 0, 1.0, 0.5);
    for (int i = 0; i < 200; ++i) s = ekf_update_heading(s, 0.2, 0.05);
    CHECK(std::abs(s.mean(2) - 0.2) < 1e-3);
  }
}

TEST_CASE("gps update") {
  SUBCASE("fix equal to the mean") {
    const auto s = make_state(2, 3, 0);
    const auto u = ekf_update_gps(s, {2, 3}, 1.0);
    CHECK(u.mean == s.mean);
    CHECK(u.covariance(0, 0) < s.covariance(0, 0));
    CHECK(u.covariance(1, 1) < s.covariance(1, 1));
  }
  SUBCASE("uninformative prior jumps to the fix") {
    auto s = make_state(0, 0, 0, 1e12);
    const auto u = ekf_update_gps(s, {4, -1}, 1.0);
    CHECK(std::abs(u.mean(0) - 4) < 1e-6);
    CHECK(std::abs(u.mean(1) + 1) < 1e-6);
  }
}

TEST_CASE("non-PSD covariance is an invariant breach") {
  auto s = make_state(0, 0, 0);
  s.covariance(0, 0) = -1.0;
  CHECK_THROWS_AS(ekf_predict(s, 0.1, 0.0, 0.1), InvariantError);
  auto t = make_state(0, 0, 0);
  t.covariance(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(check_covariance(t.covariance), InvariantError);
}

TEST_CASE("covariance stays symmetric PSD and updates never inflate variance") {
  auto w = make_world(15.0);
  add_robot(w, {0, 0, 0});
  NoiseParams noise;
  NavSampler nav(noise, 0.1, make_stream(8, StreamPurpose::kNav, 0));
  EkfState s = make_state(0, 0, 0, 1e-4);
  Rng drive = make_stream(8, StreamPurpose::kStrategy, 0);
  for (int i = 0; i < 3000; ++i) {
    step_world(w, commands(w, {uniform(drive, 0, 0.2), uniform(drive, -1, 1)}), 0.1);
    const auto z = nav.sample(w, 0);
    s = ekf_predict(s, z.encoder_v, z.encoder_omega, 0.1);
    const double var_th = s.covariance(2, 2);
    s = ekf_update_heading(s, z.imu_heading, 0.05);
    REQUIRE(s.covariance(2, 2) <= var_th);
    if (z.gps_fix) {
      const double vx = s.covariance(0, 0), vy = s.covariance(1, 1);
      s = ekf_update_gps(s, *z.gps_fix, 1.0);
      REQUIRE(s.covariance(0, 0) <= vx);
      REQUIRE(s.covariance(1, 1) <= vy);
    }
    REQUIRE((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE(min_eigen(s.covariance) >= -1e-9);
    REQUIRE(s.mean(2) > -kPi);
    REQUIRE(s.mean(2) <= kPi);
  }
}

TEST_CASE("zero noise: both filters track truth exactly") {
  auto w = make_world(15.0);
  add_robot(w, {0.5, -0.5, 1.0});
  LocalizationParams lp;
  lp.sigma_imu = 0;
  lp.sigma_gps = 0;
  Localizer loc(w.robots[0].pose, lp);
  NavSampler nav(NoiseParams::zero(), 0.1, make_stream(1, StreamPurpose::kNav, 0));
  Rng drive = make_stream(1, StreamPurpose::kStrategy, 0);
  double worst = 0.0;
  for (int i = 0; i < 6000; ++i) {
    step_world(w, commands(w, {uniform(drive, 0, 0.2), uniform(drive, -1, 1)}), 0.1);
    loc.step(nav.sample(w, 0), 0.1);
    const auto& r = w.robots[0].pose;
    for (const auto* f : {&loc.estimates().odom_filter, &loc.estimates().global_filter}) {
      worst = std::max(worst, std::abs(f->mean(0) - r.x));
      worst = std::max(worst, std::abs(f->mean(1) - r.y));
      worst = std::max(worst, std::abs(wrap_angle(f->mean(2) - r.theta)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("only the global filter consumes gps") {
  auto w = make_world(15.0);
  add_robot(w, {0, 0, 0});
  Localizer loc(w.robots[0].pose, {});
  NavSampler nav(NoiseParams{}, 0.1, make_stream(2, StreamPurpose::kNav, 0));
  for (int i = 0; i < 300; ++i) {
    step_world(w, commands(w, {0.2, 0.1}), 0.1);
    const auto z = nav.sample(w, 0);
    const auto before = loc.estimates();
    loc.step(z, 0.1);
    // Replaying the same samples without the fix reproduces the odom filter.
    auto odom = ekf_predict(before.odom_filter, z.encoder_v, z.encoder_omega, 0.1, loc.params().process);
    odom = ekf_update_heading(odom, z.imu_heading, loc.params().sigma_imu);
    REQUIRE((odom.mean - loc.estimates().odom_filter.mean).cwiseAbs().maxCoeff() < 1e-15);
  }
  CHECK((loc.estimates().odom_filter.mean - loc.estimates().global_filter.mean).norm() > 1e-6);
}
