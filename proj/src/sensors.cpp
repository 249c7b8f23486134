#include "swarm/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swarm/errors.hpp"

namespace swarm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ray_to_walls(Vec2 o, Vec2 dir, double half) {
  double t = kInf;
  if (dir.x > 0.0) t = std::min(t, (half - o.x) / dir.x);
  if (dir.x < 0.0) t = std::min(t, (-half - o.x) / dir.x);
  if (dir.y > 0.0) t = std::min(t, (half - o.y) / dir.y);
  if (dir.y < 0.0) t = std::min(t, (-half - o.y) / dir.y);
  return std::max(0.0, t);
}

// Distance along a unit ray to the first intersection with a disc, or infinity.
double ray_to_disc(Vec2 o, Vec2 dir, Vec2 center, double radius) {
  const Vec2 w = center - o;
  const double along = w.dot(dir);
  const double c = w.dot(w) - radius * radius;
  if (c <= 0.0) return 0.0;
  if (along <= 0.0) return kInf;
  const double disc = along * along - c;
  if (disc < 0.0) return kInf;
  return along - std::sqrt(disc);
}

}  // namespace

std::array<UltrasoundReading, 3> sense_ultrasound(const WorldState& world, int robot_id,
                                                  const SensorParams& params) {
  const RobotBody& self = world.robot(robot_id);
  std::array<UltrasoundReading, 3> out;
  for (int i = 0; i < 3; ++i) {
    const double bearing = self.pose.theta + params.ultrasound_mounts[i];
    const Vec2 dir = unit(bearing);
    const Vec2 origin = self.pose.position() + dir * self.radius;
    double t = ray_to_walls(origin, dir, world.arena.half());
    for (const auto& other : world.robots) {
      if (other.id == robot_id) continue;
      t = std::min(t, ray_to_disc(origin, dir, other.pose.position(), other.radius));
    }
    out[i].sensor_index = i;
    out[i].range = std::clamp(t, params.ultrasound_min_range, params.ultrasound_max_range);
  }
  return out;
}

std::vector<TagDetection> sense_camera(const WorldState& world, int robot_id, const SensorParams& params,
                                       const NoiseParams* noise, Rng* rng) {
  const RobotBody& self = world.robot(robot_id);
  const Vec2 cam = self.pose.position() + unit(self.pose.theta) * params.camera_offset;
  std::vector<TagDetection> out;

  auto consider = [&](TagKind kind, int id, Vec2 p) {
    const Vec2 rel = p - cam;
    double dist = rel.norm();
    double bearing = wrap_angle(std::atan2(rel.y, rel.x) - self.pose.theta);
    if (noise != nullptr && rng != nullptr) {
      dist += gaussian(*rng, noise->camera_sigma_distance);
      bearing = wrap_angle(bearing + gaussian(*rng, noise->camera_sigma_bearing));
    }
    if (dist > params.camera_range || std::abs(bearing) > params.camera_half_angle) return;
    out.push_back({kind, id, bearing, std::max(0.0, dist)});
  };

  for (const auto& cube : world.cubes) {
    if (auto p = cube.resting_position()) consider(TagKind::kResourceCube, cube.id, *p);
  }
  for (int k = 0; k < kZoneMarkerCount; ++k)
    consider(TagKind::kZoneBoundary, k, zone_marker_position(k, world.arena.zone_side));
  return out;
}

NavSampler::NavSampler(const NoiseParams& noise, double dt, Rng rng)
    : noise_(noise),
      dt_(dt),
      gps_every_ticks_(std::max<std::int64_t>(1, std::llround(noise.gps_period / dt))),
      rng_(std::move(rng)),
      enc_v_error_(noise.sigma_enc, noise.enc_correlation_time, dt),
      enc_omega_error_(noise.sigma_enc, noise.enc_correlation_time, dt),
      imu_error_(noise.sigma_imu, noise.imu_correlation_time, dt) {
  if (!(dt > 0.0)) throw ConfigError("NavSampler: dt must be positive");
}

bool NavSampler::gps_due(std::int64_t tick) const { return tick % gps_every_ticks_ == 0; }

RawNavSamples NavSampler::sample(const WorldState& world, int robot_id) {
  const RobotBody& r = world.robot(robot_id);
  RawNavSamples s;
  s.encoder_v = r.executed_v * (1.0 + enc_v_error_.next(rng_));
  s.encoder_omega = r.executed_omega * (1.0 + enc_omega_error_.next(rng_));
  s.imu_heading = wrap_angle(r.pose.theta + imu_error_.next(rng_));
  if (gps_due(world.tick)) {
    const double ex = gaussian(rng_, noise_.sigma_gps);
    const double ey = gaussian(rng_, noise_.sigma_gps);
    s.gps_fix = Vec2{r.pose.x + ex, r.pose.y + ey};
  }
  return s;
}

}  // namespace swarm
