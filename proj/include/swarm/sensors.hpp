#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "swarm/random.hpp"
#include "swarm/world.hpp"

namespace swarm {

struct SensorParams {
  double ultrasound_max_range = 3.0;
  double ultrasound_min_range = 0.01;
  std::array<double, 3> ultrasound_mounts{kPi / 6.0, 0.0, -kPi / 6.0};  // left, center, right
  double camera_range = 1.0;
  double camera_half_angle = 0.5;
  double camera_offset = 0.0;  // camera point ahead of the robot center
};

struct NoiseParams {
  double sigma_enc = 0.02;  // multiplicative
  double sigma_imu = 0.05;  // rad
  double sigma_gps = 1.0;   // m, per axis
  double gps_period = 1.0;  // s
  // Correlation times of the encoder scale error and IMU heading error; 0 = white.
  // Each sample's error is still marginally N(0, sigma).
  double enc_correlation_time = 30.0;
  double imu_correlation_time = 0.0;
  double camera_sigma_bearing = 0.0;
  double camera_sigma_distance = 0.0;

  static NoiseParams zero() {
    NoiseParams n;
    n.sigma_enc = n.sigma_imu = n.sigma_gps = 0.0;
    return n;
  }
};

struct UltrasoundReading {
  int sensor_index = 0;  // 0 = left, 1 = center, 2 = right
  double range = 3.0;
};

enum class TagKind { kResourceCube, kZoneBoundary };

struct TagDetection {
  TagKind kind = TagKind::kResourceCube;
  int tag_id = 0;
  double relative_bearing = 0.0;
  double distance = 0.0;
};

struct RawNavSamples {
  double encoder_v = 0.0;
  double encoder_omega = 0.0;
  double imu_heading = 0.0;
  std::optional<Vec2> gps_fix;
};

struct SensorFrame {
  int robot_id = 0;
  std::int64_t tick = 0;
  std::array<UltrasoundReading, 3> ultrasound;
  std::vector<TagDetection> detections;
  RawNavSamples nav;
  bool holding = false;  // gripper proprioception
};

std::array<UltrasoundReading, 3> sense_ultrasound(const WorldState& world, int robot_id,
                                                  const SensorParams& params = {});

/// Exact detections; pass a stream to apply the configured detection noise.
std::vector<TagDetection> sense_camera(const WorldState& world, int robot_id,
                                       const SensorParams& params = {},
                                       const NoiseParams* noise = nullptr, Rng* rng = nullptr);

/// Per-robot navigation sensor model with its own seeded stream.
class NavSampler {
 public:
  NavSampler(const NoiseParams& noise, double dt, Rng rng);

  /// Call once per tick after step_world.
  RawNavSamples sample(const WorldState& world, int robot_id);

  bool gps_due(std::int64_t tick) const;

 private:
  NoiseParams noise_;
  double dt_;
  std::int64_t gps_every_ticks_;
  Rng rng_;
  GaussMarkov enc_v_error_;
  GaussMarkov enc_omega_error_;
  GaussMarkov imu_error_;
};

}  // namespace swarm
