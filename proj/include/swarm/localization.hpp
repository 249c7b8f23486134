#pragma once

#include <Eigen/Core>

#include "swarm/geometry.hpp"
#include "swarm/sensors.hpp"

namespace swarm {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Mean (x, y, theta) and covariance of a planar pose filter.
struct EkfState {
  Vector3 mean = Vector3::Zero();
  Matrix3 covariance = Matrix3::Zero();

  Pose pose() const { return {mean(0), mean(1), mean(2)}; }
  Vec2 position() const { return {mean(0), mean(1)}; }
};

/// Process noise: per-second variance scaled by |v| (translation) and |omega| (rotation)
/// plus a floor so a stationary filter still grows.
struct ProcessNoise {
  double translation_per_meter = 4e-4;  // m^2 per m travelled
  double translation_floor = 1e-6;      // m^2/s
  double heading_per_radian = 4e-4;     // rad^2 per rad turned
  double heading_floor = 1e-5;          // rad^2/s

  Matrix3 covariance(double v, double omega, double dt) const;
};

struct LocalizationParams {
  ProcessNoise process;
  double initial_position_sigma = 0.01;
  double initial_heading_sigma = 0.01;
  double sigma_imu = 0.05;
  double sigma_gps = 1.0;
  // Measurement sigmas are floored here so zero-noise rounds keep finite gains.
  double min_measurement_sigma = 1e-6;
};

/// Semi-implicit unicycle step shared with the world integrator.
Vector3 motion_model(const Vector3& mean, double v, double omega, double dt);
Matrix3 motion_jacobian(const Vector3& mean, double v, double omega, double dt);

/// Throws InvariantError when the covariance is asymmetric or has a negative eigenvalue.
void check_covariance(const Matrix3& p);

EkfState ekf_predict(const EkfState& state, double encoder_v, double encoder_omega, double dt,
                     const ProcessNoise& q = {});
EkfState ekf_update_heading(const EkfState& state, double imu_heading, double sigma_imu);
EkfState ekf_update_gps(const EkfState& state, Vec2 gps_fix, double sigma_gps);

struct PoseEstimatePair {
  EkfState odom_filter;    // encoders + IMU
  EkfState global_filter;  // encoders + IMU + GPS
};

/// Owns one robot's filter pair and advances both exactly once per tick.
class Localizer {
 public:
  Localizer(const Pose& start, const LocalizationParams& params);

  void step(const RawNavSamples& nav, double dt);

  const PoseEstimatePair& estimates() const { return est_; }
  const LocalizationParams& params() const { return params_; }

 private:
  LocalizationParams params_;
  PoseEstimatePair est_;
};

}  // namespace swarm
