#include "swarm/localization.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "swarm/errors.hpp"

namespace swarm {

Matrix3 ProcessNoise::covariance(double v, double omega, double dt) const {
  const double qt = (translation_per_meter * std::abs(v) + translation_floor) * dt;
  const double qh = (heading_per_radian * std::abs(omega) + heading_floor) * dt;
  return Vector3(qt, qt, qh).asDiagonal();
}

Vector3 motion_model(const Vector3& mean, double v, double omega, double dt) {
  const double theta = wrap_angle(mean(2) + omega * dt);
  return {mean(0) + std::cos(theta) * (v * dt), mean(1) + std::sin(theta) * (v * dt), theta};
}

Matrix3 motion_jacobian(const Vector3& mean, double v, double omega, double dt) {
  const double theta = mean(2) + omega * dt;
  Matrix3 f = Matrix3::Identity();
  f(0, 2) = -std::sin(theta) * v * dt;
  f(1, 2) = std::cos(theta) * v * dt;
  return f;
}

void check_covariance(const Matrix3& p) {
  constexpr double kTol = 1e-9;
  if (!p.allFinite()) throw InvariantError("covariance has non-finite entries");
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > kTol) throw InvariantError("covariance not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix3> eig(p, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kTol) throw InvariantError("covariance not positive semidefinite");
}

namespace {

Matrix3 symmetrize(const Matrix3& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

EkfState ekf_predict(const EkfState& state, double encoder_v, double encoder_omega, double dt,
                     const ProcessNoise& q) {
  if (!(dt > 0.0)) throw InvariantError("ekf_predict: dt must be positive");
  check_covariance(state.covariance);
  const Matrix3 f = motion_jacobian(state.mean, encoder_v, encoder_omega, dt);
  EkfState out;
  out.mean = motion_model(state.mean, encoder_v, encoder_omega, dt);
  out.covariance = symmetrize(f * state.covariance * f.transpose() + q.covariance(encoder_v, encoder_omega, dt));
  return out;
}

EkfState ekf_update_heading(const EkfState& state, double imu_heading, double sigma_imu) {
  if (!(sigma_imu > 0.0)) throw InvariantError("ekf_update_heading: sigma must be positive");
  const Eigen::RowVector3d h(0.0, 0.0, 1.0);
  const double innovation = wrap_angle(imu_heading - state.mean(2));
  const double s = state.covariance(2, 2) + sigma_imu * sigma_imu;
  const Vector3 k = state.covariance.col(2) / s;
  const Matrix3 i_kh = Matrix3::Identity() - k * h;
  EkfState out;
  out.mean = state.mean + k * innovation;
  out.mean(2) = wrap_angle(out.mean(2));
  out.covariance =
      symmetrize(i_kh * state.covariance * i_kh.transpose() + (sigma_imu * sigma_imu) * k * k.transpose());
  return out;
}

EkfState ekf_update_gps(const EkfState& state, Vec2 gps_fix, double sigma_gps) {
  if (!(sigma_gps > 0.0)) throw InvariantError("ekf_update_gps: sigma must be positive");
  Eigen::Matrix<double, 2, 3> h = Eigen::Matrix<double, 2, 3>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Matrix2d r = Eigen::Matrix2d::Identity() * (sigma_gps * sigma_gps);
  const Eigen::Vector2d innovation(gps_fix.x - state.mean(0), gps_fix.y - state.mean(1));
  const Eigen::Matrix2d s = h * state.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 3, 2> k = state.covariance * h.transpose() * s.inverse();
  const Matrix3 i_kh = Matrix3::Identity() - k * h;
  EkfState out;
  out.mean = state.mean + k * innovation;
  out.mean(2) = wrap_angle(out.mean(2));
  out.covariance = symmetrize(i_kh * state.covariance * i_kh.transpose() + k * r * k.transpose());
  return out;
}

Localizer::Localizer(const Pose& start, const LocalizationParams& params) : params_(params) {
  EkfState init;
  init.mean = Vector3(start.x, start.y, start.theta);
  const double sp = params.initial_position_sigma;
  const double sh = params.initial_heading_sigma;
  init.covariance = Vector3(sp * sp, sp * sp, sh * sh).asDiagonal();
  est_.odom_filter = init;
  est_.global_filter = init;
}

void Localizer::step(const RawNavSamples& nav, double dt) {
  const double s_imu = std::max(params_.sigma_imu, params_.min_measurement_sigma);
  const double s_gps = std::max(params_.sigma_gps, params_.min_measurement_sigma);
  for (EkfState* f : {&est_.odom_filter, &est_.global_filter}) {
    *f = ekf_predict(*f, nav.encoder_v, nav.encoder_omega, dt, params_.process);
    *f = ekf_update_heading(*f, nav.imu_heading, s_imu);
  }
  if (nav.gps_fix) est_.global_filter = ekf_update_gps(est_.global_filter, *nav.gps_fix, s_gps);
}

}  // namespace swarm
