#pragma once

#include <span>
#include <string>
#include <vector>

#include "rigtk/pose.hpp"
#include "rigtk/series.hpp"
#include "rigtk/trajectory.hpp"

namespace rigtk {

struct AllanPoint {
  double tau_s{0.0};
  double sigma{0.0};
};

struct AllanCurve {
  std::vector<AllanPoint> points;
  std::string channel;
  double rate_hz{0.0};
};

/// Overlapping Allan deviation of a uniform-rate scalar channel. Taus with
/// fewer than 9 clusters are dropped with a warning; throws DataError if
/// none survive.
AllanCurve allan_deviation(const std::vector<double>& samples, double rate_hz,
                           const std::vector<double>& taus,
                           const std::string& channel = {});

/// Default log-spaced tau grid for a series of the given length.
std::vector<double> default_taus(std::size_t n_samples, double rate_hz);

struct NoiseFitConfig {
  // Bounds of the tau region searched for the -1/2 slope.
  double slope_tau_min{0.0};  // 0 = no lower bound
  double slope_tau_max{1.0};
  double slope_tolerance{0.15};
};

struct NoiseFit {
  double white_noise_density{0.0};  // channel units / sqrt(Hz)
  double bias_instability{0.0};     // channel units
  double bias_instability_tau_s{0.0};
  int slope_points{0};
};

/// White-noise density from the -1/2 slope region evaluated at tau = 1 s;
/// bias instability as min sigma / 0.664. Throws DegenerateError when no
/// -1/2 slope region exists and DataError when the curve spans fewer than
/// 3 decades.
NoiseFit fit_noise_params(const AllanCurve& curve, const NoiseFitConfig& config = {});

struct PreintegrationResult {
  Eigen::Quaterniond delta_rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d delta_velocity{0.0, 0.0, 0.0};
  Eigen::Vector3d delta_position{0.0, 0.0, 0.0};
  double duration_s{0.0};
  std::size_t used_samples{0};
};

/// Midpoint integration of bias-corrected rates in the frame of the first
/// sample. Gravity is not included; fusion applies it. Warns for segments
/// longer than 10 s.
PreintegrationResult preintegrate(std::span<const ImuSample> segment,
                                  const Eigen::Vector3d& gyro_bias,
                                  const Eigen::Vector3d& accel_bias);

struct NavState {
  Pose pose;  // world <- body
  Eigen::Vector3d velocity{0.0, 0.0, 0.0};
  Eigen::Vector3d gyro_bias{0.0, 0.0, 0.0};
  Eigen::Vector3d accel_bias{0.0, 0.0, 0.0};
  Timestamp t_ns{0};
};

/// Strapdown propagation a_world = R * (accel - b_a) + g with the midpoint
/// scheme, one output pose per IMU sample. The init state must start within
/// one sample period of the series.
Trajectory dead_reckon(const ImuSeries& imu, const NavState& init,
                       const Eigen::Vector3d& gravity);

}  // namespace rigtk
