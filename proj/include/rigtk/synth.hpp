#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rigtk/pose.hpp"
#include "rigtk/series.hpp"
#include "rigtk/trajectory.hpp"

namespace rigtk {

inline constexpr double kGravityMagnitude = 9.80665;  // m/s^2

/// World-frame gravity vector, +z up.
Eigen::Vector3d gravity_vector();

struct SinusoidTerm {
  double amplitude{0.0};
  double frequency_hz{0.0};
  double phase_rad{0.0};
};

/// offset + sum of amplitude * sin(2*pi*f*t + phase); derivatives in
/// closed form.
struct DofSignal {
  double offset{0.0};
  std::vector<SinusoidTerm> terms;

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
};

/// Infinitely differentiable test trajectory. Rotation is built from the
/// three per-axis angle signals composed in fixed X-Y-Z order,
/// R = Rx(a) * Ry(b) * Rz(c); body angular velocity and world linear
/// acceleration are available in closed form, which makes simulated IMU
/// streams exact.
struct AnalyticTrajectory {
  std::array<DofSignal, 3> translation;  // x, y, z [m]
  std::array<DofSignal, 3> rotation;     // angles about x, y, z [rad]
  double duration_s{0.0};

  Eigen::Vector3d position(double t) const;
  Eigen::Vector3d velocity(double t) const;
  Eigen::Vector3d acceleration(double t) const;
  Eigen::Quaterniond orientation(double t) const;
  Eigen::Vector3d body_angular_velocity(double t) const;
  Pose pose(double t, const std::string& frame_from = "world",
            const std::string& frame_to = "body") const;

  void validate() const;
};

/// Continuous-time noise densities plus bias random walks. All-zero
/// parameters give a bit-deterministic noiseless stream.
struct ImuNoiseModel {
  double gyro_noise_density{0.0};       // rad/s/sqrt(Hz)
  double accel_noise_density{0.0};      // m/s^2/sqrt(Hz)
  double gyro_bias_instability{0.0};    // rad/s
  double accel_bias_instability{0.0};   // m/s^2
  Eigen::Vector3d initial_gyro_bias{0.0, 0.0, 0.0};
  Eigen::Vector3d initial_accel_bias{0.0, 0.0, 0.0};
  std::uint64_t seed{0};

  void validate() const;

  /// Named presets covering the payload's sensor tiers:
  /// "tactical", "industrial", "consumer".
  static ImuNoiseModel tier(const std::string& name, std::uint64_t seed = 0);
};

/// Affine sensor clock: sensor_time(t) = t + offset + drift_ppm * 1e-6 * t,
/// plus optional white jitter. With zero jitter the map is exactly affine.
struct ClockModel {
  Timestamp offset_ns{0};
  double drift_ppm{0.0};
  double jitter_sigma_ns{0.0};
  std::uint64_t seed{0};

  Timestamp sensor_time(Timestamp true_t_ns) const;

  /// Maps a batch of true times, drawing jitter from the model seed.
  std::vector<Timestamp> map_times(const std::vector<Timestamp>& true_t_ns) const;
};

/// Samples the closed-form trajectory on a uniform grid, first and last
/// instants inclusive.
Trajectory generate_trajectory(const AnalyticTrajectory& params, double sample_rate_hz,
                               const std::string& frame_from = "world",
                               const std::string& frame_to = "body");

/// Exact body-frame rates: gyro = closed-form angular velocity, accel =
/// R^T * (a_world - g). Noise and clock applied afterwards.
ImuSeries simulate_imu(const AnalyticTrajectory& traj, const ImuNoiseModel& noise,
                       const ClockModel& clock, double rate_hz,
                       const std::string& label = "imu");

/// Merges overlapping or touching intervals; warns when any merge happens.
std::vector<std::pair<double, double>> merge_dropouts(
    std::vector<std::pair<double, double>> dropouts);

/// Prism position stream T(t) * prism_in_body with isotropic Gaussian noise.
/// Samples with start <= t < end of any dropout interval are omitted.
PositionSeries simulate_tps(const AnalyticTrajectory& traj,
                            const Eigen::Vector3d& prism_in_body, double rate_hz,
                            double noise_sigma_m,
                            const std::vector<std::pair<double, double>>& dropouts,
                            std::uint64_t seed = 0);

struct DetectionNoise {
  double translation_sigma_m{0.0};
  double rotation_sigma_rad{0.0};
  std::uint64_t seed{0};
};

/// Camera-frame target poses T_{cam<-target}(t) for a camera riding the
/// trajectory body frame.
std::vector<std::pair<Timestamp, Pose>> simulate_detections(
    const AnalyticTrajectory& traj, const Pose& target_pose_world,
    const std::vector<double>& times_s, const DetectionNoise& noise = {});

/// Everything needed to regenerate and consume one synthetic dataset.
struct Scenario {
  int schema_version{1};
  std::uint64_t seed{0};
  double duration_s{30.0};
  AnalyticTrajectory trajectory;
  double imu_rate_hz{400.0};
  ImuNoiseModel imu_noise;
  ClockModel imu_clock;
  double tps_rate_hz{20.0};
  double tps_noise_sigma_m{0.0};
  std::vector<std::pair<double, double>> tps_dropouts;
  Eigen::Vector3d prism_in_body{0.0, 0.0, 0.0};
  Pose imu_extrinsic;  // body <- imu, identity unless perturbed
  double gt_rate_hz{100.0};
  std::string imu_csv{"imu.csv"};
  std::string tps_csv{"tps.csv"};
  std::string ground_truth_tum{"gt.tum"};

  static Scenario preset(const std::string& name, std::uint64_t seed);
};

/// In-memory rendering of a scenario: the streams the files would contain.
struct ScenarioData {
  Scenario manifest;
  ImuSeries imu;
  PositionSeries tps;
  Trajectory ground_truth;
};

ScenarioData render_scenario(const Scenario& scenario);

}  // namespace rigtk
