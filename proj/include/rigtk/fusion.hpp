#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rigtk/imu.hpp"
#include "rigtk/lm.hpp"
#include "rigtk/pose.hpp"
#include "rigtk/series.hpp"
#include "rigtk/trajectory.hpp"

namespace rigtk {

/// Intervals (seconds) where the inter-sample gap exceeds gap_factor times
/// the median spacing. Bounds are the timestamps of the enclosing samples.
std::vector<std::pair<double, double>> detect_dropouts(const PositionSeries& tps,
                                                       double gap_factor = 3.0);

struct FusionConfig {
  double keyframe_rate_hz{10.0};
  double tps_sigma_m{5e-4};
  // Continuous-time IMU noise for factor weighting.
  double gyro_noise_density{1.2e-5};
  double accel_noise_density{1.5e-4};
  double gyro_bias_instability{1.2e-6};
  double accel_bias_instability{2.45e-4};
  Eigen::Vector3d gravity{0.0, 0.0, -9.80665};
  double init_gravity_align_s{0.5};   // accel window for roll/pitch init
  double prior_gyro_bias_sigma{0.05};
  double prior_accel_bias_sigma{0.5};
  int relinearize_passes{1};
  LmOptions lm;
};

/// Fused trajectory with per-keyframe marginal position sigmas and the
/// dropout annotation.
struct FusedTrajectory {
  Trajectory trajectory;  // world <- body at keyframe times
  std::vector<Eigen::Vector3d> position_sigma;  // per keyframe, meters
  std::vector<Eigen::Vector3d> velocity;
  std::vector<std::pair<double, double>> dropouts;  // seconds
  bool converged{false};
  bool weak_gauge{false};  // information matrix near-singular (e.g. yaw)
  LmReport lm_report;
};

/// Batch nonlinear least squares over keyframe nav states: prism position
/// factors against the TPS stream, preintegrated IMU factors with gravity
/// between consecutive keyframes, and bias random-walk factors, solved with
/// Levenberg-Marquardt. Marginal position sigmas come from the diagonal of
/// the inverse Gauss-Newton information.
FusedTrajectory fuse_tps_imu(const PositionSeries& tps, const ImuSeries& imu,
                             const Eigen::Vector3d& prism_in_body,
                             const FusionConfig& config = {});

/// 9-DOF camera-to-prism state: prism position in the camera frame plus the
/// target pose in the TPS world frame.
struct TotalReconState {
  Eigen::Vector3d prism_in_camera{0.0, 0.0, 0.0};
  Pose target_pose_world;  // world <- target
};

struct TotalReconSample {
  Pose detection;  // cam <- target
  Eigen::Vector3d tps_position{0.0, 0.0, 0.0};  // prism in world
};

struct TotalReconResult {
  TotalReconState state;
  std::vector<double> residual_norms;
  double rms_residual{0.0};
  bool converged{false};
  LmReport lm_report;
};

/// Least-squares fit of r_k = m_k - T_{world<-target} * D_k^-1 * p_prism
/// over the 9 parameters. Requires rotational diversity: the largest
/// pairwise detection rotation must exceed 10 degrees, otherwise the
/// prism/target trade-off is unobservable and DegenerateError is thrown
/// naming the direction.
TotalReconResult totalrecon_solve(const std::vector<TotalReconSample>& samples,
                                  const TotalReconState& init,
                                  const LmOptions& options = {});

/// Derivative-free initialization: target pose from aligning detection-frame
/// camera origins to the TPS points, prism at the camera origin.
TotalReconState totalrecon_init(const std::vector<TotalReconSample>& samples);

struct ConsistencyReport {
  struct Pair {
    std::string camera_a;
    std::string camera_b;
    double distance_m{0.0};
  };
  std::vector<Pair> pairwise;
  double max_spread_m{0.0};
  std::string reference_camera;
};

/// Transforms per-camera prism estimates into the reference camera frame
/// and reports pairwise distances. Extrinsics map reference <- camera.
ConsistencyReport totalrecon_consistency(
    const std::vector<std::pair<std::string, Eigen::Vector3d>>& estimates,
    const std::map<std::string, Pose>& camera_to_reference,
    const std::string& reference_camera);

}  // namespace rigtk
