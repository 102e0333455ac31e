#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <string>

namespace rigtk {

namespace so3 {

Eigen::Matrix3d hat(const Eigen::Vector3d& w);

/// Exponential map, axis-angle vector to unit quaternion.
Eigen::Quaterniond exp(const Eigen::Vector3d& w);

/// Logarithm map, shortest-arc axis-angle vector of a unit quaternion.
Eigen::Vector3d log(const Eigen::Quaterniond& q);

Eigen::Matrix3d right_jacobian(const Eigen::Vector3d& w);
Eigen::Matrix3d right_jacobian_inverse(const Eigen::Vector3d& w);

}  // namespace so3

/// Returns q or -q so the scalar part is non-negative. Ties at w == 0 make
/// the first non-zero of (x, y, z) positive; the 180 degree axis choice is
/// implementation-defined but deterministic.
Eigen::Quaterniond canonical(const Eigen::Quaterniond& q);

/// Rigid transform T_{frame_from <- frame_to}: the pose of `frame_to`
/// expressed in `frame_from`, so x_from = R * x_to + t. Composing A<-B with
/// B<-C yields A<-C. Quaternions are Hamilton convention, stored unit-norm
/// with non-negative scalar part. Empty frame names act as wildcards.
struct Pose {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};
  std::string frame_from;
  std::string frame_to;

  Pose() = default;
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
       std::string from = {}, std::string to = {});

  static Pose identity(std::string from = {}, std::string to = {});

  /// Maps a point from `frame_to` coordinates into `frame_from`.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  Eigen::Matrix4d matrix() const;
};

/// a o b with frames a.frame_from <- b.frame_to. Throws FrameError when
/// both inner frames are named and disagree.
Pose se3_compose(const Pose& a, const Pose& b);

Pose se3_inverse(const Pose& a);

/// A calibrated transform between a named sensor pair.
struct Extrinsic {
  Pose pose;
  std::string label;
};

}  // namespace rigtk
