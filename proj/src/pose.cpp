#include "rigtk/pose.hpp"

#include <cmath>

#include "rigtk/errors.hpp"

namespace rigtk {
namespace so3 {

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Quaterniond exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  double half_sinc;  // sin(theta/2)/theta
  if (theta < 1e-8) {
    half_sinc = 0.5 - theta * theta / 48.0;
  } else {
    half_sinc = std::sin(0.5 * theta) / theta;
  }
  Eigen::Quaterniond q(std::cos(0.5 * theta), half_sinc * w.x(),
                       half_sinc * w.y(), half_sinc * w.z());
  return q.normalized();
}

Eigen::Vector3d log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Eigen::Vector3d v = q.vec();
  const double n = v.norm();
  if (n < 1e-12) {
    // theta/sin(theta/2) ~ 2 + n^2/(3 w^2) for small angles
    return (2.0 / q.w()) * v;
  }
  const double angle = 2.0 * std::atan2(n, q.w());
  return (angle / n) * v;
}

Eigen::Matrix3d right_jacobian(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  if (theta < 1e-6) {
    return Eigen::Matrix3d::Identity() - 0.5 * W + (1.0 / 6.0) * W * W;
  }
  const double t2 = theta * theta;
  return Eigen::Matrix3d::Identity() - (1.0 - std::cos(theta)) / t2 * W +
         (theta - std::sin(theta)) / (t2 * theta) * W * W;
}

Eigen::Matrix3d right_jacobian_inverse(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  if (theta < 1e-6) {
    return Eigen::Matrix3d::Identity() + 0.5 * W + (1.0 / 12.0) * W * W;
  }
  const double t2 = theta * theta;
  const double coef = 1.0 / t2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Eigen::Matrix3d::Identity() + 0.5 * W + coef * W * W;
}

}  // namespace so3

Eigen::Quaterniond canonical(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  const double* c = q.coeffs().data();  // x, y, z, w
  bool flip = false;
  if (c[3] < 0.0) {
    flip = true;
  } else if (c[3] == 0.0) {
    for (int i = 0; i < 3; ++i) {
      if (c[i] < 0.0) {
        flip = true;
        break;
      }
      if (c[i] > 0.0) break;
    }
  }
  if (flip) q.coeffs() = -q.coeffs();
  return q;
}

Pose::Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t, std::string from,
           std::string to)
    : rotation(canonical(q)),
      translation(t),
      frame_from(std::move(from)),
      frame_to(std::move(to)) {}

Pose Pose::identity(std::string from, std::string to) {
  return Pose(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(),
              std::move(from), std::move(to));
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose se3_compose(const Pose& a, const Pose& b) {
  if (!a.frame_to.empty() && !b.frame_from.empty() && a.frame_to != b.frame_from) {
    throw FrameError("se3_compose: frame mismatch, '" + a.frame_to +
                     "' composed with '" + b.frame_from + "'");
  }
  return Pose(a.rotation * b.rotation, a.rotation * b.translation + a.translation,
              a.frame_from, b.frame_to);
}

Pose se3_inverse(const Pose& a) {
  const Eigen::Quaterniond q_inv = a.rotation.conjugate();
  return Pose(q_inv, -(q_inv * a.translation), a.frame_to, a.frame_from);
}

}  // namespace rigtk
