#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rigtk/pose.hpp"
#include "rigtk/time.hpp"

namespace rigtk {

struct TrajectorySample {
  Timestamp t_ns{0};
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};
};

/// Time-ordered poses sharing one frame pair. Timestamps are strictly
/// increasing; append enforces both invariants.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::string frame_from, std::string frame_to)
      : frame_from_(std::move(frame_from)), frame_to_(std::move(frame_to)) {}

  void append(Timestamp t_ns, const Eigen::Quaterniond& q,
              const Eigen::Vector3d& p);
  void append(Timestamp t_ns, const Pose& pose);

  const std::vector<TrajectorySample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  Timestamp start_ns() const;
  Timestamp end_ns() const;

  Pose pose_at(std::size_t index) const;

  const std::string& frame_from() const { return frame_from_; }
  const std::string& frame_to() const { return frame_to_; }

 private:
  std::string frame_from_;
  std::string frame_to_;
  std::vector<TrajectorySample> samples_;
};

/// Pose at time t: translation linearly interpolated, rotation slerped
/// between the bracketing samples. Exact at sample times. Throws RangeError
/// outside [start, end] and DataError for fewer than 2 samples.
Pose interpolate_pose(const Trajectory& traj, Timestamp t_ns);

}  // namespace rigtk
