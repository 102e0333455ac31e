#include "rigtk/trajectory.hpp"

#include "rigtk/errors.hpp"

namespace rigtk {

void Trajectory::append(Timestamp t_ns, const Eigen::Quaterniond& q,
                        const Eigen::Vector3d& p) {
  if (!samples_.empty() && t_ns <= samples_.back().t_ns) {
    throw DataError("trajectory timestamps must be strictly increasing");
  }
  samples_.push_back({t_ns, canonical(q), p});
}

void Trajectory::append(Timestamp t_ns, const Pose& pose) {
  if (!pose.frame_from.empty() && !frame_from_.empty() &&
      pose.frame_from != frame_from_) {
    throw FrameError("trajectory frame_from mismatch: '" + pose.frame_from +
                     "' vs '" + frame_from_ + "'");
  }
  if (!pose.frame_to.empty() && !frame_to_.empty() && pose.frame_to != frame_to_) {
    throw FrameError("trajectory frame_to mismatch: '" + pose.frame_to + "' vs '" +
                     frame_to_ + "'");
  }
  append(t_ns, pose.rotation, pose.translation);
}

Timestamp Trajectory::start_ns() const {
  if (samples_.empty()) throw DataError("empty trajectory");
  return samples_.front().t_ns;
}

Timestamp Trajectory::end_ns() const {
  if (samples_.empty()) throw DataError("empty trajectory");
  return samples_.back().t_ns;
}

Pose Trajectory::pose_at(std::size_t index) const {
  const TrajectorySample& s = samples_.at(index);
  return Pose(s.rotation, s.translation, frame_from_, frame_to_);
}

Pose interpolate_pose(const Trajectory& traj, Timestamp t_ns) {
  const auto& samples = traj.samples();
  if (samples.size() < 2) {
    throw DataError("interpolate_pose needs at least 2 samples");
  }
  if (t_ns < samples.front().t_ns || t_ns > samples.back().t_ns) {
    throw RangeError("interpolate_pose: time outside trajectory span");
  }
  // First sample with t >= t_ns.
  auto it = std::lower_bound(samples.begin(), samples.end(), t_ns,
                             [](const TrajectorySample& s, Timestamp t) {
                               return s.t_ns < t;
                             });
  if (it->t_ns == t_ns) {
    return Pose(it->rotation, it->translation, traj.frame_from(), traj.frame_to());
  }
  const TrajectorySample& hi = *it;
  const TrajectorySample& lo = *(it - 1);
  const double alpha = static_cast<double>(t_ns - lo.t_ns) /
                       static_cast<double>(hi.t_ns - lo.t_ns);
  const Eigen::Vector3d p = (1.0 - alpha) * lo.translation + alpha * hi.translation;
  const Eigen::Quaterniond q = lo.rotation.slerp(alpha, hi.rotation);
  return Pose(q, p, traj.frame_from(), traj.frame_to());
}

}  // namespace rigtk
