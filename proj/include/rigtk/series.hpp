#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "rigtk/time.hpp"

namespace rigtk {

struct ImuSample {
  Timestamp t_ns{0};
  Eigen::Vector3d gyro{0.0, 0.0, 0.0};   // rad/s
  Eigen::Vector3d accel{0.0, 0.0, 0.0};  // m/s^2, specific force
};

/// Timestamped rate/specific-force stream with a nominal rate and label.
struct ImuSeries {
  std::vector<ImuSample> samples;
  double nominal_rate_hz{0.0};
  std::string label;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  Timestamp start_ns() const { return samples.front().t_ns; }
  Timestamp end_ns() const { return samples.back().t_ns; }

  /// Strictly increasing timestamps and nominal rate within 20% of the
  /// median spacing. Throws DataError on violation.
  void validate() const;
};

/// Gyro/accel channel selector used by CSV columns and the CLI.
enum class ImuChannel { gyro_x, gyro_y, gyro_z, accel_x, accel_y, accel_z };

ImuChannel imu_channel_from_string(const std::string& name);
std::vector<double> extract_channel(const ImuSeries& series, ImuChannel channel);

struct PositionSample {
  Timestamp t_ns{0};
  Eigen::Vector3d position{0.0, 0.0, 0.0};  // meters
};

/// Timestamped 3-D position measurements (total-station / GNSS role).
struct PositionSeries {
  std::vector<PositionSample> samples;
  double noise_sigma_m{0.0};
  std::string frame;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  Timestamp start_ns() const { return samples.front().t_ns; }
  Timestamp end_ns() const { return samples.back().t_ns; }

  void validate() const;
};

}  // namespace rigtk
