#include "rigtk/series.hpp"

#include <algorithm>
#include <cmath>

#include "rigtk/errors.hpp"

namespace rigtk {

namespace {

template <typename Sample>
void check_strictly_increasing(const std::vector<Sample>& samples,
                               const char* what) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t_ns <= samples[i - 1].t_ns) {
      throw DataError(std::string(what) + ": timestamps not strictly increasing");
    }
  }
}

template <typename Sample>
double median_spacing_s(const std::vector<Sample>& samples) {
  std::vector<double> dts;
  dts.reserve(samples.size() - 1);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    dts.push_back(static_cast<double>(samples[i].t_ns - samples[i - 1].t_ns) * 1e-9);
  }
  std::nth_element(dts.begin(), dts.begin() + dts.size() / 2, dts.end());
  return dts[dts.size() / 2];
}

}  // namespace

void ImuSeries::validate() const {
  if (samples.size() < 2) throw DataError("imu series needs at least 2 samples");
  check_strictly_increasing(samples, "imu series");
  if (nominal_rate_hz > 0.0) {
    const double median_dt = median_spacing_s(samples);
    const double nominal_dt = 1.0 / nominal_rate_hz;
    if (std::abs(median_dt - nominal_dt) > 0.2 * nominal_dt) {
      throw DataError("imu series nominal rate differs from median spacing by >20%");
    }
  }
}

void PositionSeries::validate() const {
  if (samples.empty()) throw DataError("empty position series");
  check_strictly_increasing(samples, "position series");
}

ImuChannel imu_channel_from_string(const std::string& name) {
  if (name == "gyro_x") return ImuChannel::gyro_x;
  if (name == "gyro_y") return ImuChannel::gyro_y;
  if (name == "gyro_z") return ImuChannel::gyro_z;
  if (name == "accel_x") return ImuChannel::accel_x;
  if (name == "accel_y") return ImuChannel::accel_y;
  if (name == "accel_z") return ImuChannel::accel_z;
  throw UsageError("unknown imu channel '" + name + "'");
}

std::vector<double> extract_channel(const ImuSeries& series, ImuChannel channel) {
  std::vector<double> out;
  out.reserve(series.samples.size());
  for (const ImuSample& s : series.samples) {
    switch (channel) {
      case ImuChannel::gyro_x: out.push_back(s.gyro.x()); break;
      case ImuChannel::gyro_y: out.push_back(s.gyro.y()); break;
      case ImuChannel::gyro_z: out.push_back(s.gyro.z()); break;
      case ImuChannel::accel_x: out.push_back(s.accel.x()); break;
      case ImuChannel::accel_y: out.push_back(s.accel.y()); break;
      case ImuChannel::accel_z: out.push_back(s.accel.z()); break;
    }
  }
  return out;
}

}  // namespace rigtk
