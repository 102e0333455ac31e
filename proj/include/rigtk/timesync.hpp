#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rigtk/series.hpp"

namespace rigtk {

/// Uniform grid from the first to the last timestamp, every channel
/// linearly interpolated. No extrapolation.
ImuSeries resample_linear(const ImuSeries& series, double rate_hz);

/// Lag maximizing the normalized cross-correlation of two same-rate
/// signals, in milliseconds. Positive offset means b lags a: shifting b
/// earlier by the offset aligns it with a. Throws DegenerateError for
/// flat signals (variance below 1e-8).
double coarse_offset_xcorr(const std::vector<double>& a, const std::vector<double>& b,
                           double rate_hz, double max_lag_ms);

struct RefineResult {
  double offset_ms{0.0};
  bool converged{false};
  double final_mse{0.0};
  int iterations{0};
};

/// One scalar channel of an IMU stream at its native, possibly
/// non-uniform sampling.
struct AxisSignal {
  std::vector<Timestamp> t_ns;
  std::vector<double> values;
};

/// Scalar MSE minimization over the time offset: iteratively re-interpolates
/// b at shifted times against a's own samples. Newton-type line search on a
/// centrally differenced objective with backtracking; converged when the
/// step falls below tol (default 1 us) within 100 iterations.
RefineResult refine_offset_mse(const AxisSignal& a, const AxisSignal& b,
                               double init_ms, double tol_ms = 1e-3,
                               double search_halfwidth_ms = 25.0);

struct OffsetEstimate {
  struct Axis {
    std::vector<double> window_offsets_ms;
    std::vector<bool> window_converged;
    double mean_ms{0.0};
    double std_ms{0.0};
    bool converged{false};  // at least one window converged
  };
  std::array<Axis, 3> axes;  // gyro x, y, z
  double grand_mean_ms{0.0};
  double grand_std_ms{0.0};
  int windows{0};
  double window_s{0.0};
  double resample_rate_hz{0.0};
  bool all_axes_converged{false};
};

struct AlignConfig {
  int windows{3};
  double window_s{30.0};
  double resample_rate_hz{500.0};
  double max_lag_ms{100.0};
  double refine_tol_ms{1e-3};
};

/// Per-axis, per-window offset estimation between two gyro streams:
/// rotate b into a's frame, then resample -> cross-correlate -> MSE-refine
/// on each window. Windows are consecutive 30 s spans from the start of the
/// overlap. Aggregates per-axis mean/std and the grand mean/std over all
/// window offsets.
OffsetEstimate align_imu_pair(const ImuSeries& a, const ImuSeries& b,
                              const Eigen::Matrix3d& rot_b_to_a,
                              const AlignConfig& config = {});

/// e = v * dt.
double sync_error_linear(double velocity_mps, double dt_s);

/// Arc length error e = r * (omega * dt), omega in degrees per second.
double sync_error_angular(double range_m, double omega_deg_per_s, double dt_s);

/// Rolling shutter readout: line i is exposed i / (fps * total_line_slots)
/// after line 0.
struct RollingShutterModel {
  double fps{30.0};
  int total_line_slots{1400};
  int image_lines{1280};
  double exposure_s{0.0};

  double line_period_s() const { return 1.0 / (fps * total_line_slots); }

  /// Offset of `line` from the first line; throws RangeError outside
  /// [0, image_lines).
  double line_time(int line) const;

  /// Same, with an explicit per-line period (e.g. a rounded datasheet
  /// figure) instead of the exact one.
  double line_time(int line, double line_period_s) const;

  /// Mid-exposure timestamp offset for `line`.
  double mid_exposure_time(int line) const;
};

struct PtpLogEntry {
  Timestamp t_ns{0};
  double offset_ns{0.0};
  std::string source;
};

struct PtpSourceReport {
  std::string source;
  std::size_t count{0};
  // Fractions of |offset| in [0,1us), [1us,10us), [10us,100us),
  // [100us,1ms), [1ms,inf). Sums to 1 per source.
  std::array<double, 5> bin_fractions{};
  double max_abs_offset_ns{0.0};
  double mean_abs_offset_ns{0.0};
  double max_rate_ns_per_s{0.0};   // max |d offset / dt|
  double mean_rate_ns_per_s{0.0};
  Timestamp span_ns{0};
};

struct PtpReport {
  std::vector<PtpSourceReport> sources;
  std::size_t malformed_rows{0};
};

PtpReport ptp_report(const std::vector<PtpLogEntry>& log);

}  // namespace rigtk
