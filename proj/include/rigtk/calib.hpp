#pragma once

#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "rigtk/pose.hpp"
#include "rigtk/time.hpp"

namespace rigtk {

inline constexpr std::size_t kMaxCornersPerDetection = 144;
inline constexpr double kIntrinsicSigmaGatePx = 2.0;
inline constexpr double kExtrinsicSigmaGateM = 1e-3;

struct DetectionEvent {
  Timestamp t_ns{0};
  std::string camera;
  Pose target_pose;  // camera <- target
  std::vector<Eigen::Vector2d> corners;  // pixel (u, v)
};

struct StaticSegment {
  std::size_t first_index{0};
  std::size_t last_index{0};  // inclusive
  Timestamp start_ns{0};
  Timestamp end_ns{0};
};

/// An event is static when both its predecessor and successor target
/// positions move less than the threshold; contiguous static events form
/// segments. Needs at least 3 events for any segment.
std::vector<StaticSegment> detect_static_segments(
    const std::vector<DetectionEvent>& detections, double motion_threshold_m = 1e-3);

/// Bounded buffer of the most recent detections for one camera.
class DetectionRingBuffer {
 public:
  explicit DetectionRingBuffer(std::size_t capacity = 10) : capacity_(capacity) {}

  void push(const DetectionEvent& event);
  const std::deque<DetectionEvent>& entries() const { return entries_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::deque<DetectionEvent> entries_;
};

/// Cross-camera grouping by timestamp: for each detection of the first
/// camera, collects one detection per other camera within the window.
/// The window is an interpretation knob; 10 ms default.
std::vector<std::vector<DetectionEvent>> group_detections_by_time(
    const std::map<std::string, DetectionRingBuffer>& buffers,
    Timestamp window_ns = 10'000'000);

/// 3x3 block coverage with a per-block capacity of 10. A whole detection is
/// accepted iff any mapped block is below capacity before insertion; on
/// acceptance all corners are added, so blocks may exceed capacity.
class CoverageGrid {
 public:
  CoverageGrid(int width_px, int height_px, int block_capacity = 10);

  /// Returns true when the detection was accepted. Out-of-bounds corners
  /// are dropped with a warning but do not reject the detection.
  bool accumulate(const DetectionEvent& detection);

  /// Block of a pixel; boundary coordinates go to the lower-index block.
  int block_index(double u, double v) const;

  const std::array<int, 9>& counts() const { return counts_; }
  int total_count() const;
  int width() const { return width_; }
  int height() const { return height_; }
  int block_capacity() const { return capacity_; }
  std::size_t dropped_corners() const { return dropped_corners_; }
  std::size_t accepted_detections() const { return accepted_; }
  std::size_t rejected_detections() const { return rejected_; }

 private:
  int width_;
  int height_;
  int capacity_;
  std::array<int, 9> counts_{};
  std::size_t dropped_corners_{0};
  std::size_t accepted_{0};
  std::size_t rejected_{0};
};

enum class CalibrationPhase { intrinsic, extrinsic };

struct ReadinessReport {
  std::map<std::string, bool> per_parameter;
  bool ready{false};
  double threshold{0.0};
};

/// Intrinsic phase passes when every projection-parameter sigma is below
/// 2 px; extrinsic phase when every translation sigma is below 1 mm.
ReadinessReport readiness_check(const std::map<std::string, double>& param_sigmas,
                                CalibrationPhase phase);

}  // namespace rigtk
