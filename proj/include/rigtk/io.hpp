#pragma once

#include <string>
#include <vector>

#include "rigtk/calib.hpp"
#include "rigtk/imu.hpp"
#include "rigtk/pose.hpp"
#include "rigtk/series.hpp"
#include "rigtk/synth.hpp"
#include "rigtk/timesync.hpp"
#include "rigtk/trajectory.hpp"

namespace rigtk {

// TUM trajectory text: `t x y z qx qy qz qw`, t in decimal seconds,
// whitespace separated, `#` comments ignored.
Trajectory read_tum(const std::string& path);
void write_tum(const Trajectory& traj, const std::string& path);

// IMU CSV: t_ns,gyro_x,gyro_y,gyro_z,accel_x,accel_y,accel_z (SI units).
ImuSeries read_imu_csv(const std::string& path);
void write_imu_csv(const ImuSeries& series, const std::string& path);

// TPS CSV: t_ns,x,y,z (meters).
PositionSeries read_tps_csv(const std::string& path);
void write_tps_csv(const PositionSeries& series, const std::string& path);

// Extrinsic JSON: frame_from, frame_to, translation_m, quaternion_xyzw.
Extrinsic read_extrinsic_json(const std::string& path);
void write_extrinsic_json(const Extrinsic& extrinsic, const std::string& path);

// PTP offset log CSV: t_ns,offset_ns,source. Malformed rows are counted
// and reported, parsing continues.
std::vector<PtpLogEntry> read_ptp_csv(const std::string& path,
                                      std::size_t* malformed_rows = nullptr);

// Nav state JSON for dead reckoning inits.
NavState read_nav_state_json(const std::string& path);
void write_nav_state_json(const NavState& state, const std::string& path);

// Detection events, one JSON object per line.
std::vector<DetectionEvent> read_detections_jsonl(const std::string& path);
void write_detections_jsonl(const std::vector<DetectionEvent>& events,
                            const std::string& path);

// Scenario manifest JSON (parameters, seeds, file names).
Scenario read_scenario_json(const std::string& path);
void write_scenario_json(const Scenario& scenario, const std::string& path);

std::string json_schema_version_field();

}  // namespace rigtk
