/* rigtk C API: sensor-rig timing, calibration and ground-truth fusion
 * toolkit. All functions return rigtk_status; on failure a thread-local
 * message is available through rigtk_last_error(). Handles are opaque and
 * must be released with their matching _free function. */

#ifndef RIGTK_H
#define RIGTK_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rigtk_status {
  RIGTK_OK = 0,
  RIGTK_ERR_USAGE = 1,   /* bad arguments */
  RIGTK_ERR_DATA = 2,    /* malformed or inconsistent input data */
  RIGTK_ERR_NOCONV = 3,  /* result carries a non-convergence/divergence flag;
                            outputs are still written */
  RIGTK_ERR_INTERNAL = 4
} rigtk_status;

const char* rigtk_version(void);

/* Thread-local message for the most recent failing call; empty on success. */
const char* rigtk_last_error(void);

/* ---------------------------------------------------------------------- */
/* Trajectory handles                                                      */

typedef struct rigtk_trajectory rigtk_trajectory;

rigtk_status rigtk_trajectory_load_tum(const char* path, rigtk_trajectory** out);
rigtk_status rigtk_trajectory_save_tum(const rigtk_trajectory* traj,
                                       const char* path);
void rigtk_trajectory_free(rigtk_trajectory* traj);

int64_t rigtk_trajectory_size(const rigtk_trajectory* traj);

/* Sample access; quaternion order is x, y, z, w. */
rigtk_status rigtk_trajectory_sample(const rigtk_trajectory* traj, int64_t index,
                                     int64_t* t_ns, double xyz[3],
                                     double quat_xyzw[4]);

/* Interpolated pose at t_ns (translation lerp, rotation slerp). */
rigtk_status rigtk_trajectory_interpolate(const rigtk_trajectory* traj,
                                          int64_t t_ns, double xyz[3],
                                          double quat_xyzw[4]);

/* ---------------------------------------------------------------------- */
/* First-principles timing models                                          */

/* Position error e = v * dt. */
double rigtk_sync_error_linear(double velocity_mps, double dt_s);

/* Arc error e = r * omega * dt, omega in degrees per second. */
double rigtk_sync_error_angular(double range_m, double omega_deg_per_s,
                                double dt_s);

/* Rolling-shutter line readout offset from the first line. Pass
 * line_period_s > 0 to override the exact 1/(fps*slots) period with a
 * rounded datasheet figure. */
rigtk_status rigtk_rolling_shutter_line_time(double fps, int total_line_slots,
                                             int image_lines, int line,
                                             double line_period_s,
                                             double* offset_s);

/* Affine clock model: t + offset + drift_ppm * 1e-6 * t, in nanoseconds. */
int64_t rigtk_clock_sensor_time(int64_t t_ns, int64_t offset_ns,
                                double drift_ppm);

/* ---------------------------------------------------------------------- */
/* File-level drivers (one per CLI subcommand)                             */

/* scenario: path to a scenario JSON, or "preset:<name>" for a built-in.
 * Writes imu.csv, tps.csv, gt.tum and scenario.json into out_dir. Pass
 * has_seed = 0 to keep the scenario's own seed. */
rigtk_status rigtk_synth_run(const char* scenario, const char* out_dir,
                             uint64_t seed, int has_seed);

/* extrinsic_json may be NULL (identity rotation between the streams). */
rigtk_status rigtk_align_imu_run(const char* ref_csv, const char* target_csv,
                                 const char* extrinsic_json, int windows,
                                 double window_s, double resample_hz,
                                 const char* report_json);

rigtk_status rigtk_ptp_report_run(const char* log_csv, const char* out_csv);

/* kind: time_offset | translation_offset | rotation_offset.
 * axis: x|y|z|roll|pitch|yaw. magnitude accepts unit suffixes
 * (ms, s, m, mm, cm, deg, rad); bare numbers are ms / m / deg. */
rigtk_status rigtk_perturb_run(const char* scenario_dir, const char* kind,
                               const char* axis, const char* magnitude,
                               const char* target, const char* out_dir);

rigtk_status rigtk_sweep_run(const char* scenario_dir, const char* kind,
                             const char* axis, const double* magnitudes,
                             size_t n_magnitudes, const char* target,
                             const char* pipeline, const char* out_csv);

/* metric: "ate" | "rte". */
rigtk_status rigtk_eval_run(const char* metric, const char* est_tum,
                            const char* ref_tum, int align, double delta_m,
                            double max_dt_ms, const char* report_json);

/* channel: gyro_x|gyro_y|gyro_z|accel_x|accel_y|accel_z. fit_json may be
 * NULL to skip noise-parameter extraction. */
rigtk_status rigtk_allan_run(const char* imu_csv, const char* channel,
                             const char* curve_csv, const char* fit_json);

rigtk_status rigtk_deadreckon_run(const char* imu_csv, const char* init_json,
                                  const char* out_tum);

rigtk_status rigtk_fuse_run(const char* tps_csv, const char* imu_csv,
                            const char* prism_json, const char* out_tum,
                            const char* sigma_csv);

rigtk_status rigtk_totalrecon_run(const char* samples_json,
                                  const char* out_json);

rigtk_status rigtk_coverage_run(const char* detections_jsonl, int width,
                                int height, const char* grid_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RIGTK_H */
