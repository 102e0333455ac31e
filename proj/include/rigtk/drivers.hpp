#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rigtk {

// File-level entry points behind the CLI subcommands and the C API. Each
// reads the named inputs, runs the corresponding operations and writes
// machine-readable outputs (JSON for structured reports, CSV for series).
// Returns 0 on success, 3 when a result carries a non-convergence or
// divergence flag; throws rigtk::Error for usage/data problems.

int run_synth(const std::string& scenario_json_or_preset, const std::string& out_dir,
              std::uint64_t seed_override, bool has_seed_override);

int run_align_imu(const std::string& ref_csv, const std::string& target_csv,
                  const std::string& extrinsic_json, int windows, double window_s,
                  double resample_hz, const std::string& report_json);

int run_ptp_report(const std::string& log_csv, const std::string& out_csv);

int run_perturb(const std::string& scenario_dir, const std::string& kind,
                const std::string& axis, const std::string& magnitude,
                const std::string& target, const std::string& out_dir);

int run_sweep(const std::string& scenario_dir, const std::string& kind,
              const std::string& axis, const std::vector<double>& magnitudes,
              const std::string& target, const std::string& pipeline,
              const std::string& out_csv);

int run_eval(const std::string& metric, const std::string& est_tum,
             const std::string& ref_tum, bool align, double delta_m,
             double max_dt_ms, const std::string& report_json);

int run_allan(const std::string& imu_csv, const std::string& channel,
              const std::string& curve_csv, const std::string& fit_json);

int run_deadreckon(const std::string& imu_csv, const std::string& init_json,
                   const std::string& out_tum);

int run_fuse(const std::string& tps_csv, const std::string& imu_csv,
             const std::string& prism_json, const std::string& out_tum,
             const std::string& sigma_csv);

int run_totalrecon(const std::string& samples_json, const std::string& out_json);

int run_coverage(const std::string& detections_jsonl, int width, int height,
                 const std::string& grid_json);

}  // namespace rigtk
