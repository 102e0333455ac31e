#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rigtk/pose.hpp"
#include "rigtk/series.hpp"
#include "rigtk/synth.hpp"

namespace rigtk {

enum class PerturbationKind { time_offset, translation_offset, rotation_offset };
enum class PerturbationAxis { x, y, z, roll, pitch, yaw };

PerturbationKind perturbation_kind_from_string(const std::string& name);
PerturbationAxis perturbation_axis_from_string(const std::string& name);
std::string to_string(PerturbationKind kind);
std::string to_string(PerturbationAxis axis);

/// Controlled error injection: magnitude is ms for time offsets, meters for
/// translation offsets, degrees for rotation offsets.
struct PerturbationSpec {
  PerturbationKind kind{PerturbationKind::time_offset};
  PerturbationAxis axis{PerturbationAxis::x};
  double magnitude{0.0};
  std::string target{"imu"};

  void validate() const;
};

/// Shifts every timestamp by the offset; data values untouched.
ImuSeries inject_time_offset(const ImuSeries& stream, double offset_ms);
PositionSeries inject_time_offset(const PositionSeries& stream, double offset_ms);

/// Translation added along the named axis of the extrinsic's own frame;
/// rotation right-multiplied as an axis-angle about the named axis.
Extrinsic perturb_extrinsic(const Extrinsic& extrinsic, const PerturbationSpec& spec);

enum class SweepPipeline { deadreckon, fuse };
SweepPipeline sweep_pipeline_from_string(const std::string& name);

struct SweepRow {
  double magnitude{0.0};
  double ate_m{0.0};
  double rte_m{0.0};
  bool diverged{false};
};

struct SweepConfig {
  PerturbationKind kind{PerturbationKind::time_offset};
  PerturbationAxis axis{PerturbationAxis::x};
  std::string target{"imu"};
  SweepPipeline pipeline{SweepPipeline::fuse};
  double rte_delta_m{1.0};
  FusionConfig fusion;
};

/// For each magnitude: perturb the scenario streams, run the internal
/// pipeline, evaluate against ground truth. Divergent rows (ATE beyond 10x
/// the trajectory span) are flagged and the sweep continues.
std::vector<SweepRow> sensitivity_sweep(const ScenarioData& data,
                                        const std::vector<double>& magnitudes,
                                        const SweepConfig& config);

}  // namespace rigtk
