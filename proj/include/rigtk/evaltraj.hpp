#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rigtk/pose.hpp"
#include "rigtk/trajectory.hpp"

namespace rigtk {

/// Nearest-neighbor matches in time, unique on both sides, pairs with
/// |dt| beyond the gate discarded. Throws DataError when nothing matches.
std::vector<std::pair<std::size_t, std::size_t>> associate(
    const Trajectory& est, const Trajectory& ref, double max_dt_ms = 10.0);

struct UmeyamaResult {
  Pose transform;  // maps est points onto ref
  double scale{1.0};
};

/// Least-squares rigid (or similarity) transform minimizing
/// sum || ref - T * est ||^2. Needs >= 3 non-collinear pairs.
UmeyamaResult umeyama_align(const std::vector<Eigen::Vector3d>& est,
                            const std::vector<Eigen::Vector3d>& ref,
                            bool with_scale = false);

struct MetricReport {
  double mean{0.0};
  double stddev{0.0};
  double rmse{0.0};
  double median{0.0};
  double max{0.0};
  std::size_t pairs{0};
  std::string alignment;        // "umeyama" or "none"
  double association_max_dt_ms{0.0};
  double rte_delta_m{0.0};      // 0 for ATE reports
};

/// Absolute trajectory error: translational residual norms after
/// association and optional rigid alignment.
MetricReport ate(const Trajectory& est, const Trajectory& ref, bool align = true,
                 double max_dt_ms = 10.0);

/// Relative trajectory error per `delta_m` meters traveled along the
/// reference: for each matched pose, the first later pose at >= delta_m
/// path distance closes an interval; the translational norm of
/// rel_ref^-1 o rel_est is reported.
MetricReport rte(const Trajectory& est, const Trajectory& ref, double delta_m = 1.0,
                 double max_dt_ms = 10.0);

}  // namespace rigtk
