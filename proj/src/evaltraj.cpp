#include "rigtk/evaltraj.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "rigtk/errors.hpp"

namespace rigtk {

namespace {

MetricReport report_from_errors(std::vector<double> errors) {
  MetricReport r;
  r.pairs = errors.size();
  if (errors.empty()) return r;
  const double sum = std::accumulate(errors.begin(), errors.end(), 0.0);
  r.mean = sum / static_cast<double>(errors.size());
  double sq = 0.0, var = 0.0;
  for (double e : errors) {
    sq += e * e;
    var += (e - r.mean) * (e - r.mean);
  }
  r.rmse = std::sqrt(sq / static_cast<double>(errors.size()));
  r.stddev = std::sqrt(var / static_cast<double>(errors.size()));
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  r.median = (n % 2 == 1) ? errors[n / 2]
                          : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
  r.max = errors.back();
  return r;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> associate(const Trajectory& est,
                                                           const Trajectory& ref,
                                                           double max_dt_ms) {
  if (est.empty() || ref.empty()) throw DataError("associate: empty trajectory");
  const auto& es = est.samples();
  const auto& rs = ref.samples();
  const Timestamp gate_ns = from_seconds(max_dt_ms * 1e-3);

  // Candidate: each est sample against its nearest ref sample in time.
  struct Candidate {
    std::size_t ei, ri;
    Timestamp abs_dt;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(es.size());
  std::size_t r = 0;
  for (std::size_t e = 0; e < es.size(); ++e) {
    while (r + 1 < rs.size() && rs[r + 1].t_ns <= es[e].t_ns) ++r;
    std::size_t best = r;
    if (r + 1 < rs.size() &&
        std::abs(rs[r + 1].t_ns - es[e].t_ns) < std::abs(rs[r].t_ns - es[e].t_ns)) {
      best = r + 1;
    }
    const Timestamp dt = std::abs(rs[best].t_ns - es[e].t_ns);
    if (dt <= gate_ns) candidates.push_back({e, best, dt});
  }

  // Unique matches, closest pairs first.
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.abs_dt < b.abs_dt; });
  std::vector<bool> est_used(es.size(), false), ref_used(rs.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const Candidate& c : candidates) {
    if (est_used[c.ei] || ref_used[c.ri]) continue;
    est_used[c.ei] = true;
    ref_used[c.ri] = true;
    pairs.emplace_back(c.ei, c.ri);
  }
  if (pairs.empty()) {
    throw DataError("associate: no pairs within " + std::to_string(max_dt_ms) + " ms");
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

UmeyamaResult umeyama_align(const std::vector<Eigen::Vector3d>& est,
                            const std::vector<Eigen::Vector3d>& ref,
                            bool with_scale) {
  if (est.size() != ref.size()) throw DataError("umeyama: size mismatch");
  const std::size_t n = est.size();
  if (n < 3) throw DataError("umeyama: needs at least 3 pairs");

  Eigen::Vector3d mean_e = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_r = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mean_e += est[i];
    mean_r += ref[i];
  }
  mean_e /= static_cast<double>(n);
  mean_r /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double var_e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d de = est[i] - mean_e;
    cov += (ref[i] - mean_r) * de.transpose();
    var_e += de.squaredNorm();
  }
  cov /= static_cast<double>(n);
  var_e /= static_cast<double>(n);

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d& sv = svd.singularValues();
  if (sv(1) < 1e-12 * std::max(1.0, sv(0))) {
    throw DegenerateError("umeyama: degenerate (collinear) geometry");
  }
  Eigen::Matrix3d s = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    s(2, 2) = -1.0;
  }
  const Eigen::Matrix3d rot = svd.matrixU() * s * svd.matrixV().transpose();

  UmeyamaResult result;
  result.scale = 1.0;
  if (with_scale) {
    if (var_e <= 0.0) throw DegenerateError("umeyama: zero variance with scale");
    result.scale = (sv(0) * s(0, 0) + sv(1) * s(1, 1) + sv(2) * s(2, 2)) / var_e;
  }
  const Eigen::Vector3d t = mean_r - result.scale * (rot * mean_e);
  result.transform = Pose(Eigen::Quaterniond(rot), t);
  return result;
}

MetricReport ate(const Trajectory& est, const Trajectory& ref, bool align,
                 double max_dt_ms) {
  const auto pairs = associate(est, ref, max_dt_ms);
  std::vector<Eigen::Vector3d> pe, pr;
  pe.reserve(pairs.size());
  pr.reserve(pairs.size());
  for (const auto& [ei, ri] : pairs) {
    pe.push_back(est.samples()[ei].translation);
    pr.push_back(ref.samples()[ri].translation);
  }

  Eigen::Quaterniond rot = Eigen::Quaterniond::Identity();
  Eigen::Vector3d trans = Eigen::Vector3d::Zero();
  if (align && pairs.size() >= 3) {
    const UmeyamaResult u = umeyama_align(pe, pr, false);
    rot = u.transform.rotation;
    trans = u.transform.translation;
  }

  std::vector<double> errors;
  errors.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    errors.push_back((pr[i] - (rot * pe[i] + trans)).norm());
  }
  MetricReport r = report_from_errors(std::move(errors));
  r.alignment = align ? "umeyama" : "none";
  r.association_max_dt_ms = max_dt_ms;
  return r;
}

MetricReport rte(const Trajectory& est, const Trajectory& ref, double delta_m,
                 double max_dt_ms) {
  if (!(delta_m > 0.0)) throw ParameterError("rte: delta_m must be positive");
  const auto pairs = associate(est, ref, max_dt_ms);

  // Cumulative path length along the matched reference poses.
  std::vector<double> dist(pairs.size(), 0.0);
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    dist[i] = dist[i - 1] + (ref.samples()[pairs[i].second].translation -
                             ref.samples()[pairs[i - 1].second].translation)
                                .norm();
  }
  if (dist.back() < delta_m) {
    throw DataError("rte: reference path shorter than delta_m");
  }

  // Metric arithmetic ignores frame labels; the relative error is invariant
  // to the global frame of either input.
  auto rel = [](const TrajectorySample& a, const TrajectorySample& b) {
    const Pose pa(a.rotation, a.translation);
    const Pose pb(b.rotation, b.translation);
    return se3_compose(se3_inverse(pa), pb);
  };

  std::vector<double> errors;
  std::size_t j = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (j < i + 1) j = i + 1;
    while (j < pairs.size() && dist[j] - dist[i] < delta_m) ++j;
    if (j >= pairs.size()) break;
    const Pose ref_rel =
        rel(ref.samples()[pairs[i].second], ref.samples()[pairs[j].second]);
    const Pose est_rel =
        rel(est.samples()[pairs[i].first], est.samples()[pairs[j].first]);
    const Pose err = se3_compose(se3_inverse(ref_rel), est_rel);
    errors.push_back(err.translation.norm());
  }
  if (errors.empty()) throw DataError("rte: no interval reached delta_m");
  MetricReport r = report_from_errors(std::move(errors));
  r.alignment = "none";
  r.association_max_dt_ms = max_dt_ms;
  r.rte_delta_m = delta_m;
  return r;
}

}  // namespace rigtk
