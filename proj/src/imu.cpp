#include "rigtk/imu.hpp"

#include <algorithm>
#include <cmath>

#include "rigtk/errors.hpp"
#include "rigtk/synth.hpp"

namespace rigtk {

std::vector<double> default_taus(std::size_t n_samples, double rate_hz) {
  // Log-spaced, 12 points per decade, capped so the largest tau still has
  // at least 9 overlapping clusters.
  std::vector<double> taus;
  const double tau_min = 1.0 / rate_hz;
  const double tau_max =
      static_cast<double>(n_samples - 9) / (2.0 * rate_hz);
  if (n_samples < 32 || tau_max <= tau_min) {
    throw DataError("series too short for an Allan curve");
  }
  const double step = std::pow(10.0, 1.0 / 12.0);
  for (double tau = tau_min; tau <= tau_max; tau *= step) taus.push_back(tau);
  return taus;
}

AllanCurve allan_deviation(const std::vector<double>& samples, double rate_hz,
                           const std::vector<double>& taus,
                           const std::string& channel) {
  if (!(rate_hz > 0.0)) throw ParameterError("allan: rate must be positive");
  if (samples.size() < 32) throw DataError("allan: series too short");

  const std::size_t n = samples.size();
  // Prefix sums make every cluster average O(1).
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + samples[i];

  AllanCurve curve;
  curve.channel = channel;
  curve.rate_hz = rate_hz;
  bool dropped = false;
  for (double tau : taus) {
    const std::size_t m =
        static_cast<std::size_t>(std::max(1.0, std::round(tau * rate_hz)));
    if (n + 1 < 2 * m + 9) {  // need >= 9 overlapping cluster pairs
      dropped = true;
      continue;
    }
    const std::size_t pairs = n - 2 * m + 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const double y0 = (prefix[k + m] - prefix[k]) / static_cast<double>(m);
      const double y1 = (prefix[k + 2 * m] - prefix[k + m]) / static_cast<double>(m);
      acc += (y1 - y0) * (y1 - y0);
    }
    const double avar = acc / (2.0 * static_cast<double>(pairs));
    curve.points.push_back({static_cast<double>(m) / rate_hz, std::sqrt(avar)});
  }
  if (dropped) {
    log_warning("allan: taus with fewer than 9 clusters dropped");
  }
  if (curve.points.empty()) {
    throw DataError("allan: no tau with enough clusters");
  }
  return curve;
}

NoiseFit fit_noise_params(const AllanCurve& curve, const NoiseFitConfig& config) {
  if (curve.points.size() < 4) throw DataError("noise fit: too few curve points");
  const double decades = std::log10(curve.points.back().tau_s) -
                         std::log10(curve.points.front().tau_s);
  if (decades < 3.0) {
    throw DataError("noise fit: curve must span at least 3 decades of tau");
  }

  // Positive-sigma points only; a constant channel yields all zeros.
  std::vector<AllanPoint> pts;
  for (const AllanPoint& p : curve.points) {
    if (p.sigma > 0.0) pts.push_back(p);
  }
  if (pts.size() < 4) throw DegenerateError("noise fit: curve is flat");

  // Local log-log slopes; keep points near -1/2 inside the configured band.
  std::vector<const AllanPoint*> slope_region;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (config.slope_tau_min > 0.0 && pts[i].tau_s < config.slope_tau_min) continue;
    if (pts[i].tau_s > config.slope_tau_max) continue;
    const double slope =
        (std::log10(pts[i + 1].sigma) - std::log10(pts[i - 1].sigma)) /
        (std::log10(pts[i + 1].tau_s) - std::log10(pts[i - 1].tau_s));
    if (std::abs(slope + 0.5) <= config.slope_tolerance) {
      slope_region.push_back(&pts[i]);
    }
  }
  if (slope_region.size() < 2) {
    throw DegenerateError("noise fit: no -1/2 slope region found");
  }

  // Fixed-slope fit: log sigma = log N - 0.5 log tau, evaluated at tau = 1 s.
  double acc = 0.0;
  for (const AllanPoint* p : slope_region) {
    acc += std::log10(p->sigma) + 0.5 * std::log10(p->tau_s);
  }
  NoiseFit fit;
  fit.white_noise_density = std::pow(10.0, acc / static_cast<double>(slope_region.size()));
  fit.slope_points = static_cast<int>(slope_region.size());

  const auto min_it = std::min_element(
      pts.begin(), pts.end(),
      [](const AllanPoint& a, const AllanPoint& b) { return a.sigma < b.sigma; });
  fit.bias_instability = min_it->sigma / 0.664;
  fit.bias_instability_tau_s = min_it->tau_s;
  return fit;
}

PreintegrationResult preintegrate(std::span<const ImuSample> segment,
                                  const Eigen::Vector3d& gyro_bias,
                                  const Eigen::Vector3d& accel_bias) {
  if (segment.empty()) throw DataError("preintegrate: empty segment");
  PreintegrationResult r;
  r.used_samples = segment.size();
  if (segment.size() == 1) return r;

  Eigen::Quaterniond dq = Eigen::Quaterniond::Identity();
  Eigen::Vector3d dv = Eigen::Vector3d::Zero();
  Eigen::Vector3d dp = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i + 1 < segment.size(); ++i) {
    const ImuSample& s0 = segment[i];
    const ImuSample& s1 = segment[i + 1];
    if (s1.t_ns <= s0.t_ns) throw DataError("preintegrate: non-monotone timestamps");
    const double dt = to_seconds(s1.t_ns - s0.t_ns);
    const Eigen::Vector3d w = 0.5 * (s0.gyro + s1.gyro) - gyro_bias;
    const Eigen::Quaterniond dq_next = (dq * so3::exp(w * dt)).normalized();
    const Eigen::Vector3d a =
        0.5 * (dq * (s0.accel - accel_bias) + dq_next * (s1.accel - accel_bias));
    dp += dv * dt + 0.5 * a * dt * dt;
    dv += a * dt;
    dq = dq_next;
  }
  r.delta_rotation = canonical(dq);
  r.delta_velocity = dv;
  r.delta_position = dp;
  r.duration_s = to_seconds(segment.back().t_ns - segment.front().t_ns);
  if (r.duration_s > 10.0) {
    log_warning("preintegrate: segment longer than 10 s, expect drift");
  }
  return r;
}

Trajectory dead_reckon(const ImuSeries& imu, const NavState& init,
                       const Eigen::Vector3d& gravity) {
  imu.validate();
  const double period_s =
      imu.nominal_rate_hz > 0.0 ? 1.0 / imu.nominal_rate_hz : 0.0;
  if (period_s > 0.0 &&
      std::abs(to_seconds(init.t_ns - imu.start_ns())) > period_s) {
    throw DataError("dead_reckon: init state not within one sample of series start");
  }

  Trajectory traj("world", "body");
  Eigen::Quaterniond q = init.pose.rotation;
  Eigen::Vector3d p = init.pose.translation;
  Eigen::Vector3d v = init.velocity;

  const auto& s = imu.samples;
  traj.append(s.front().t_ns, q, p);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double dt = to_seconds(s[i + 1].t_ns - s[i].t_ns);
    const Eigen::Vector3d w = 0.5 * (s[i].gyro + s[i + 1].gyro) - init.gyro_bias;
    const Eigen::Quaterniond q_next = canonical(q * so3::exp(w * dt));
    const Eigen::Vector3d a0 = q * (s[i].accel - init.accel_bias) + gravity;
    const Eigen::Vector3d a1 = q_next * (s[i + 1].accel - init.accel_bias) + gravity;
    const Eigen::Vector3d a = 0.5 * (a0 + a1);
    p += v * dt + 0.5 * a * dt * dt;
    v += a * dt;
    q = q_next;
    traj.append(s[i + 1].t_ns, q, p);
  }
  return traj;
}

}  // namespace rigtk
