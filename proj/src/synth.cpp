#include "rigtk/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rigtk/errors.hpp"

namespace rigtk {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Vector3d gaussian3(std::mt19937_64& rng, std::normal_distribution<double>& n) {
  return {n(rng), n(rng), n(rng)};
}
}  // namespace

Eigen::Vector3d gravity_vector() { return {0.0, 0.0, -kGravityMagnitude}; }

double DofSignal::value(double t) const {
  double v = offset;
  for (const SinusoidTerm& s : terms) {
    v += s.amplitude * std::sin(kTwoPi * s.frequency_hz * t + s.phase_rad);
  }
  return v;
}

double DofSignal::derivative(double t) const {
  double v = 0.0;
  for (const SinusoidTerm& s : terms) {
    const double w = kTwoPi * s.frequency_hz;
    v += s.amplitude * w * std::cos(w * t + s.phase_rad);
  }
  return v;
}

double DofSignal::second_derivative(double t) const {
  double v = 0.0;
  for (const SinusoidTerm& s : terms) {
    const double w = kTwoPi * s.frequency_hz;
    v -= s.amplitude * w * w * std::sin(w * t + s.phase_rad);
  }
  return v;
}

void AnalyticTrajectory::validate() const {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ParameterError("trajectory duration must be positive and finite");
  }
  auto check_signal = [](const DofSignal& s) {
    if (!std::isfinite(s.offset)) throw ParameterError("non-finite trajectory offset");
    for (const SinusoidTerm& term : s.terms) {
      if (!std::isfinite(term.amplitude) || !std::isfinite(term.frequency_hz) ||
          !std::isfinite(term.phase_rad)) {
        throw ParameterError("non-finite sinusoid parameter");
      }
    }
  };
  for (const DofSignal& s : translation) check_signal(s);
  for (const DofSignal& s : rotation) check_signal(s);
}

Eigen::Vector3d AnalyticTrajectory::position(double t) const {
  return {translation[0].value(t), translation[1].value(t), translation[2].value(t)};
}

Eigen::Vector3d AnalyticTrajectory::velocity(double t) const {
  return {translation[0].derivative(t), translation[1].derivative(t),
          translation[2].derivative(t)};
}

Eigen::Vector3d AnalyticTrajectory::acceleration(double t) const {
  return {translation[0].second_derivative(t), translation[1].second_derivative(t),
          translation[2].second_derivative(t)};
}

Eigen::Quaterniond AnalyticTrajectory::orientation(double t) const {
  const Eigen::Quaterniond qx(
      Eigen::AngleAxisd(rotation[0].value(t), Eigen::Vector3d::UnitX()));
  const Eigen::Quaterniond qy(
      Eigen::AngleAxisd(rotation[1].value(t), Eigen::Vector3d::UnitY()));
  const Eigen::Quaterniond qz(
      Eigen::AngleAxisd(rotation[2].value(t), Eigen::Vector3d::UnitZ()));
  return canonical(qx * qy * qz);
}

Eigen::Vector3d AnalyticTrajectory::body_angular_velocity(double t) const {
  // For R = Rx(a) Ry(b) Rz(c), the body rate is
  //   w = Rz^T Ry^T e_x a' + Rz^T e_y b' + e_z c'.
  const double b = rotation[1].value(t);
  const double c = rotation[2].value(t);
  const Eigen::Matrix3d ry_t =
      Eigen::AngleAxisd(-b, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d rz_t =
      Eigen::AngleAxisd(-c, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return rz_t * ry_t * Eigen::Vector3d::UnitX() * rotation[0].derivative(t) +
         rz_t * Eigen::Vector3d::UnitY() * rotation[1].derivative(t) +
         Eigen::Vector3d::UnitZ() * rotation[2].derivative(t);
}

Pose AnalyticTrajectory::pose(double t, const std::string& frame_from,
                              const std::string& frame_to) const {
  return Pose(orientation(t), position(t), frame_from, frame_to);
}

void ImuNoiseModel::validate() const {
  if (gyro_noise_density < 0.0 || accel_noise_density < 0.0 ||
      gyro_bias_instability < 0.0 || accel_bias_instability < 0.0) {
    throw ParameterError("noise densities must be non-negative");
  }
}

ImuNoiseModel ImuNoiseModel::tier(const std::string& name, std::uint64_t seed) {
  ImuNoiseModel m;
  m.seed = seed;
  const double deg_per_hr = std::numbers::pi / 180.0 / 3600.0;  // to rad/s
  const double milli_g = 1e-3 * kGravityMagnitude;              // to m/s^2
  if (name == "tactical") {
    // HG4930 class: GBI 0.25 deg/hr, ABI 0.025 mg.
    m.gyro_noise_density = 1.2e-5;   // ~0.04 deg/sqrt(hr)
    m.accel_noise_density = 1.5e-4;
    m.gyro_bias_instability = 0.25 * deg_per_hr;
    m.accel_bias_instability = 0.025 * milli_g;
  } else if (name == "industrial") {
    // ADIS16475 class: GBI 2.5 deg/hr, ABI 0.0036 mg.
    m.gyro_noise_density = 6.0e-5;
    m.accel_noise_density = 3.5e-4;
    m.gyro_bias_instability = 2.5 * deg_per_hr;
    m.accel_bias_instability = 0.0036 * milli_g;
  } else if (name == "consumer") {
    // BMI085 class, datasheet-order figures.
    m.gyro_noise_density = 2.4e-4;   // ~0.014 deg/s/sqrt(Hz)
    m.accel_noise_density = 1.2e-3;
    m.gyro_bias_instability = 1.0e-4;
    m.accel_bias_instability = 0.1 * milli_g;
  } else if (name == "none") {
    // all-zero, noiseless
  } else {
    throw UsageError("unknown imu noise tier '" + name + "'");
  }
  return m;
}

Timestamp ClockModel::sensor_time(Timestamp true_t_ns) const {
  const double drift_ns = drift_ppm * static_cast<double>(true_t_ns) / 1e6;
  return true_t_ns + offset_ns + static_cast<Timestamp>(std::llround(drift_ns));
}

std::vector<Timestamp> ClockModel::map_times(
    const std::vector<Timestamp>& true_t_ns) const {
  std::vector<Timestamp> out;
  out.reserve(true_t_ns.size());
  if (jitter_sigma_ns <= 0.0) {
    for (Timestamp t : true_t_ns) out.push_back(sensor_time(t));
    return out;
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> jitter(0.0, jitter_sigma_ns);
  for (Timestamp t : true_t_ns) {
    out.push_back(sensor_time(t) + static_cast<Timestamp>(std::llround(jitter(rng))));
  }
  return out;
}

Trajectory generate_trajectory(const AnalyticTrajectory& params, double sample_rate_hz,
                               const std::string& frame_from,
                               const std::string& frame_to) {
  params.validate();
  if (!(sample_rate_hz > 0.0)) throw ParameterError("sample rate must be positive");
  Trajectory traj(frame_from, frame_to);
  const Timestamp step_ns = from_seconds(1.0 / sample_rate_hz);
  const Timestamp end_ns = from_seconds(params.duration_s);
  for (Timestamp t_ns = 0; t_ns <= end_ns; t_ns += step_ns) {
    const double t = to_seconds(t_ns);
    traj.append(t_ns, params.orientation(t), params.position(t));
  }
  return traj;
}

ImuSeries simulate_imu(const AnalyticTrajectory& traj, const ImuNoiseModel& noise,
                       const ClockModel& clock, double rate_hz,
                       const std::string& label) {
  traj.validate();
  noise.validate();
  if (!(rate_hz > 0.0)) throw ParameterError("imu rate must be positive");

  const double dt = 1.0 / rate_hz;
  const Timestamp step_ns = from_seconds(dt);
  const Timestamp end_ns = from_seconds(traj.duration_s);
  const Eigen::Vector3d g = gravity_vector();

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double gyro_white = noise.gyro_noise_density * std::sqrt(rate_hz);
  const double accel_white = noise.accel_noise_density * std::sqrt(rate_hz);
  const double gyro_bias_step = noise.gyro_bias_instability * std::sqrt(dt);
  const double accel_bias_step = noise.accel_bias_instability * std::sqrt(dt);

  Eigen::Vector3d gyro_bias = noise.initial_gyro_bias;
  Eigen::Vector3d accel_bias = noise.initial_accel_bias;

  ImuSeries series;
  series.nominal_rate_hz = rate_hz;
  series.label = label;
  std::vector<Timestamp> true_times;
  for (Timestamp t_ns = 0; t_ns <= end_ns; t_ns += step_ns) {
    true_times.push_back(t_ns);
  }
  const std::vector<Timestamp> sensor_times = clock.map_times(true_times);

  for (std::size_t i = 0; i < true_times.size(); ++i) {
    const double t = to_seconds(true_times[i]);
    const Eigen::Matrix3d r_t = traj.orientation(t).toRotationMatrix().transpose();
    Eigen::Vector3d gyro = traj.body_angular_velocity(t) + gyro_bias;
    Eigen::Vector3d accel = r_t * (traj.acceleration(t) - g) + accel_bias;
    if (gyro_white > 0.0) gyro += gyro_white * gaussian3(rng, unit);
    if (accel_white > 0.0) accel += accel_white * gaussian3(rng, unit);
    if (gyro_bias_step > 0.0) gyro_bias += gyro_bias_step * gaussian3(rng, unit);
    if (accel_bias_step > 0.0) accel_bias += accel_bias_step * gaussian3(rng, unit);
    series.samples.push_back({sensor_times[i], gyro, accel});
  }
  return series;
}

std::vector<std::pair<double, double>> merge_dropouts(
    std::vector<std::pair<double, double>> dropouts) {
  for (auto& d : dropouts) {
    if (d.second < d.first) std::swap(d.first, d.second);
  }
  std::sort(dropouts.begin(), dropouts.end());
  std::vector<std::pair<double, double>> merged;
  bool warned = false;
  for (const auto& d : dropouts) {
    if (!merged.empty() && d.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, d.second);
      if (!warned) {
        log_warning("overlapping dropout intervals merged");
        warned = true;
      }
    } else {
      merged.push_back(d);
    }
  }
  return merged;
}

PositionSeries simulate_tps(const AnalyticTrajectory& traj,
                            const Eigen::Vector3d& prism_in_body, double rate_hz,
                            double noise_sigma_m,
                            const std::vector<std::pair<double, double>>& dropouts,
                            std::uint64_t seed) {
  traj.validate();
  if (!(rate_hz > 0.0)) throw ParameterError("tps rate must be positive");
  if (noise_sigma_m < 0.0) throw ParameterError("tps noise sigma must be >= 0");
  const auto gaps = merge_dropouts(dropouts);
  for (const auto& gap : gaps) {
    if (gap.first < 0.0 || gap.second > traj.duration_s) {
      throw ParameterError("dropout interval outside trajectory duration");
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  PositionSeries series;
  series.noise_sigma_m = noise_sigma_m;
  series.frame = "world";
  const Timestamp step_ns = from_seconds(1.0 / rate_hz);
  const Timestamp end_ns = from_seconds(traj.duration_s);
  for (Timestamp t_ns = 0; t_ns <= end_ns; t_ns += step_ns) {
    const double t = to_seconds(t_ns);
    // Noise is drawn before the dropout gate so the sample sequence is
    // independent of the dropout layout for a fixed seed.
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    if (noise_sigma_m > 0.0) n = noise_sigma_m * gaussian3(rng, unit);
    const bool dropped =
        std::any_of(gaps.begin(), gaps.end(), [t](const std::pair<double, double>& g) {
          return t >= g.first && t < g.second;
        });
    if (dropped) continue;
    const Eigen::Vector3d p =
        traj.orientation(t) * prism_in_body + traj.position(t) + n;
    series.samples.push_back({t_ns, p});
  }
  return series;
}

std::vector<std::pair<Timestamp, Pose>> simulate_detections(
    const AnalyticTrajectory& traj, const Pose& target_pose_world,
    const std::vector<double>& times_s, const DetectionNoise& noise) {
  traj.validate();
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  std::vector<std::pair<Timestamp, Pose>> detections;
  detections.reserve(times_s.size());
  for (double t : times_s) {
    if (t < 0.0 || t > traj.duration_s) {
      throw ParameterError("detection time outside trajectory duration");
    }
    const Pose cam = traj.pose(t, "world", "cam");
    Pose det = se3_compose(se3_inverse(cam), target_pose_world);
    if (noise.translation_sigma_m > 0.0) {
      det.translation += noise.translation_sigma_m * gaussian3(rng, unit);
    }
    if (noise.rotation_sigma_rad > 0.0) {
      det.rotation = canonical(
          det.rotation * so3::exp(noise.rotation_sigma_rad * gaussian3(rng, unit)));
    }
    det.frame_from = "cam";
    det.frame_to = "target";
    detections.emplace_back(from_seconds(t), det);
  }
  return detections;
}

Scenario Scenario::preset(const std::string& name, std::uint64_t seed) {
  Scenario s;
  s.seed = seed;
  // Smooth excited motion; every preset shares it.
  s.trajectory.duration_s = 30.0;
  s.trajectory.translation[0].terms = {{0.8, 0.30, 0.0}};
  s.trajectory.translation[1].terms = {{0.6, 0.45, 1.1}};
  s.trajectory.translation[2].terms = {{0.3, 0.20, 2.3}, {0.05, 1.10, 0.4}};
  s.trajectory.rotation[0].terms = {{0.15, 0.35, 0.3}};
  s.trajectory.rotation[1].terms = {{0.20, 0.25, 1.9}};
  s.trajectory.rotation[2].terms = {{0.40, 0.15, 0.0}, {0.05, 0.90, 0.7}};
  s.prism_in_body = {0.10, -0.05, 0.20};
  s.imu_rate_hz = 400.0;
  s.tps_rate_hz = 20.0;
  s.imu_noise = ImuNoiseModel::tier("tactical", seed + 1);
  s.tps_noise_sigma_m = 5e-4;
  if (name == "default") {
    // no dropouts
  } else if (name == "dropout") {
    s.tps_dropouts = {{4.5, 9.0}, {17.0, 22.0}};
  } else if (name == "noiseless") {
    s.imu_noise = ImuNoiseModel::tier("none");
    s.tps_noise_sigma_m = 0.0;
  } else {
    throw UsageError("unknown scenario preset '" + name + "'");
  }
  s.duration_s = s.trajectory.duration_s;
  return s;
}

ScenarioData render_scenario(const Scenario& scenario) {
  ScenarioData data;
  data.manifest = scenario;
  data.manifest.trajectory.duration_s = scenario.duration_s;
  data.imu = simulate_imu(data.manifest.trajectory, scenario.imu_noise,
                          scenario.imu_clock, scenario.imu_rate_hz);
  data.tps = simulate_tps(data.manifest.trajectory, scenario.prism_in_body,
                          scenario.tps_rate_hz, scenario.tps_noise_sigma_m,
                          scenario.tps_dropouts, scenario.seed + 17);
  data.ground_truth =
      generate_trajectory(data.manifest.trajectory, scenario.gt_rate_hz);
  return data;
}

}  // namespace rigtk
