#include "rigtk/fusion.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "rigtk/errors.hpp"
#include "rigtk/synth.hpp"

namespace rigtk {

std::vector<std::pair<double, double>> detect_dropouts(const PositionSeries& tps,
                                                       double gap_factor) {
  tps.validate();
  if (tps.samples.size() < 2) throw DataError("detect_dropouts: needs >= 2 samples");

  std::vector<double> dts;
  dts.reserve(tps.samples.size() - 1);
  for (std::size_t i = 1; i < tps.samples.size(); ++i) {
    dts.push_back(to_seconds(tps.samples[i].t_ns - tps.samples[i - 1].t_ns));
  }
  std::vector<double> sorted = dts;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double nominal = sorted[sorted.size() / 2];

  std::vector<std::pair<double, double>> gaps;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (dts[i] > gap_factor * nominal) {
      gaps.emplace_back(to_seconds(tps.samples[i].t_ns),
                        to_seconds(tps.samples[i + 1].t_ns));
    }
  }
  return gaps;
}

namespace {

struct KeyState {
  Timestamp t_ns{0};
  Eigen::Quaterniond q{1.0, 0.0, 0.0, 0.0};  // world <- body
  Eigen::Vector3d p{0.0, 0.0, 0.0};
  Eigen::Vector3d v{0.0, 0.0, 0.0};
  Eigen::Vector3d bg{0.0, 0.0, 0.0};
  Eigen::Vector3d ba{0.0, 0.0, 0.0};
};

// Tangent layout per state: [theta(0:2), v(3:5), p(6:8), bg(9:11), ba(12:14)].
constexpr int kStateDim = 15;

struct ImuFactor {
  int k{0};
  PreintegrationResult pre;       // at linearization bias
  Eigen::Vector3d lin_bg{0, 0, 0};
  Eigen::Vector3d lin_ba{0, 0, 0};
  Eigen::Matrix3d j_r_bg;  // d delta / d bias at the linearization point
  Eigen::Matrix3d j_v_bg, j_v_ba;
  Eigen::Matrix3d j_p_bg, j_p_ba;
  double w_r{1.0}, w_v{1.0}, w_p{1.0};  // 1/sigma per block
  double dt{0.0};
};

struct TpsFactor {
  int k{0};
  double alpha{0.0};  // 0 = bound to keyframe k exactly
  bool interpolated{false};
  Eigen::Vector3d meas{0, 0, 0};
  double weight{1.0};
};

struct BiasWalkFactor {
  int k{0};
  double w_bg{1.0}, w_ba{1.0};
};

// IMU samples covering [ta, tb] with linearly interpolated virtual samples
// at the exact boundaries.
std::vector<ImuSample> imu_segment(const ImuSeries& imu, Timestamp ta, Timestamp tb) {
  const auto& s = imu.samples;
  if (ta < s.front().t_ns || tb > s.back().t_ns || tb <= ta) {
    throw DataError("imu segment outside series span");
  }
  auto lower = std::lower_bound(
      s.begin(), s.end(), ta,
      [](const ImuSample& smp, Timestamp t) { return smp.t_ns < t; });
  auto interp_at = [&s](Timestamp t) {
    auto it = std::lower_bound(
        s.begin(), s.end(), t,
        [](const ImuSample& smp, Timestamp tt) { return smp.t_ns < tt; });
    if (it->t_ns == t) return *it;
    const ImuSample& hi = *it;
    const ImuSample& lo = *(it - 1);
    const double a = static_cast<double>(t - lo.t_ns) /
                     static_cast<double>(hi.t_ns - lo.t_ns);
    return ImuSample{t, (1.0 - a) * lo.gyro + a * hi.gyro,
                     (1.0 - a) * lo.accel + a * hi.accel};
  };

  std::vector<ImuSample> seg;
  seg.push_back(interp_at(ta));
  for (auto it = lower; it != s.end() && it->t_ns < tb; ++it) {
    if (it->t_ns > ta) seg.push_back(*it);
  }
  seg.push_back(interp_at(tb));
  return seg;
}

// Preintegration bias Jacobians by central differences around (bg, ba).
void preintegration_bias_jacobians(const std::vector<ImuSample>& seg,
                                   const Eigen::Vector3d& bg,
                                   const Eigen::Vector3d& ba, ImuFactor& f) {
  const double h = 1e-6;
  const Eigen::Quaterniond q0 = f.pre.delta_rotation;
  for (int j = 0; j < 3; ++j) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[j] = h;
    const PreintegrationResult gp = preintegrate(seg, bg + e, ba);
    const PreintegrationResult gm = preintegrate(seg, bg - e, ba);
    f.j_r_bg.col(j) = (so3::log(q0.conjugate() * gp.delta_rotation) -
                       so3::log(q0.conjugate() * gm.delta_rotation)) /
                      (2.0 * h);
    f.j_v_bg.col(j) = (gp.delta_velocity - gm.delta_velocity) / (2.0 * h);
    f.j_p_bg.col(j) = (gp.delta_position - gm.delta_position) / (2.0 * h);
    const PreintegrationResult ap = preintegrate(seg, bg, ba + e);
    const PreintegrationResult am = preintegrate(seg, bg, ba - e);
    f.j_v_ba.col(j) = (ap.delta_velocity - am.delta_velocity) / (2.0 * h);
    f.j_p_ba.col(j) = (ap.delta_position - am.delta_position) / (2.0 * h);
  }
}

class FusionProblem : public LeastSquaresProblem {
 public:
  FusionProblem(std::vector<KeyState> states, std::vector<ImuFactor> imu_factors,
                std::vector<TpsFactor> tps_factors,
                std::vector<BiasWalkFactor> bias_factors,
                const Eigen::Vector3d& prism, const FusionConfig& config)
      : states_(std::move(states)),
        imu_factors_(std::move(imu_factors)),
        tps_factors_(std::move(tps_factors)),
        bias_factors_(std::move(bias_factors)),
        prism_(prism),
        config_(config) {
    residual_dim_ = 9 * static_cast<int>(imu_factors_.size()) +
                    3 * static_cast<int>(tps_factors_.size()) +
                    6 * static_cast<int>(bias_factors_.size()) + 6;  // bias prior
  }

  int tangent_dim() const override {
    return kStateDim * static_cast<int>(states_.size());
  }
  int residual_dim() const { return residual_dim_; }
  const std::vector<KeyState>& states() const { return states_; }
  std::vector<KeyState>& states() { return states_; }

  void evaluate(Eigen::VectorXd& residuals,
                Eigen::SparseMatrix<double>* jacobian) const override {
    residuals.resize(residual_dim_);
    std::vector<Eigen::Triplet<double>> triplets;
    if (jacobian != nullptr) triplets.reserve(residual_dim_ * 24);

    int row = 0;
    for (const ImuFactor& f : imu_factors_) {
      evaluate_imu_factor(f, row, residuals, jacobian ? &triplets : nullptr);
      row += 9;
    }
    for (const TpsFactor& f : tps_factors_) {
      evaluate_tps_factor(f, row, residuals, jacobian ? &triplets : nullptr);
      row += 3;
    }
    for (const BiasWalkFactor& f : bias_factors_) {
      evaluate_bias_factor(f, row, residuals, jacobian ? &triplets : nullptr);
      row += 6;
    }
    evaluate_bias_prior(row, residuals, jacobian ? &triplets : nullptr);
    row += 6;

    if (jacobian != nullptr) {
      jacobian->resize(residual_dim_, tangent_dim());
      jacobian->setFromTriplets(triplets.begin(), triplets.end());
    }
  }

  void apply_step(const Eigen::VectorXd& dx) override {
    for (std::size_t k = 0; k < states_.size(); ++k) {
      const int base = kStateDim * static_cast<int>(k);
      KeyState& s = states_[k];
      s.q = canonical(s.q * so3::exp(dx.segment<3>(base + 0)));
      s.v += dx.segment<3>(base + 3);
      s.p += dx.segment<3>(base + 6);
      s.bg += dx.segment<3>(base + 9);
      s.ba += dx.segment<3>(base + 12);
    }
  }

  void save_state() override { saved_ = states_; }
  void rollback() override { states_ = saved_; }

  /// Prism position predicted at a TPS factor's binding.
  Eigen::Vector3d predict_tps(const TpsFactor& f) const {
    if (!f.interpolated) {
      const KeyState& s = states_[f.k];
      return s.q * prism_ + s.p;
    }
    const KeyState& s0 = states_[f.k];
    const KeyState& s1 = states_[f.k + 1];
    const Eigen::Vector3d p = (1.0 - f.alpha) * s0.p + f.alpha * s1.p;
    const Eigen::Quaterniond q =
        s0.q * so3::exp(f.alpha * so3::log(s0.q.conjugate() * s1.q));
    return q * prism_ + p;
  }

 private:
  void evaluate_imu_factor(const ImuFactor& f, int row, Eigen::VectorXd& residuals,
                           std::vector<Eigen::Triplet<double>>* triplets) const {
    const KeyState& si = states_[f.k];
    const KeyState& sj = states_[f.k + 1];
    const Eigen::Vector3d g = config_.gravity;
    const double dt = f.dt;

    const Eigen::Vector3d dbg = si.bg - f.lin_bg;
    const Eigen::Vector3d dba = si.ba - f.lin_ba;
    const Eigen::Vector3d xi = f.j_r_bg * dbg;
    const Eigen::Quaterniond delta_r_corr = f.pre.delta_rotation * so3::exp(xi);
    const Eigen::Vector3d delta_v = f.pre.delta_velocity + f.j_v_bg * dbg + f.j_v_ba * dba;
    const Eigen::Vector3d delta_p = f.pre.delta_position + f.j_p_bg * dbg + f.j_p_ba * dba;

    const Eigen::Quaterniond q_ij = si.q.conjugate() * sj.q;
    const Eigen::Matrix3d r_i_t = si.q.toRotationMatrix().transpose();

    const Eigen::Vector3d r_rot = so3::log(delta_r_corr.conjugate() * q_ij);
    const Eigen::Vector3d vv = sj.v - si.v - g * dt;
    const Eigen::Vector3d r_vel = r_i_t * vv - delta_v;
    const Eigen::Vector3d pp = sj.p - si.p - si.v * dt - 0.5 * g * dt * dt;
    const Eigen::Vector3d r_pos = r_i_t * pp - delta_p;

    residuals.segment<3>(row + 0) = f.w_r * r_rot;
    residuals.segment<3>(row + 3) = f.w_v * r_vel;
    residuals.segment<3>(row + 6) = f.w_p * r_pos;

    if (triplets == nullptr) return;

    const int bi = kStateDim * f.k;
    const int bj = kStateDim * (f.k + 1);
    const Eigen::Matrix3d jr_inv = so3::right_jacobian_inverse(r_rot);
    const Eigen::Matrix3d a = q_ij.toRotationMatrix();
    const Eigen::Matrix3d m =
        (f.pre.delta_rotation.conjugate() * q_ij).toRotationMatrix();

    auto add_block = [&](int r0, int c0, const Eigen::Matrix3d& blk, double w) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          if (blk(r, c) != 0.0) triplets->emplace_back(row + r0 + r, c0 + c, w * blk(r, c));
        }
      }
    };

    // rotation block
    add_block(0, bi + 0, -jr_inv * a.transpose(), f.w_r);
    add_block(0, bj + 0, jr_inv, f.w_r);
    add_block(0, bi + 9,
              -jr_inv * m.transpose() * so3::right_jacobian(-xi) * f.j_r_bg, f.w_r);
    // velocity block
    add_block(3, bi + 0, so3::hat(r_i_t * vv), f.w_v);
    add_block(3, bi + 3, -r_i_t, f.w_v);
    add_block(3, bj + 3, r_i_t, f.w_v);
    add_block(3, bi + 9, -f.j_v_bg, f.w_v);
    add_block(3, bi + 12, -f.j_v_ba, f.w_v);
    // position block
    add_block(6, bi + 0, so3::hat(r_i_t * pp), f.w_p);
    add_block(6, bi + 3, -r_i_t * dt, f.w_p);
    add_block(6, bi + 6, -r_i_t, f.w_p);
    add_block(6, bj + 6, r_i_t, f.w_p);
    add_block(6, bi + 9, -f.j_p_bg, f.w_p);
    add_block(6, bi + 12, -f.j_p_ba, f.w_p);
  }

  void evaluate_tps_factor(const TpsFactor& f, int row, Eigen::VectorXd& residuals,
                           std::vector<Eigen::Triplet<double>>* triplets) const {
    const Eigen::Vector3d r = predict_tps(f) - f.meas;
    residuals.segment<3>(row) = f.weight * r;
    if (triplets == nullptr) return;

    auto add_block = [&](int c0, const Eigen::Matrix3d& blk) {
      for (int rr = 0; rr < 3; ++rr) {
        for (int cc = 0; cc < 3; ++cc) {
          if (blk(rr, cc) != 0.0) {
            triplets->emplace_back(row + rr, c0 + cc, f.weight * blk(rr, cc));
          }
        }
      }
    };

    if (!f.interpolated) {
      const KeyState& s = states_[f.k];
      const int b = kStateDim * f.k;
      add_block(b + 0, -s.q.toRotationMatrix() * so3::hat(prism_));
      add_block(b + 6, Eigen::Matrix3d::Identity());
      return;
    }

    // Interpolated binding: position blocks are linear, rotation blocks by
    // central differences through the geodesic interpolation.
    const int b0 = kStateDim * f.k;
    const int b1 = kStateDim * (f.k + 1);
    add_block(b0 + 6, (1.0 - f.alpha) * Eigen::Matrix3d::Identity());
    add_block(b1 + 6, f.alpha * Eigen::Matrix3d::Identity());

    const double h = 1e-6;
    FusionProblem* self = const_cast<FusionProblem*>(this);
    for (int which = 0; which < 2; ++which) {
      const int k = f.k + which;
      Eigen::Matrix3d blk;
      Eigen::Quaterniond saved = self->states_[k].q;
      for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[j] = h;
        self->states_[k].q = canonical(saved * so3::exp(e));
        const Eigen::Vector3d rp = predict_tps(f);
        self->states_[k].q = canonical(saved * so3::exp(-e));
        const Eigen::Vector3d rm = predict_tps(f);
        blk.col(j) = (rp - rm) / (2.0 * h);
        self->states_[k].q = saved;
      }
      add_block((which == 0 ? b0 : b1) + 0, blk);
    }
  }

  void evaluate_bias_factor(const BiasWalkFactor& f, int row,
                            Eigen::VectorXd& residuals,
                            std::vector<Eigen::Triplet<double>>* triplets) const {
    const KeyState& si = states_[f.k];
    const KeyState& sj = states_[f.k + 1];
    residuals.segment<3>(row + 0) = f.w_bg * (sj.bg - si.bg);
    residuals.segment<3>(row + 3) = f.w_ba * (sj.ba - si.ba);
    if (triplets == nullptr) return;
    const int bi = kStateDim * f.k;
    const int bj = kStateDim * (f.k + 1);
    for (int j = 0; j < 3; ++j) {
      triplets->emplace_back(row + j, bi + 9 + j, -f.w_bg);
      triplets->emplace_back(row + j, bj + 9 + j, f.w_bg);
      triplets->emplace_back(row + 3 + j, bi + 12 + j, -f.w_ba);
      triplets->emplace_back(row + 3 + j, bj + 12 + j, f.w_ba);
    }
  }

  void evaluate_bias_prior(int row, Eigen::VectorXd& residuals,
                           std::vector<Eigen::Triplet<double>>* triplets) const {
    const double w_bg = 1.0 / config_.prior_gyro_bias_sigma;
    const double w_ba = 1.0 / config_.prior_accel_bias_sigma;
    residuals.segment<3>(row + 0) = w_bg * states_[0].bg;
    residuals.segment<3>(row + 3) = w_ba * states_[0].ba;
    if (triplets == nullptr) return;
    for (int j = 0; j < 3; ++j) {
      triplets->emplace_back(row + j, 9 + j, w_bg);
      triplets->emplace_back(row + 3 + j, 12 + j, w_ba);
    }
  }

  std::vector<KeyState> states_;
  std::vector<KeyState> saved_;
  std::vector<ImuFactor> imu_factors_;
  std::vector<TpsFactor> tps_factors_;
  std::vector<BiasWalkFactor> bias_factors_;
  Eigen::Vector3d prism_;
  FusionConfig config_;
  int residual_dim_{0};
};

std::vector<ImuFactor> build_imu_factors(const ImuSeries& imu,
                                         const std::vector<KeyState>& states,
                                         const FusionConfig& config) {
  const double gyro_density = std::max(config.gyro_noise_density, 1e-8);
  const double accel_density = std::max(config.accel_noise_density, 1e-8);
  std::vector<ImuFactor> factors;
  factors.reserve(states.size() - 1);
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    ImuFactor f;
    f.k = static_cast<int>(k);
    const std::vector<ImuSample> seg =
        imu_segment(imu, states[k].t_ns, states[k + 1].t_ns);
    f.lin_bg = states[k].bg;
    f.lin_ba = states[k].ba;
    f.pre = preintegrate(seg, f.lin_bg, f.lin_ba);
    preintegration_bias_jacobians(seg, f.lin_bg, f.lin_ba, f);
    f.dt = f.pre.duration_s;
    const double sqdt = std::sqrt(f.dt);
    f.w_r = 1.0 / (gyro_density * sqdt);
    f.w_v = 1.0 / (accel_density * sqdt);
    f.w_p = 1.0 / (accel_density * f.dt * sqdt / std::sqrt(3.0));
    factors.push_back(std::move(f));
  }
  return factors;
}

}  // namespace

FusedTrajectory fuse_tps_imu(const PositionSeries& tps, const ImuSeries& imu,
                             const Eigen::Vector3d& prism_in_body,
                             const FusionConfig& config) {
  tps.validate();
  imu.validate();
  if (tps.samples.size() < 2) throw DataError("fuse: needs >= 2 TPS samples");
  if (imu.nominal_rate_hz < 5.0 * config.keyframe_rate_hz) {
    throw DataError("fuse: IMU rate must be at least 5x the keyframe rate");
  }

  const Timestamp t0 = std::max(imu.start_ns(), tps.start_ns());
  const Timestamp t_end = std::min(imu.end_ns(), tps.end_ns());
  if (t_end <= t0) throw DataError("fuse: TPS and IMU spans do not overlap");

  const double span_s = to_seconds(t_end - t0);
  const int n_keyframes = static_cast<int>(span_s * config.keyframe_rate_hz) + 1;
  if (n_keyframes < 3) throw DataError("fuse: overlap too short");

  // --- initialization -----------------------------------------------------
  std::vector<KeyState> states(n_keyframes);
  for (int k = 0; k < n_keyframes; ++k) {
    states[k].t_ns = t0 + from_seconds(k / config.keyframe_rate_hz);
  }

  // Roll/pitch from the early accelerometer mean (gravity alignment).
  Eigen::Vector3d accel_mean = Eigen::Vector3d::Zero();
  int accel_count = 0;
  for (const ImuSample& s : imu.samples) {
    if (to_seconds(s.t_ns - imu.start_ns()) > config.init_gravity_align_s) break;
    accel_mean += s.accel;
    ++accel_count;
  }
  if (accel_count == 0) throw DataError("fuse: no IMU samples in init window");
  accel_mean /= accel_count;
  Eigen::Quaterniond q0 = Eigen::Quaterniond::FromTwoVectors(
      accel_mean, Eigen::Vector3d::UnitZ());

  // Orientation chain: gyro midpoint integration sampled at keyframe times.
  {
    Eigen::Quaterniond q = q0;
    int k = 0;
    const auto& s = imu.samples;
    // advance to t0
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i + 1].t_ns <= t0) ++i;
    Timestamp t_prev = t0;
    Eigen::Vector3d w_prev =
        s[std::min(i, s.size() - 1)].gyro;  // nearest sample's rate
    while (k < n_keyframes && states[k].t_ns <= t_prev) {
      states[k].q = canonical(q);
      ++k;
    }
    for (std::size_t idx = i; idx + 1 < s.size() && k < n_keyframes; ++idx) {
      if (s[idx + 1].t_ns <= t_prev) continue;
      const Timestamp t_next = s[idx + 1].t_ns;
      const Eigen::Vector3d w_next = s[idx + 1].gyro;
      while (k < n_keyframes && states[k].t_ns <= t_next) {
        const double dt = to_seconds(states[k].t_ns - t_prev);
        states[k].q = canonical(q * so3::exp(0.5 * (w_prev + w_next) * dt));
        ++k;
      }
      const double dt = to_seconds(t_next - t_prev);
      q = (q * so3::exp(0.5 * (w_prev + w_next) * dt)).normalized();
      t_prev = t_next;
      w_prev = w_next;
    }
    for (; k < n_keyframes; ++k) states[k].q = canonical(q);
  }

  // Positions from TPS interpolation minus the rotated prism lever arm.
  {
    const auto& ts = tps.samples;
    auto tps_at = [&ts](Timestamp t) {
      if (t <= ts.front().t_ns) return ts.front().position;
      if (t >= ts.back().t_ns) return ts.back().position;
      auto it = std::lower_bound(
          ts.begin(), ts.end(), t,
          [](const PositionSample& smp, Timestamp tt) { return smp.t_ns < tt; });
      if (it->t_ns == t) return it->position;
      const PositionSample& hi = *it;
      const PositionSample& lo = *(it - 1);
      const double a = static_cast<double>(t - lo.t_ns) /
                       static_cast<double>(hi.t_ns - lo.t_ns);
      return Eigen::Vector3d((1.0 - a) * lo.position + a * hi.position);
    };
    for (KeyState& s : states) {
      s.p = tps_at(s.t_ns) - s.q * prism_in_body;
    }
    for (int k = 0; k < n_keyframes; ++k) {
      const int k0 = std::max(0, k - 1);
      const int k1 = std::min(n_keyframes - 1, k + 1);
      const double dt = to_seconds(states[k1].t_ns - states[k0].t_ns);
      states[k].v = (states[k1].p - states[k0].p) / dt;
    }
  }

  // --- factors -------------------------------------------------------------
  const double gyro_bi = std::max(config.gyro_bias_instability, 1e-10);
  const double accel_bi = std::max(config.accel_bias_instability, 1e-10);
  std::vector<BiasWalkFactor> bias_factors;
  for (int k = 0; k + 1 < n_keyframes; ++k) {
    const double dt = to_seconds(states[k + 1].t_ns - states[k].t_ns);
    BiasWalkFactor f;
    f.k = k;
    f.w_bg = 1.0 / (gyro_bi * std::sqrt(dt));
    f.w_ba = 1.0 / (accel_bi * std::sqrt(dt));
    bias_factors.push_back(f);
  }

  std::vector<TpsFactor> tps_factors;
  const double tps_sigma = std::max(config.tps_sigma_m, 1e-9);
  const double period_s = 1.0 / config.keyframe_rate_hz;
  for (const PositionSample& m : tps.samples) {
    if (m.t_ns < states.front().t_ns || m.t_ns > states.back().t_ns) continue;
    const double rel = to_seconds(m.t_ns - states.front().t_ns);
    const int nearest =
        std::clamp(static_cast<int>(std::lround(rel * config.keyframe_rate_hz)), 0,
                   n_keyframes - 1);
    const double dt_near = std::abs(to_seconds(m.t_ns - states[nearest].t_ns));
    TpsFactor f;
    f.meas = m.position;
    f.weight = 1.0 / tps_sigma;
    if (dt_near < 0.5 * period_s - 1e-12) {
      f.k = nearest;
      f.alpha = 0.0;
      f.interpolated = false;
    } else {
      const int k = std::min(static_cast<int>(rel * config.keyframe_rate_hz),
                             n_keyframes - 2);
      f.k = k;
      f.alpha = to_seconds(m.t_ns - states[k].t_ns) /
                to_seconds(states[k + 1].t_ns - states[k].t_ns);
      f.interpolated = true;
    }
    tps_factors.push_back(f);
  }
  if (tps_factors.empty()) throw DataError("fuse: no TPS measurement in span");

  // --- solve, with optional bias re-linearization passes -------------------
  FusedTrajectory out;
  out.dropouts = detect_dropouts(tps);

  std::vector<ImuFactor> imu_factors = build_imu_factors(imu, states, config);
  FusionProblem problem(std::move(states), std::move(imu_factors), tps_factors,
                        bias_factors, prism_in_body, config);
  LmReport lm = solve_levenberg_marquardt(problem, config.lm);

  for (int pass = 0; pass < config.relinearize_passes; ++pass) {
    double max_bias_shift = 0.0;
    for (const KeyState& s : problem.states()) {
      max_bias_shift = std::max(max_bias_shift, s.bg.norm() + s.ba.norm());
    }
    if (max_bias_shift < 1e-8) break;
    std::vector<KeyState> current = problem.states();
    std::vector<ImuFactor> refreshed = build_imu_factors(imu, current, config);
    problem = FusionProblem(std::move(current), std::move(refreshed), tps_factors,
                            bias_factors, prism_in_body, config);
    lm = solve_levenberg_marquardt(problem, config.lm);
  }

  out.lm_report = lm;
  out.converged = lm.converged;

  // --- marginal position sigmas from the undamped information --------------
  {
    Eigen::VectorXd residuals;
    Eigen::SparseMatrix<double> jac;
    problem.evaluate(residuals, &jac);
    Eigen::SparseMatrix<double> info = jac.transpose() * jac;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(info);
    if (ldlt.info() != Eigen::Success ||
        (ldlt.vectorD().array() < 1e-12).any()) {
      out.weak_gauge = true;
      double max_diag = 0.0;
      for (int i = 0; i < info.rows(); ++i) {
        max_diag = std::max(max_diag, info.coeff(i, i));
      }
      Eigen::SparseMatrix<double> reg(info.rows(), info.cols());
      reg.setIdentity();
      info = info + (1e-9 * std::max(max_diag, 1.0)) * reg;
      ldlt.compute(info);
      if (ldlt.info() != Eigen::Success) {
        throw DataError("fuse: information matrix cannot be factorized");
      }
    }
    const int dim = problem.tangent_dim();
    const auto& sts = problem.states();
    out.position_sigma.reserve(sts.size());
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    for (std::size_t k = 0; k < sts.size(); ++k) {
      Eigen::Vector3d sigma;
      for (int j = 0; j < 3; ++j) {
        const int idx = kStateDim * static_cast<int>(k) + 6 + j;
        e.setZero();
        e[idx] = 1.0;
        const Eigen::VectorXd col = ldlt.solve(e);
        sigma[j] = std::sqrt(std::max(col[idx], 0.0));
      }
      out.position_sigma.push_back(sigma);
    }
  }

  Trajectory traj("world", "body");
  for (const KeyState& s : problem.states()) {
    traj.append(s.t_ns, s.q, s.p);
    out.velocity.push_back(s.v);
  }
  out.trajectory = std::move(traj);
  return out;
}

}  // namespace rigtk
