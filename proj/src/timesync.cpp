#include "rigtk/timesync.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "rigtk/errors.hpp"

namespace rigtk {

namespace {

constexpr double kFlatSignalVariance = 1e-8;

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

// Marching linear interpolation of (t, y) at increasing query times.
class MarchingInterpolator {
 public:
  MarchingInterpolator(const std::vector<Timestamp>& t, const std::vector<double>& y)
      : t_(t), y_(y) {}

  bool covers(Timestamp q) const { return q >= t_.front() && q <= t_.back(); }

  double at(Timestamp q) {
    while (i_ + 2 < t_.size() && t_[i_ + 1] < q) ++i_;
    while (i_ > 0 && t_[i_] > q) --i_;
    const double span = static_cast<double>(t_[i_ + 1] - t_[i_]);
    const double alpha = static_cast<double>(q - t_[i_]) / span;
    return (1.0 - alpha) * y_[i_] + alpha * y_[i_ + 1];
  }

 private:
  const std::vector<Timestamp>& t_;
  const std::vector<double>& y_;
  std::size_t i_{0};
};

}  // namespace

ImuSeries resample_linear(const ImuSeries& series, double rate_hz) {
  if (series.samples.size() < 2) {
    throw DataError("resample needs at least 2 samples");
  }
  if (!(rate_hz > 0.0)) throw ParameterError("resample rate must be positive");

  const Timestamp step_ns = from_seconds(1.0 / rate_hz);
  ImuSeries out;
  out.nominal_rate_hz = rate_hz;
  out.label = series.label;

  const auto& s = series.samples;
  std::size_t lo = 0;
  for (Timestamp t = s.front().t_ns; t <= s.back().t_ns; t += step_ns) {
    while (lo + 2 < s.size() && s[lo + 1].t_ns < t) ++lo;
    const ImuSample& a = s[lo];
    const ImuSample& b = s[lo + 1];
    const double alpha =
        static_cast<double>(t - a.t_ns) / static_cast<double>(b.t_ns - a.t_ns);
    out.samples.push_back({t, (1.0 - alpha) * a.gyro + alpha * b.gyro,
                           (1.0 - alpha) * a.accel + alpha * b.accel});
  }
  return out;
}

double coarse_offset_xcorr(const std::vector<double>& a, const std::vector<double>& b,
                           double rate_hz, double max_lag_ms) {
  if (a.size() < 2 || b.size() < 2) throw DataError("xcorr needs >= 2 samples");
  if (variance_of(a) < kFlatSignalVariance || variance_of(b) < kFlatSignalVariance) {
    throw DegenerateError("flat signal: variance below 1e-8, no correlation peak");
  }
  const int max_lag = std::max(1, static_cast<int>(std::round(max_lag_ms * 1e-3 * rate_hz)));

  double best_corr = -2.0;
  int best_lag = 0;
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    // Pair a[i] with b[i + lag] over the valid overlap.
    const int i0 = std::max(0, -lag);
    const int i1 = std::min(static_cast<int>(a.size()),
                            static_cast<int>(b.size()) - lag);
    const int n = i1 - i0;
    if (n < 8) continue;
    double sa = 0.0, sb = 0.0;
    for (int i = i0; i < i1; ++i) {
      sa += a[i];
      sb += b[i + lag];
    }
    const double ma = sa / n, mb = sb / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (int i = i0; i < i1; ++i) {
      const double da = a[i] - ma;
      const double db = b[i + lag] - mb;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) continue;
    const double corr = sab / std::sqrt(saa * sbb);
    if (corr > best_corr) {
      best_corr = corr;
      best_lag = lag;
    }
  }
  if (best_corr < -1.5) throw DegenerateError("no valid correlation overlap");
  return static_cast<double>(best_lag) / rate_hz * 1e3;
}

namespace {

// MSE between a's samples and b interpolated at a's times shifted by
// +offset. The index window is fixed by the caller so values are
// comparable across offsets.
double shifted_mse(const AxisSignal& a, const AxisSignal& b, std::size_t i0,
                   std::size_t i1, double offset_ms) {
  const Timestamp shift_ns = from_seconds(offset_ms * 1e-3);
  MarchingInterpolator interp(b.t_ns, b.values);
  double acc = 0.0;
  for (std::size_t i = i0; i < i1; ++i) {
    const double d = a.values[i] - interp.at(a.t_ns[i] + shift_ns);
    acc += d * d;
  }
  return acc / static_cast<double>(i1 - i0);
}

}  // namespace

RefineResult refine_offset_mse(const AxisSignal& a, const AxisSignal& b,
                               double init_ms, double tol_ms,
                               double search_halfwidth_ms) {
  if (a.t_ns.size() < 2 || b.t_ns.size() < 2) {
    throw DataError("refine needs >= 2 samples per signal");
  }
  const double lo_ms = init_ms - search_halfwidth_ms;
  const double hi_ms = init_ms + search_halfwidth_ms;
  const Timestamp lo_ns = from_seconds(lo_ms * 1e-3);
  const Timestamp hi_ns = from_seconds(hi_ms * 1e-3);

  // Evaluation window: a-samples whose shifted queries stay inside b for
  // every offset in the search interval.
  std::size_t i0 = 0, i1 = a.t_ns.size();
  while (i0 < i1 && a.t_ns[i0] + lo_ns < b.t_ns.front()) ++i0;
  while (i1 > i0 && a.t_ns[i1 - 1] + hi_ns > b.t_ns.back()) --i1;
  if (i1 - i0 < 16) {
    throw DataError("refine: insufficient overlap for the search interval");
  }

  const double period_ms =
      to_seconds(a.t_ns.back() - a.t_ns.front()) * 1e3 /
      static_cast<double>(a.t_ns.size() - 1);
  const double h = 0.1 * period_ms;  // central-difference step

  RefineResult result;
  double x = init_ms;
  double f = shifted_mse(a, b, i0, i1, x);
  for (int iter = 0; iter < 100; ++iter) {
    result.iterations = iter + 1;
    const double fp = shifted_mse(a, b, i0, i1, std::min(x + h, hi_ms));
    const double fm = shifted_mse(a, b, i0, i1, std::max(x - h, lo_ms));
    const double grad = (fp - fm) / (2.0 * h);
    const double curv = (fp - 2.0 * f + fm) / (h * h);

    double step;
    if (curv > 0.0) {
      step = -grad / curv;
    } else {
      step = (grad > 0.0 ? -1.0 : 1.0) * 2.0 * h;
    }
    step = std::clamp(step, -search_halfwidth_ms / 2.0, search_halfwidth_ms / 2.0);

    // Backtrack until the objective decreases.
    double x_new = std::clamp(x + step, lo_ms, hi_ms);
    double f_new = shifted_mse(a, b, i0, i1, x_new);
    while (f_new > f && std::abs(x_new - x) > tol_ms) {
      step *= 0.5;
      x_new = std::clamp(x + step, lo_ms, hi_ms);
      f_new = shifted_mse(a, b, i0, i1, x_new);
    }
    const double actual_step = std::abs(x_new - x);
    if (f_new <= f) {
      x = x_new;
      f = f_new;
    }
    if (actual_step < tol_ms) {
      result.converged = true;
      break;
    }
  }
  result.offset_ms = x;
  result.final_mse = f;
  return result;
}

OffsetEstimate align_imu_pair(const ImuSeries& a, const ImuSeries& b,
                              const Eigen::Matrix3d& rot_b_to_a,
                              const AlignConfig& config) {
  a.validate();
  b.validate();
  if (config.windows < 1 || !(config.window_s > 0.0)) {
    throw ParameterError("align: windows >= 1 and window_s > 0 required");
  }

  const Timestamp overlap_start = std::max(a.start_ns(), b.start_ns());
  const Timestamp overlap_end = std::min(a.end_ns(), b.end_ns());
  const double overlap_s = to_seconds(overlap_end - overlap_start);
  const double needed_s = config.windows * config.window_s;
  if (overlap_s < needed_s) {
    throw DataError("align: overlap of " + std::to_string(overlap_s) +
                    " s is shorter than " + std::to_string(needed_s) + " s");
  }

  // b's angular velocity expressed in a's frame.
  ImuSeries b_rot = b;
  for (ImuSample& s : b_rot.samples) s.gyro = rot_b_to_a * s.gyro;

  const Timestamp margin_ns =
      from_seconds((config.max_lag_ms + 30.0) * 1e-3);

  OffsetEstimate estimate;
  estimate.windows = config.windows;
  estimate.window_s = config.window_s;
  estimate.resample_rate_hz = config.resample_rate_hz;

  auto slice = [](const ImuSeries& s, Timestamp t0, Timestamp t1) {
    ImuSeries out;
    out.nominal_rate_hz = s.nominal_rate_hz;
    out.label = s.label;
    for (const ImuSample& smp : s.samples) {
      if (smp.t_ns >= t0 && smp.t_ns <= t1) out.samples.push_back(smp);
    }
    return out;
  };

  std::vector<double> all_offsets;
  for (int axis = 0; axis < 3; ++axis) {
    auto& ax = estimate.axes[axis];
    const ImuChannel channel = static_cast<ImuChannel>(axis);  // gyro x..z
    for (int w = 0; w < config.windows; ++w) {
      const Timestamp w0 = overlap_start + from_seconds(w * config.window_s);
      const Timestamp w1 = w0 + from_seconds(config.window_s);
      const ImuSeries a_win = slice(a, w0, w1);
      const ImuSeries b_win = slice(b_rot, w0 - margin_ns, w1 + margin_ns);
      double offset_ms = 0.0;
      bool converged = false;
      try {
        const ImuSeries a_grid = resample_linear(a_win, config.resample_rate_hz);

        AxisSignal a_sig;
        a_sig.t_ns.reserve(a_grid.samples.size());
        for (const ImuSample& smp : a_grid.samples) a_sig.t_ns.push_back(smp.t_ns);
        a_sig.values = extract_channel(a_grid, channel);

        AxisSignal b_sig;
        b_sig.t_ns.reserve(b_win.samples.size());
        b_sig.values.reserve(b_win.samples.size());
        for (const ImuSample& smp : b_win.samples) {
          b_sig.t_ns.push_back(smp.t_ns);
          b_sig.values.push_back(smp.gyro[axis]);
        }
        if (b_sig.t_ns.size() < 2) throw DataError("align: empty target window");

        // b on a's grid for the coarse correlation.
        std::vector<double> b_vals;
        b_vals.reserve(a_sig.t_ns.size());
        MarchingInterpolator interp(b_sig.t_ns, b_sig.values);
        for (Timestamp t : a_sig.t_ns) {
          b_vals.push_back(interp.covers(t) ? interp.at(t) : b_sig.values.front());
        }

        const double coarse = coarse_offset_xcorr(a_sig.values, b_vals,
                                                  config.resample_rate_hz,
                                                  config.max_lag_ms);
        const RefineResult refined =
            refine_offset_mse(a_sig, b_sig, coarse, config.refine_tol_ms);
        offset_ms = refined.offset_ms;
        converged = refined.converged;
      } catch (const Error& e) {
        log_warning("align axis " + std::to_string(axis) + " window " +
                    std::to_string(w) + ": " + e.what());
        ax.window_offsets_ms.push_back(std::nan(""));
        ax.window_converged.push_back(false);
        continue;
      }
      ax.window_offsets_ms.push_back(offset_ms);
      ax.window_converged.push_back(converged);
    }

    std::vector<double> valid;
    for (std::size_t i = 0; i < ax.window_offsets_ms.size(); ++i) {
      if (!std::isnan(ax.window_offsets_ms[i])) valid.push_back(ax.window_offsets_ms[i]);
    }
    ax.converged = std::any_of(ax.window_converged.begin(), ax.window_converged.end(),
                               [](bool c) { return c; });
    if (!valid.empty()) {
      ax.mean_ms = mean_of(valid);
      ax.std_ms = sample_std(valid, ax.mean_ms);
      all_offsets.insert(all_offsets.end(), valid.begin(), valid.end());
    } else {
      ax.mean_ms = std::nan("");
      ax.std_ms = std::nan("");
    }
  }

  std::vector<double> axis_means;
  for (const auto& ax : estimate.axes) {
    if (!std::isnan(ax.mean_ms)) axis_means.push_back(ax.mean_ms);
  }
  if (axis_means.empty()) throw DataError("align: every axis/window failed");
  estimate.grand_mean_ms = mean_of(axis_means);
  estimate.grand_std_ms = sample_std(all_offsets, mean_of(all_offsets));
  estimate.all_axes_converged =
      std::all_of(estimate.axes.begin(), estimate.axes.end(),
                  [](const OffsetEstimate::Axis& ax) { return ax.converged; });
  return estimate;
}

double sync_error_linear(double velocity_mps, double dt_s) {
  if (velocity_mps < 0.0 || dt_s < 0.0) {
    throw ParameterError("sync_error_linear: inputs must be non-negative");
  }
  return velocity_mps * dt_s;
}

double sync_error_angular(double range_m, double omega_deg_per_s, double dt_s) {
  if (range_m < 0.0 || omega_deg_per_s < 0.0 || dt_s < 0.0) {
    throw ParameterError("sync_error_angular: inputs must be non-negative");
  }
  const double omega_rad = omega_deg_per_s * std::numbers::pi / 180.0;
  return range_m * omega_rad * dt_s;
}

double RollingShutterModel::line_time(int line) const {
  return line_time(line, line_period_s());
}

double RollingShutterModel::line_time(int line, double period_s) const {
  if (total_line_slots < image_lines || image_lines < 1) {
    throw ParameterError("rolling shutter: total_line_slots >= image_lines >= 1");
  }
  // The one-past-last index times the full readout.
  if (line < 0 || line > image_lines) {
    throw RangeError("rolling shutter line index out of range");
  }
  return static_cast<double>(line) * period_s;
}

double RollingShutterModel::mid_exposure_time(int line) const {
  return line_time(line) + 0.5 * exposure_s;
}

PtpReport ptp_report(const std::vector<PtpLogEntry>& log) {
  if (log.empty()) throw DataError("ptp report: empty log");

  std::map<std::string, std::vector<PtpLogEntry>> by_source;
  for (const PtpLogEntry& e : log) by_source[e.source].push_back(e);

  PtpReport report;
  for (auto& [source, entries] : by_source) {
    std::sort(entries.begin(), entries.end(),
              [](const PtpLogEntry& x, const PtpLogEntry& y) { return x.t_ns < y.t_ns; });
    PtpSourceReport r;
    r.source = source;
    r.count = entries.size();
    double abs_sum = 0.0;
    for (const PtpLogEntry& e : entries) {
      const double abs_ns = std::abs(e.offset_ns);
      abs_sum += abs_ns;
      r.max_abs_offset_ns = std::max(r.max_abs_offset_ns, abs_ns);
      int bin;
      if (abs_ns < 1e3) {
        bin = 0;
      } else if (abs_ns < 1e4) {
        bin = 1;
      } else if (abs_ns < 1e5) {
        bin = 2;
      } else if (abs_ns < 1e6) {
        bin = 3;
      } else {
        bin = 4;
      }
      r.bin_fractions[bin] += 1.0;
    }
    for (double& f : r.bin_fractions) f /= static_cast<double>(entries.size());
    r.mean_abs_offset_ns = abs_sum / static_cast<double>(entries.size());
    double rate_sum = 0.0;
    std::size_t rate_count = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
      const double dt_s = to_seconds(entries[i].t_ns - entries[i - 1].t_ns);
      if (dt_s <= 0.0) continue;
      const double rate = std::abs(entries[i].offset_ns - entries[i - 1].offset_ns) / dt_s;
      r.max_rate_ns_per_s = std::max(r.max_rate_ns_per_s, rate);
      rate_sum += rate;
      ++rate_count;
    }
    if (rate_count > 0) r.mean_rate_ns_per_s = rate_sum / static_cast<double>(rate_count);
    r.span_ns = entries.back().t_ns - entries.front().t_ns;
    report.sources.push_back(std::move(r));
  }
  return report;
}

}  // namespace rigtk
