#include "bitewatch/signal.hpp"

#include <cmath>

#include <fmt/format.h>

namespace bitewatch {
namespace {

// Absorbs rounding when a sample sits exactly on the window edge.
constexpr double kEdgeTolerance = 1e-9;

std::string join_anomalies(const std::vector<Anomaly>& anomalies) {
  std::string msg = "invalid motion trace:";
  for (const auto& a : anomalies) {
    msg += fmt::format(" [{} at {}: {}]", to_string(a.kind), a.index, a.detail);
  }
  return msg;
}

}  // namespace

double MotionTrace::duration() const {
  if (samples.size() < 2) return 0.0;
  return samples.back().t - samples.front().t;
}

std::vector<double> MotionTrace::times() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.t);
  return out;
}

std::vector<double> MotionTrace::roll() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.roll());
  return out;
}

void SmoothingSpec::check() const {
  if (!(window_width_s > 0.0) || !std::isfinite(window_width_s)) {
    throw ContractViolation(fmt::format("window_width_s must be > 0, got {}", window_width_s));
  }
  if (!(sigma_s > 0.0) || !std::isfinite(sigma_s)) {
    throw ContractViolation(fmt::format("sigma_s must be > 0, got {}", sigma_s));
  }
}

std::string to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::NegativeTime: return "negative_time";
    case AnomalyKind::NonFinite: return "non_finite";
    case AnomalyKind::NonMonotonic: return "non_monotonic";
    case AnomalyKind::Gap: return "gap";
    case AnomalyKind::BadRate: return "bad_rate";
  }
  return "unknown";
}

TraceValidationError::TraceValidationError(std::vector<Anomaly> anomalies)
    : DataError(join_anomalies(anomalies)), anomalies_(std::move(anomalies)) {}

std::vector<Anomaly> validate_trace(const MotionTrace& trace) {
  std::vector<Anomaly> out;
  const double rate = trace.nominal_rate_hz;
  const bool rate_ok = rate > 0.0 && std::isfinite(rate);
  if (!rate_ok) {
    out.push_back({AnomalyKind::BadRate, 0, fmt::format("nominal_rate_hz = {}", rate)});
  }
  const double max_gap = rate_ok ? 3.0 / rate : 0.0;

  const auto& s = trace.samples;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i].t)) {
      out.push_back({AnomalyKind::NonFinite, i, "t"});
    } else if (s[i].t < 0.0) {
      out.push_back({AnomalyKind::NegativeTime, i, fmt::format("t = {}", s[i].t)});
    }
    static constexpr const char* kChannels[] = {"gx", "gy", "gz", "ax", "ay", "az"};
    for (int c = 0; c < 3; ++c) {
      if (!std::isfinite(s[i].gyro[c])) out.push_back({AnomalyKind::NonFinite, i, kChannels[c]});
      if (!std::isfinite(s[i].accel[c])) out.push_back({AnomalyKind::NonFinite, i, kChannels[3 + c]});
    }
    if (i == 0 || !std::isfinite(s[i].t) || !std::isfinite(s[i - 1].t)) continue;
    const double dt = s[i].t - s[i - 1].t;
    if (!(dt > 0.0)) {
      out.push_back({AnomalyKind::NonMonotonic, i,
                     fmt::format("t[{}] = {} follows t[{}] = {}", i, s[i].t, i - 1, s[i - 1].t)});
    } else if (rate_ok && dt > max_gap) {
      out.push_back({AnomalyKind::Gap, i, fmt::format("gap of {:.3f} s exceeds {:.3f} s", dt, max_gap)});
    }
  }
  return out;
}

void require_valid(const MotionTrace& trace) {
  auto anomalies = validate_trace(trace);
  if (!anomalies.empty()) throw TraceValidationError(std::move(anomalies));
}

KernelWindow smoothing_weights(std::span<const double> times, std::size_t index,
                               const SmoothingSpec& spec) {
  spec.check();
  if (index >= times.size()) {
    throw ContractViolation(fmt::format("kernel index {} out of range {}", index, times.size()));
  }
  const double half = spec.window_width_s / 2.0 + kEdgeTolerance;
  const double centre = times[index];
  std::size_t lo = index;
  while (lo > 0 && centre - times[lo - 1] <= half) --lo;
  std::size_t hi = index;
  while (hi + 1 < times.size() && times[hi + 1] - centre <= half) ++hi;

  KernelWindow w;
  w.first = lo;
  w.weights.reserve(hi - lo + 1);
  const double denom = 2.0 * spec.sigma_s * spec.sigma_s;
  double total = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) {
    const double d = times[j] - centre;
    const double v = std::exp(-d * d / denom);
    w.weights.push_back(v);
    total += v;
  }
  for (auto& v : w.weights) v /= total;
  return w;
}

std::vector<double> smooth_channel(std::span<const double> times, std::span<const double> values,
                                   const SmoothingSpec& spec) {
  if (times.size() != values.size()) {
    throw ContractViolation("smooth_channel: times and values differ in length");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto w = smoothing_weights(times, i, spec);
    double acc = 0.0;
    for (std::size_t k = 0; k < w.weights.size(); ++k) acc += w.weights[k] * values[w.first + k];
    out[i] = acc;
  }
  return out;
}

MotionTrace smooth(const MotionTrace& trace, const SmoothingSpec& spec) {
  spec.check();
  MotionTrace out = trace;
  if (trace.empty()) return out;

  const auto times = trace.times();
  const auto& in = trace.samples;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto w = smoothing_weights(times, i, spec);
    std::array<double, 3> g{};
    std::array<double, 3> a{};
    for (std::size_t k = 0; k < w.weights.size(); ++k) {
      const auto& src = in[w.first + k];
      for (int c = 0; c < 3; ++c) {
        g[c] += w.weights[k] * src.gyro[c];
        a[c] += w.weights[k] * src.accel[c];
      }
    }
    out.samples[i].gyro = g;
    out.samples[i].accel = a;
  }
  return out;
}

}  // namespace bitewatch
