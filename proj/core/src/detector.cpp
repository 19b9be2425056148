#include "bitewatch/detector.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace bitewatch {

void DetectorParams::check() const {
  const bool ok = std::isfinite(t1) && std::isfinite(t2) && std::isfinite(t3) &&
                  std::isfinite(t4) && t1 > 0.0 && t2 > 0.0 && t3 >= 0.0 && t4 >= 0.0;
  if (!ok) throw ContractViolation("invalid detector parameters: " + describe());
}

std::string DetectorParams::describe() const {
  return fmt::format("t1={} t2={} t3={} t4={}", t1, t2, t3, t4);
}

StepResult step(const DetectorState& state, double t, double vt, const DetectorParams& params) {
  if (!(t > state.last_t)) {
    throw ContractViolation(
        fmt::format("detector step: time {} does not follow previous time {}", t, state.last_t));
  }
  StepResult r{state, std::nullopt};
  DetectorState& st = r.state;
  if (!st.primed) {
    // Keep the t3/t4 guards clear of the first samples.
    st.s = t - (std::max(params.t3, params.t4) + 1.0);
    st.primed = true;
  }
  st.last_t = t;

  if (vt > params.t1 && st.event == DetectorEvent::Idle) {
    st.event = DetectorEvent::RolledPositive;
    st.s = t;
  }
  if (vt < -params.t2 && t - st.s > params.t3 && st.event == DetectorEvent::RolledPositive) {
    r.detection = Detection{t};
    st.s = t;
    st.event = DetectorEvent::Refractory;
  }
  if (st.event == DetectorEvent::Refractory && t - st.s > params.t4) {
    st.event = DetectorEvent::Idle;
  }
  return r;
}

DetectorState reset(const DetectorState&) { return DetectorState{}; }

std::vector<Detection> detect_roll(std::span<const double> times, std::span<const double> roll,
                                   const DetectorParams& params) {
  params.check();
  if (times.size() != roll.size()) {
    throw ContractViolation("detect_roll: times and roll differ in length");
  }
  std::vector<Detection> out;
  DetectorState state;
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto r = step(state, times[i], roll[i], params);
    state = r.state;
    if (r.detection) out.push_back(*r.detection);
  }
  return out;
}

std::vector<Detection> detect_course(const MotionTrace& trace, const DetectorParams& params,
                                     const SmoothingSpec& smoothing) {
  params.check();
  require_valid(trace);
  if (trace.empty()) return {};
  const auto times = trace.times();
  const auto roll = smooth_channel(times, trace.roll(), smoothing);
  return detect_roll(times, roll, params);
}

Detector::Detector(DetectorParams params) : params_(params) { params_.check(); }

std::optional<Detection> Detector::push(double t, double vt) {
  auto r = step(state_, t, vt, params_);
  state_ = r.state;
  return r.detection;
}

void Detector::reset() { state_ = bitewatch::reset(state_); }

}  // namespace bitewatch
