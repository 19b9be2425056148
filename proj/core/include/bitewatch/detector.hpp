#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitewatch/signal.hpp"

namespace bitewatch {

// Thresholds of the wrist-roll bite detector. t1/t2 are roll velocities in
// deg/s (t2 is a magnitude: the negative lobe must fall below -t2); t3/t4 are
// seconds.
struct DetectorParams {
  double t1 = 10.0;  // positive roll threshold
  double t2 = 10.0;  // negative roll threshold magnitude
  double t3 = 2.0;   // minimum time from positive roll to negative roll
  double t4 = 8.0;   // minimum time from a bite to re-arming

  void check() const;
  std::string describe() const;

  friend bool operator==(const DetectorParams&, const DetectorParams&) = default;
};

enum class DetectorEvent : int { Idle = 0, RolledPositive = 1, Refractory = 2 };

// State of the machine between samples. `s` is the time of the last
// state-entry event; `primed` is false until the first sample after a reset
// has been seen.
struct DetectorState {
  DetectorEvent event = DetectorEvent::Idle;
  double s = 0.0;
  double last_t = -std::numeric_limits<double>::infinity();
  bool primed = false;

  friend bool operator==(const DetectorState&, const DetectorState&) = default;
};

struct Detection {
  double t = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct StepResult {
  DetectorState state;
  std::optional<Detection> detection;
};

// Advances the machine by one sample. Throws ContractViolation when t does
// not strictly increase.
StepResult step(const DetectorState& state, double t, double vt, const DetectorParams& params);

// Returns the machine to Idle (the watch's start-of-meal button).
DetectorState reset(const DetectorState& state);

// Folds step() over an already-smoothed roll series.
std::vector<Detection> detect_roll(std::span<const double> times, std::span<const double> roll,
                                   const DetectorParams& params);

// Validates, smooths and runs the machine over a whole course from Idle.
// Throws TraceValidationError for an invalid trace.
std::vector<Detection> detect_course(const MotionTrace& trace, const DetectorParams& params = {},
                                     const SmoothingSpec& smoothing = {});

// Streaming wrapper: feed samples one at a time, collect detections as they
// fire. Produces the same detections as detect_roll on the same series.
class Detector {
 public:
  explicit Detector(DetectorParams params = {});

  std::optional<Detection> push(double t, double vt);
  void reset();

  const DetectorState& state() const { return state_; }
  const DetectorParams& params() const { return params_; }

 private:
  DetectorParams params_;
  DetectorState state_;
};

}  // namespace bitewatch
