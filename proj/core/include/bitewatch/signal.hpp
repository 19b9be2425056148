#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bitewatch/error.hpp"

namespace bitewatch {

// One 6-axis wrist motion reading. gyro is angular velocity in deg/s ordered
// (roll, pitch, yaw); accel is in g.
struct MotionSample {
  double t = 0.0;
  std::array<double, 3> gyro{};
  std::array<double, 3> accel{};

  double roll() const { return gyro[0]; }

  friend bool operator==(const MotionSample&, const MotionSample&) = default;
};

inline constexpr double kDefaultRateHz = 15.0;

struct MotionTrace {
  std::vector<MotionSample> samples;
  double nominal_rate_hz = kDefaultRateHz;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
  // Last sample time minus first sample time; 0 for fewer than two samples.
  double duration() const;
  std::vector<double> times() const;
  std::vector<double> roll() const;

  friend bool operator==(const MotionTrace&, const MotionTrace&) = default;
};

// Gaussian window: total support window_width_s centred on the output
// sample, standard deviation sigma_s.
struct SmoothingSpec {
  double window_width_s = 1.0;
  double sigma_s = 2.0 / 3.0;

  void check() const;
};

enum class AnomalyKind { NegativeTime, NonFinite, NonMonotonic, Gap, BadRate };

struct Anomaly {
  AnomalyKind kind;
  std::size_t index = 0;  // offending sample (for Gap/NonMonotonic: the later one)
  std::string detail;

  friend bool operator==(const Anomaly&, const Anomaly&) = default;
};

std::string to_string(AnomalyKind kind);

// Thrown by operations that require a valid trace.
class TraceValidationError : public DataError {
 public:
  explicit TraceValidationError(std::vector<Anomaly> anomalies);
  const std::vector<Anomaly>& anomalies() const { return anomalies_; }

 private:
  std::vector<Anomaly> anomalies_;
};

// Empty result iff the trace satisfies the MotionTrace invariants and no
// inter-sample gap exceeds 3 / nominal_rate_hz.
std::vector<Anomaly> validate_trace(const MotionTrace& trace);

// Throws TraceValidationError when validate_trace reports anything.
void require_valid(const MotionTrace& trace);

// Normalized kernel weights for output sample `index`: weights[k] applies to
// sample first + k. Computed on the actual timestamps and renormalized so
// they sum to 1 even where the window is truncated by the trace boundary.
struct KernelWindow {
  std::size_t first = 0;
  std::vector<double> weights;
};
KernelWindow smoothing_weights(std::span<const double> times, std::size_t index,
                               const SmoothingSpec& spec);

// Convolves every channel independently. Timestamps and length are
// preserved; an empty trace returns an empty trace.
MotionTrace smooth(const MotionTrace& trace, const SmoothingSpec& spec = {});

// Single-channel form of smooth() over (times, values).
std::vector<double> smooth_channel(std::span<const double> times,
                                   std::span<const double> values,
                                   const SmoothingSpec& spec = {});

}  // namespace bitewatch
