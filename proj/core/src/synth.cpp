#include "bitewatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace bitewatch::synth {
namespace {

// Margin that keeps a gesture clear of the course edge after smoothing.
constexpr double kEdgeMargin = 0.6;
// Accelerometer noise in g per deg/s of gyro noise.
constexpr double kAccelNoiseScale = 1e-3;

void add_lobe(std::vector<double>& roll, double rate_hz, double centre, double amp, double fwhm) {
  const auto n = static_cast<long>(roll.size());
  const long lo = std::max(0L, static_cast<long>(std::floor((centre - fwhm) * rate_hz)));
  const long hi = std::min(n - 1, static_cast<long>(std::ceil((centre + fwhm) * rate_hz)));
  for (long i = lo; i <= hi; ++i) {
    const double d = static_cast<double>(i) / rate_hz - centre;
    if (std::abs(d) >= fwhm) continue;
    roll[static_cast<std::size_t>(i)] += amp * 0.5 * (1.0 + std::cos(std::numbers::pi * d / fwhm));
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over (seed, index).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void GestureTemplate::check() const {
  if (!(pos_amp > 0.0) || !(neg_amp > 0.0)) {
    throw ContractViolation(fmt::format("gesture amplitudes must be > 0 ({}, {})", pos_amp, neg_amp));
  }
  if (!(lobe_dur_s > 0.0) || !(lobe_gap_s > 0.0)) {
    throw ContractViolation(
        fmt::format("gesture lobe duration and gap must be > 0 ({}, {})", lobe_dur_s, lobe_gap_s));
  }
}

void MealScript::check() const {
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
    throw ContractViolation(fmt::format("script {}: duration must be >= 0", course_id));
  }
  if (!(noise_std >= 0.0)) throw ContractViolation(fmt::format("script {}: noise_std must be >= 0", course_id));
  for (std::size_t i = 0; i < bites.size(); ++i) {
    const auto& b = bites[i];
    b.gesture.check();
    if (b.t - b.gesture.lead() < 0.0 || b.t + b.gesture.lobe_dur_s > duration_s) {
      throw ContractViolation(fmt::format("script {}: gesture for bite at {} leaves the course [0, {}]",
                                          course_id, b.t, duration_s));
    }
    if (i == 0) continue;
    const auto& prev = bites[i - 1];
    if (!(b.t > prev.t)) {
      throw ContractViolation(fmt::format("script {}: bite times must strictly increase at {}", course_id, i));
    }
    if (prev.t + prev.gesture.lobe_dur_s > b.t - b.gesture.lead()) {
      throw ContractViolation(fmt::format("script {}: gestures for bites at {} and {} overlap", course_id,
                                          prev.t, b.t));
    }
  }
  for (const auto& d : distractors) {
    if (!(d.lobe_dur_s > 0.0) || !std::isfinite(d.amp)) {
      throw ContractViolation(fmt::format("script {}: invalid distractor at {}", course_id, d.t));
    }
  }
}

Rendered render(const MealScript& script, std::uint64_t seed, double rate_hz) {
  script.check();
  if (!(rate_hz > 0.0)) throw ContractViolation("render: rate_hz must be > 0");

  const auto n = static_cast<std::size_t>(std::floor(script.duration_s * rate_hz + 1e-9)) + 1;
  std::vector<double> roll(n, 0.0);
  for (const auto& b : script.bites) {
    add_lobe(roll, rate_hz, b.t - b.gesture.lobe_gap_s, b.gesture.pos_amp, b.gesture.lobe_dur_s);
    add_lobe(roll, rate_hz, b.t, -b.gesture.neg_amp, b.gesture.lobe_dur_s);
  }
  for (const auto& d : script.distractors) add_lobe(roll, rate_hz, d.t, d.amp, d.lobe_dur_s);

  Rendered out;
  out.trace.nominal_rate_hz = rate_hz;
  out.trace.samples.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sd = script.noise_std;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = out.trace.samples[i];
    s.t = static_cast<double>(i) / rate_hz;
    s.gyro = {roll[i], 0.0, 0.0};
    s.accel = {0.0, 0.0, 1.0};
    if (sd > 0.0) {
      for (auto& g : s.gyro) g += sd * noise(rng);
      for (auto& a : s.accel) a += sd * kAccelNoiseScale * noise(rng);
    }
  }

  out.truth.course_id = script.course_id;
  for (const auto& b : script.bites) {
    out.truth.bites.push_back(
        BiteLabel{b.t, b.food_id, b.hand, b.utensil, b.container, std::string(kMergedRater)});
  }
  return out;
}

double min_interval(const GestureTemplate& gesture) { return std::max(3.0, gesture.span() + 0.1); }

Corpus cohort(const std::vector<Profile>& profiles, std::uint64_t seed, double rate_hz) {
  Corpus corpus;
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const Profile& prof = profiles[p];
    if (!(prof.spb_mean > 0.0)) {
      throw ContractViolation(fmt::format("profile {}: spb_mean must be > 0", prof.participant.id));
    }
    if (prof.menu.empty()) throw ContractViolation(fmt::format("profile {}: empty menu", prof.participant.id));
    prof.gesture.check();

    std::mt19937_64 rng(mix_seed(seed, 2 * p));
    std::normal_distribution<double> draw(prof.spb_mean, prof.spb_std);
    const double floor_s = min_interval(prof.gesture);
    auto interval = [&] {
      if (prof.spb_std == 0.0) return std::max(prof.spb_mean, floor_s);
      for (int attempt = 0; attempt < 1000; ++attempt) {
        const double v = draw(rng);
        if (v >= floor_s) return v;
      }
      return floor_s;
    };

    MealScript script;
    script.course_id = prof.participant.id + "-c1";
    script.noise_std = prof.noise_std;
    double t = 0.0;
    double first_interval = 0.0;
    for (std::size_t k = 0; k < prof.n_bites; ++k) {
      const double gap = interval();
      if (k == 0) {
        first_interval = gap;
        t = std::max(gap / 2.0, prof.gesture.lead() + kEdgeMargin);
      } else {
        t += gap;
      }
      ScriptedBite bite;
      bite.t = t;
      bite.gesture = prof.gesture;
      bite.food_id = prof.menu[k % prof.menu.size()];
      bite.hand = prof.hand;
      bite.utensil = prof.utensil;
      bite.container = prof.container;
      script.bites.push_back(std::move(bite));
    }
    const double tail = std::max(first_interval / 2.0, prof.gesture.lobe_dur_s + kEdgeMargin);
    script.duration_s = prof.n_bites ? t + tail : prof.spb_mean;

    SynthCourse course;
    course.participant_id = prof.participant.id;
    course.menu = prof.menu;
    course.rendered = render(script, mix_seed(seed, 2 * p + 1), rate_hz);
    course.script = std::move(script);
    corpus.participants.push_back(prof.participant);
    corpus.courses.push_back(std::move(course));
  }
  return corpus;
}

}  // namespace bitewatch::synth
