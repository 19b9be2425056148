#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitewatch/evaluation.hpp"
#include "bitewatch/groundtruth.hpp"
#include "bitewatch/signal.hpp"

namespace bitewatch::synth {

// Roll-velocity shape of one bite: a raised-cosine positive lobe followed,
// lobe_gap_s later (peak to peak), by a negative lobe. lobe_dur_s is each
// lobe's width at half amplitude; its support is twice that.
struct GestureTemplate {
  double pos_amp = 30.0;  // deg/s
  double neg_amp = 30.0;  // deg/s
  double lobe_dur_s = 0.5;
  double lobe_gap_s = 2.5;

  void check() const;
  // Time from the start of the positive lobe to the end of the negative one.
  double span() const { return lobe_gap_s + 2.0 * lobe_dur_s; }
  // How far before the bite time the gesture starts.
  double lead() const { return lobe_gap_s + lobe_dur_s; }

  friend bool operator==(const GestureTemplate&, const GestureTemplate&) = default;
};

struct ScriptedBite {
  double t = 0.0;  // bite time = negative lobe peak
  GestureTemplate gesture;
  std::string food_id = "cheese pizza";
  Hand hand = Hand::Right;
  Utensil utensil = Utensil::Fork;
  Container container = Container::Plate;

  friend bool operator==(const ScriptedBite&, const ScriptedBite&) = default;
};

// A single raised-cosine roll lobe that is not part of a bite (napkin,
// phone). Negative amplitude gives a negative lobe, so a positive/negative
// pair can be scripted to imitate a bite.
struct Distractor {
  double t = 0.0;  // lobe peak
  double amp = 30.0;
  double lobe_dur_s = 0.5;

  friend bool operator==(const Distractor&, const Distractor&) = default;
};

struct MealScript {
  std::string course_id = "course";
  double duration_s = 60.0;
  std::vector<ScriptedBite> bites;  // strictly increasing t within [0, duration_s]
  double noise_std = 0.0;           // deg/s on the gyro channels
  std::vector<Distractor> distractors;

  void check() const;

  friend bool operator==(const MealScript&, const MealScript&) = default;
};

struct Rendered {
  MotionTrace trace;
  GroundTruth truth;
};

// Samples the script at rate_hz from t = 0 through duration_s. The result
// depends only on (script, rate_hz, seed). Throws ContractViolation when
// gestures overlap or leave the course.
Rendered render(const MealScript& script, std::uint64_t seed, double rate_hz = kDefaultRateHz);

// A template for one simulated participant.
struct Profile {
  Participant participant;
  double spb_mean = 15.0;
  double spb_std = 0.0;
  std::size_t n_bites = 20;
  GestureTemplate gesture;
  double noise_std = 0.0;
  std::vector<std::string> menu{"cheese pizza"};  // bites cycle through the menu
  Hand hand = Hand::Right;
  Utensil utensil = Utensil::Fork;
  Container container = Container::Plate;
};

struct SynthCourse {
  std::string participant_id;
  MealScript script;
  Rendered rendered;
  std::vector<std::string> menu;
};

struct Corpus {
  std::vector<Participant> participants;
  std::vector<SynthCourse> courses;
};

// One course per profile. Inter-bite intervals are normal(spb_mean,
// spb_std) truncated below at max(3 s, gesture span + 0.1 s); the course is
// padded by half an interval on each side so duration / n_bites equals the
// mean drawn interval whenever the padding covers the gesture lead-in.
Corpus cohort(const std::vector<Profile>& profiles, std::uint64_t seed, double rate_hz = kDefaultRateHz);

// Smallest inter-bite interval cohort() will draw for a gesture.
double min_interval(const GestureTemplate& gesture);

}  // namespace bitewatch::synth
