#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bitewatch/detector.hpp"
#include "bitewatch/groundtruth.hpp"
#include "bitewatch/signal.hpp"

namespace bitewatch {

// Result of scoring one course's detections against its ground truth.
// T = pairs, F = false_detections, U = undetected. A metric whose
// denominator is zero is std::nullopt ("undefined").
struct EvalOutcome {
  std::vector<std::pair<Detection, BiteLabel>> pairs;
  std::vector<std::size_t> paired_bite_index;  // parallel to pairs
  std::vector<Detection> false_detections;
  std::vector<BiteLabel> undetected;
  std::optional<double> sensitivity;
  std::optional<double> ppv;

  std::size_t true_count() const { return pairs.size(); }
  std::size_t false_count() const { return false_detections.size(); }
  std::size_t undetected_count() const { return undetected.size(); }
};

// Scores detections by the windowed sweep: detection i owns the open
// interval (t[i-1], t[i+1]) (unbounded for the first and last detection) and
// claims the earliest unpaired bite inside it. Detections without a bite are
// false; bites never claimed are undetected. Throws ContractViolation for
// unsorted input.
EvalOutcome classify(std::span<const Detection> detections, const GroundTruth& actual);

std::optional<double> ratio(std::size_t num, std::size_t den);

struct Totals {
  std::size_t t = 0;
  std::size_t f = 0;
  std::size_t u = 0;

  std::optional<double> sensitivity() const { return ratio(t, t + u); }
  std::optional<double> ppv() const { return ratio(t, t + f); }
  Totals& operator+=(const EvalOutcome& o);
};

struct Participant {
  std::string id;
  std::string gender;
  double age = 0.0;
  std::string ethnicity;
  Hand dominant_hand = Hand::Right;
  double height = 0.0;
  double weight = 0.0;

  friend bool operator==(const Participant&, const Participant&) = default;
};

// One scored course with what stratification needs to know about it.
struct CourseEvaluation {
  std::string course_id;
  std::string participant_id;
  double duration_s = 0.0;
  GroundTruth actual;
  EvalOutcome outcome;
};

enum class GroupBy { Age, Gender, Ethnicity, Container, Utensil, HandUsed, Food };

std::string_view to_string(GroupBy g);
GroupBy parse_group_by(std::string_view s);

// Age bins of the published demographic table.
std::string age_stratum(double age);
// "r-handed using right hand", "l-handed using both hands", ...
std::string hand_used_stratum(Hand dominant, Hand used);

enum class SpbWeighting { Bite, Participant };

struct StratumRow {
  std::string key;
  std::size_t n_participants = 0;
  std::size_t n_bites = 0;
  std::size_t n_detected = 0;
  double sensitivity = 0.0;
  int sensitivity_percent = 0;  // whole percent, half up
  std::optional<double> spb;
  std::optional<long> spb_display;  // whole seconds, half up
};

class UnknownParticipantError : public DataError {
 public:
  UnknownParticipantError(const std::string& course_id, const std::string& participant_id);
};

// Pools bites per stratum. Rows sorted by sensitivity descending, then key
// ascending.
std::vector<StratumRow> stratified_report(std::span<const CourseEvaluation> courses,
                                          std::span<const Participant> participants, GroupBy group_by,
                                          SpbWeighting weighting = SpbWeighting::Bite);

// duration_s / n_bites; nullopt when n_bites is 0. Throws ContractViolation
// for a non-positive duration.
std::optional<double> seconds_per_bite(double duration_s, std::size_t n_bites);

// Sample Pearson coefficient. nullopt when either series has zero variance.
// Throws ContractViolation for mismatched lengths or fewer than 2 points.
std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y);

// Mean Euclidean norm of the 3-axis angular velocity over samples with
// |t - bite_t| <= window_s / 2; nullopt when no sample falls in the window.
std::optional<double> motion_amount(const MotionTrace& trace, double bite_t, double window_s = 2.0);

struct FoodRow {
  std::string food;
  std::size_t n_bites = 0;
  std::size_t n_detected = 0;
  double sensitivity = 0.0;
  std::optional<double> spb;
  std::optional<double> motion;
};

struct FoodAnalysis {
  std::vector<FoodRow> rows;  // sorted by food name
  std::optional<double> sensitivity_vs_spb;
  std::optional<double> sensitivity_vs_motion;
};

// Foods with more than min_bites bites. traces[i] belongs to courses[i].
FoodAnalysis per_food_analysis(std::span<const CourseEvaluation> courses,
                               std::span<const MotionTrace> traces, std::size_t min_bites = 100,
                               double motion_window_s = 2.0);

// Values for one axis of a sweep grid: "6,8" lists values, "8:12:1" is an
// inclusive start:stop:step range.
std::vector<double> parse_grid_axis(std::string_view text);

struct ParamGrid {
  std::vector<double> t1{10.0};
  std::vector<double> t2{10.0};
  std::vector<double> t3{2.0};
  std::vector<double> t4{8.0};

  // Cartesian product, t1 outermost, t4 innermost.
  std::vector<DetectorParams> expand() const;
};

struct SweepCourse {
  MotionTrace trace;
  GroundTruth actual;
};

struct SweepRow {
  DetectorParams params;
  Totals totals;
  std::optional<double> sensitivity;
  std::optional<double> ppv;
};

// Re-runs the detector per grid point over every course and pools the
// classification. Rows follow grid order. Work is spread over `threads`
// workers (0 = hardware concurrency); results do not depend on it.
std::vector<SweepRow> parameter_sweep(std::span<const SweepCourse> courses,
                                      std::span<const DetectorParams> grid,
                                      const SmoothingSpec& smoothing = {}, unsigned threads = 0);

}  // namespace bitewatch
