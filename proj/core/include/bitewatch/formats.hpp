#pragma once

// File formats. Every time value is written with exactly three decimals so
// outputs are byte-reproducible; other reals use the shortest representation
// that round-trips.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bitewatch/detector.hpp"
#include "bitewatch/evaluation.hpp"
#include "bitewatch/groundtruth.hpp"
#include "bitewatch/signal.hpp"
#include "bitewatch/synth.hpp"

namespace bitewatch::io {

namespace fs = std::filesystem;

class MissingFileError : public DataError {
 public:
  explicit MissingFileError(const fs::path& path);
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Whole-file helpers. read_file throws MissingFileError; write_file creates
// parent directories.
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

// Motion CSV: header "t,gx,gy,gz,ax,ay,az", gx is roll. LF line endings.
std::string format_motion_csv(const MotionTrace& trace);
MotionTrace parse_motion_csv(std::string_view text, double nominal_rate_hz = kDefaultRateHz);
MotionTrace read_motion_csv(const fs::path& path, double nominal_rate_hz = kDefaultRateHz);
void write_motion_csv(const fs::path& path, const MotionTrace& trace);

// Labels JSONL: t, food_id, hand, utensil, container, rater_id.
std::string format_labels_jsonl(std::span<const BiteLabel> labels);
std::vector<BiteLabel> parse_labels_jsonl(std::string_view text);
std::vector<BiteLabel> read_labels_jsonl(const fs::path& path);
void write_labels_jsonl(const fs::path& path, std::span<const BiteLabel> labels);

// Detections JSONL: course_id, t, params.
std::string format_detections_jsonl(std::string_view course_id, std::span<const Detection> detections,
                                    const DetectorParams& params);
std::vector<Detection> parse_detections_jsonl(std::string_view text);

// Adjudication decisions JSONL: conflict_id, resolution, judge_id, and for
// resolution "custom" the label fields t/food_id/hand/utensil/container.
std::string format_decision_line(const Adjudication& decision);
Adjudication parse_decision(std::string_view json_text);
std::vector<Adjudication> parse_decisions_jsonl(std::string_view text);
std::vector<Adjudication> read_decisions_jsonl(const fs::path& path);  // absent file = no decisions
void append_decision(const fs::path& path, const Adjudication& decision);

// Conflict list as a JSON array (plain records, no queue status).
std::string format_conflicts_json(std::span<const Conflict> conflicts);
std::vector<Conflict> parse_conflicts_json(std::string_view text);

// Meal script JSON:
// {"course_id", "duration_s", "noise_std",
//  "bites": [{"t", "food_id", "hand", "utensil", "container",
//             "gesture": {"pos_amp","neg_amp","lobe_dur_s","lobe_gap_s"}}],
//  "distractors": [{"t", "amp", "lobe_dur_s"}]}
// Omitted gesture fields take GestureTemplate defaults.
std::string format_script_json(const synth::MealScript& script);
synth::MealScript parse_script_json(std::string_view text);

// Cohort JSON:
// {"profiles": [{"participant": {"id","gender","age","ethnicity","dominant_hand"},
//                "spb_mean", "spb_std", "n_bites", "noise_std", "menu": [...],
//                "hand", "utensil", "container", "gesture": {...}}]}
std::vector<synth::Profile> parse_profiles_json(std::string_view text);

// Stratified report. TSV columns:
// stratum, participants, bites, detected, sensitivity, sensitivity_pct, spb, spb_display
std::string format_report_tsv(GroupBy group_by, std::span<const StratumRow> rows);
std::string format_report_json(GroupBy group_by, std::span<const StratumRow> rows);

// Error-rate table: kind, count, percent.
std::string format_error_report_tsv(std::span<const ErrorRow> rows, std::size_t total_bites);

// Sweep table: t1, t2, t3, t4, T, F, U, sensitivity, ppv.
std::string format_sweep_tsv(std::span<const SweepRow> rows);

// Per-food table followed by the two correlations as comment lines.
std::string format_food_tsv(const FoodAnalysis& analysis);

// Undefined metrics print as "-"; defined ones with six decimals.
std::string format_metric(const std::optional<double>& v);

}  // namespace bitewatch::io
