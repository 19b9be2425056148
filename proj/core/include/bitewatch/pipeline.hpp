#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bitewatch/dataset.hpp"

namespace bitewatch::io {

// A loaded dataset plus its rater matches and the adjudication log. Not
// thread-safe; the HTTP service serializes access to it.
class Workbench {
 public:
  explicit Workbench(Dataset dataset, double match_window_s = 1.0);

  const Dataset& dataset() const { return dataset_; }
  const std::vector<Adjudication>& decisions() const { return decisions_; }

  // Conflicts for every course, manifest order.
  const std::vector<Conflict>& conflicts() const { return conflicts_; }
  std::vector<Conflict> open_conflicts() const;
  const Conflict* find_conflict(std::string_view id) const;
  const Adjudication* decision_for(std::string_view conflict_id) const;

  // Draft ground truth with every decided conflict applied.
  GroundTruth ground_truth(std::string_view course_id) const;
  const MatchResult& match(std::string_view course_id) const;

  // Courses that still have open conflicts.
  std::vector<std::string> blocked_courses() const;

  // Validates the decision against the current log, appends it to the
  // decision file, then applies it. Throws UnknownConflictError,
  // DuplicateDecisionError or InvalidResolutionError without touching the
  // log.
  void add_decision(const Adjudication& decision);

 private:
  std::size_t course_index(std::string_view course_id) const;

  Dataset dataset_;
  std::vector<MatchResult> matches_;  // parallel to dataset_.courses
  std::vector<Conflict> conflicts_;
  std::vector<Adjudication> decisions_;
};

struct PipelineOptions {
  DetectorParams params;
  SmoothingSpec smoothing;
  std::size_t food_min_bites = 100;
  SpbWeighting spb_weighting = SpbWeighting::Bite;
  bool force = false;  // ignore the input hash and recompute
};

struct PipelineResult {
  bool skipped = false;  // inputs unchanged since the last run
  std::string input_hash;
  std::vector<std::string> blocked;  // courses withheld from evaluation
  Totals totals;
  std::vector<fs::path> written;
};

// Detects, merges, evaluates and reports into out_dir:
//   detections/<course>.jsonl, groundtruth/<course>.jsonl, conflicts.json,
//   blocked.json, error_report.tsv, summary.json, report_<group>.tsv/.json,
//   foods.tsv, and .inputs-hash (hash of everything the run read).
// Courses with open conflicts are listed in blocked.json and left out of
// ground truth and evaluation. When the inputs hash to the value stored by the
// previous run the outputs are left untouched.
PipelineResult run_pipeline(const Workbench& bench, const fs::path& out_dir, const PipelineOptions& options = {});

// 64-bit FNV-1a, hex encoded.
std::string content_hash(std::string_view bytes);

}  // namespace bitewatch::io
