#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bitewatch/evaluation.hpp"
#include "bitewatch/formats.hpp"
#include "bitewatch/synth.hpp"

namespace bitewatch::io {

// Manifest JSON:
// {
//   "dataset_id": "...",
//   "rate_hz": 15,                      (optional)
//   "decisions": "decisions.jsonl",     (optional, relative to manifest)
//   "participants": [{"id","gender","age","ethnicity","dominant_hand","height","weight"}],
//   "courses": [{"course_id","participant_id","motion":"motion/x.csv",
//                "labels":["labels/x.a.jsonl","labels/x.b.jsonl"],
//                "menu":["cheese pizza", ...]}]
// }
// Paths are relative to the manifest's directory.
struct CourseEntry {
  std::string course_id;
  std::string participant_id;
  std::string motion;
  std::vector<std::string> labels;
  std::vector<std::string> menu;
};

struct DatasetManifest {
  std::string dataset_id;
  double rate_hz = kDefaultRateHz;
  std::string decisions = "decisions.jsonl";
  std::vector<Participant> participants;
  std::vector<CourseEntry> courses;
};

class DanglingReferenceError : public DataError {
 public:
  DanglingReferenceError(const std::string& course_id, const std::string& participant_id);
};

class DuplicateCourseError : public DataError {
 public:
  explicit DuplicateCourseError(const std::string& course_id);
};

class UnknownFoodError : public DataError {
 public:
  UnknownFoodError(const std::string& course_id, const std::string& food);
};

class ManifestError : public DataError {
 public:
  using DataError::DataError;
};

struct CourseData {
  CourseEntry entry;
  MotionTrace trace;
  std::vector<std::vector<BiteLabel>> raters;  // one list per label file, time-sorted
  std::vector<Anomaly> anomalies;              // from validate_trace
};

struct Dataset {
  fs::path manifest_path;
  fs::path root;  // manifest directory
  DatasetManifest manifest;
  std::vector<CourseData> courses;  // manifest order

  fs::path decisions_path() const { return root / manifest.decisions; }
  const CourseData* find_course(std::string_view id) const;
  const Participant* find_participant(std::string_view id) const;
};

DatasetManifest parse_manifest(std::string_view text);
std::string format_manifest(const DatasetManifest& manifest);

// Loads and checks a dataset. Trace anomalies are recorded per course;
// structural problems throw MissingFileError, DanglingReferenceError,
// DuplicateCourseError, UnknownFoodError, EnumError or ManifestError.
Dataset load_dataset(const fs::path& manifest_path);

struct SynthDatasetOptions {
  std::string dataset_id = "synthetic";
  // Rater B's labels are rater A's shifted by this much (seconds).
  double rater_b_shift_s = 0.0;
};

// Writes a synthetic corpus as a dataset directory: motion/<course>.csv,
// labels/<course>.a.jsonl, labels/<course>.b.jsonl, manifest.json. Returns
// the manifest path.
fs::path write_synth_dataset(const fs::path& dir, const synth::Corpus& corpus,
                             const SynthDatasetOptions& options = {});

}  // namespace bitewatch::io
