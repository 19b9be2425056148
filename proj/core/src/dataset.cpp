#include "bitewatch/dataset.hpp"

#include <algorithm>
#include <set>

#include "json_codec.hpp"

namespace bitewatch::io {

using codec::json;
using codec::optional_field;
using codec::required;

DanglingReferenceError::DanglingReferenceError(const std::string& course_id, const std::string& participant_id)
    : DataError(fmt::format("course \"{}\" references unknown participant \"{}\"", course_id, participant_id)) {}

DuplicateCourseError::DuplicateCourseError(const std::string& course_id)
    : DataError(fmt::format("duplicate course id \"{}\"", course_id)) {}

UnknownFoodError::UnknownFoodError(const std::string& course_id, const std::string& food)
    : DataError(fmt::format("course \"{}\": food \"{}\" is not on the course menu", course_id, food)) {}

const CourseData* Dataset::find_course(std::string_view id) const {
  for (const auto& c : courses) {
    if (c.entry.course_id == id) return &c;
  }
  return nullptr;
}

const Participant* Dataset::find_participant(std::string_view id) const {
  for (const auto& p : manifest.participants) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  try {
    const auto j = codec::parse(text, "manifest");
    m.dataset_id = required<std::string>(j, "dataset_id");
    m.rate_hz = optional_field<double>(j, "rate_hz", m.rate_hz);
    m.decisions = optional_field<std::string>(j, "decisions", m.decisions);
    for (const auto& p : j.value("participants", json::array())) m.participants.push_back(codec::participant_from_json(p));
    for (const auto& c : j.value("courses", json::array())) {
      CourseEntry e;
      e.course_id = required<std::string>(c, "course_id");
      e.participant_id = required<std::string>(c, "participant_id");
      e.motion = required<std::string>(c, "motion");
      e.labels = optional_field<std::vector<std::string>>(c, "labels", {});
      e.menu = optional_field<std::vector<std::string>>(c, "menu", {});
      m.courses.push_back(std::move(e));
    }
  } catch (const EnumError&) {
    throw;
  } catch (const DataError& e) {
    throw ManifestError(fmt::format("manifest: {}", e.what()));
  }
  return m;
}

std::string format_manifest(const DatasetManifest& m) {
  codec::ordered_json j;
  j["dataset_id"] = m.dataset_id;
  j["rate_hz"] = m.rate_hz;
  j["decisions"] = m.decisions;
  j["participants"] = codec::ordered_json::array();
  for (const auto& p : m.participants) {
    j["participants"].push_back({{"id", p.id},
                                 {"gender", p.gender},
                                 {"age", p.age},
                                 {"ethnicity", p.ethnicity},
                                 {"dominant_hand", to_string(p.dominant_hand)},
                                 {"height", p.height},
                                 {"weight", p.weight}});
  }
  j["courses"] = codec::ordered_json::array();
  for (const auto& c : m.courses) {
    j["courses"].push_back({{"course_id", c.course_id},
                            {"participant_id", c.participant_id},
                            {"motion", c.motion},
                            {"labels", c.labels},
                            {"menu", c.menu}});
  }
  return j.dump(2) + "\n";
}

Dataset load_dataset(const fs::path& manifest_path) {
  Dataset ds;
  ds.manifest_path = manifest_path;
  ds.root = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
  ds.manifest = parse_manifest(read_file(manifest_path));

  std::set<std::string> people;
  for (const auto& p : ds.manifest.participants) {
    if (!people.insert(p.id).second) throw ManifestError(fmt::format("duplicate participant id \"{}\"", p.id));
  }
  std::set<std::string> seen;
  for (const auto& entry : ds.manifest.courses) {
    if (!seen.insert(entry.course_id).second) throw DuplicateCourseError(entry.course_id);
    if (!people.count(entry.participant_id)) throw DanglingReferenceError(entry.course_id, entry.participant_id);

    CourseData course;
    course.entry = entry;
    course.trace = read_motion_csv(ds.root / entry.motion, ds.manifest.rate_hz);
    course.anomalies = validate_trace(course.trace);
    for (const auto& path : entry.labels) {
      auto labels = read_labels_jsonl(ds.root / path);
      for (const auto& l : labels) {
        const bool on_menu = std::any_of(entry.menu.begin(), entry.menu.end(),
                                         [&](const std::string& food) { return same_food(food, l.food_id); });
        if (!on_menu) throw UnknownFoodError(entry.course_id, l.food_id);
      }
      std::stable_sort(labels.begin(), labels.end(),
                       [](const BiteLabel& a, const BiteLabel& b) { return a.t < b.t; });
      course.raters.push_back(std::move(labels));
    }
    ds.courses.push_back(std::move(course));
  }
  return ds;
}

fs::path write_synth_dataset(const fs::path& dir, const synth::Corpus& corpus, const SynthDatasetOptions& options) {
  DatasetManifest m;
  m.dataset_id = options.dataset_id;
  m.participants = corpus.participants;
  for (const auto& c : corpus.courses) {
    const auto& id = c.script.course_id;
    CourseEntry e;
    e.course_id = id;
    e.participant_id = c.participant_id;
    e.motion = "motion/" + id + ".csv";
    e.labels = {"labels/" + id + ".a.jsonl", "labels/" + id + ".b.jsonl"};
    e.menu = c.menu;
    m.rate_hz = c.rendered.trace.nominal_rate_hz;

    write_motion_csv(dir / e.motion, c.rendered.trace);
    std::vector<BiteLabel> a = c.rendered.truth.bites;
    std::vector<BiteLabel> b = a;
    for (auto& l : a) l.rater_id = "a";
    for (auto& l : b) {
      l.rater_id = "b";
      l.t += options.rater_b_shift_s;
    }
    write_labels_jsonl(dir / e.labels[0], a);
    write_labels_jsonl(dir / e.labels[1], b);
    m.courses.push_back(std::move(e));
  }
  const auto manifest_path = dir / "manifest.json";
  write_file(manifest_path, format_manifest(m));
  return manifest_path;
}

}  // namespace bitewatch::io
