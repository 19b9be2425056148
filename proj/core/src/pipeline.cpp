#include "bitewatch/pipeline.hpp"

#include <algorithm>
#include <unordered_set>

#include "json_codec.hpp"

namespace bitewatch::io {
namespace {

using codec::exact;
using codec::json_string;

constexpr GroupBy kAllGroups[] = {GroupBy::Age,     GroupBy::Gender,   GroupBy::Ethnicity, GroupBy::Container,
                                  GroupBy::Utensil, GroupBy::HandUsed, GroupBy::Food};

std::string totals_object(const Totals& t) {
  return fmt::format(R"({{"T":{},"F":{},"U":{},"sensitivity":{},"ppv":{}}})", t.t, t.f, t.u,
                     t.sensitivity() ? exact(*t.sensitivity()) : "null", t.ppv() ? exact(*t.ppv()) : "null");
}

}  // namespace

Workbench::Workbench(Dataset dataset, double match_window_s) : dataset_(std::move(dataset)) {
  for (const auto& course : dataset_.courses) {
    const auto& id = course.entry.course_id;
    MatchResult m;
    if (course.raters.size() >= 2) {
      try {
        m = match_raters(id, course.raters[0], course.raters[1], match_window_s);
      } catch (const ContractViolation& e) {
        throw DataError(fmt::format("course {}: {}", id, e.what()));
      }
    } else {
      m.draft.course_id = id;
      if (course.raters.size() == 1) {
        m.draft.bites = course.raters[0];
        for (auto& b : m.draft.bites) b.rater_id = std::string(kMergedRater);
      }
    }
    conflicts_.insert(conflicts_.end(), m.conflicts.begin(), m.conflicts.end());
    matches_.push_back(std::move(m));
  }
  decisions_ = read_decisions_jsonl(dataset_.decisions_path());
  check_decisions(conflicts_, decisions_);
}

std::size_t Workbench::course_index(std::string_view course_id) const {
  for (std::size_t i = 0; i < dataset_.courses.size(); ++i) {
    if (dataset_.courses[i].entry.course_id == course_id) return i;
  }
  throw DataError(fmt::format("unknown course \"{}\"", course_id));
}

const MatchResult& Workbench::match(std::string_view course_id) const { return matches_[course_index(course_id)]; }

std::vector<Conflict> Workbench::open_conflicts() const { return bitewatch::open_conflicts(conflicts_, decisions_); }

const Conflict* Workbench::find_conflict(std::string_view id) const {
  for (const auto& c : conflicts_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const Adjudication* Workbench::decision_for(std::string_view conflict_id) const {
  for (const auto& d : decisions_) {
    if (d.conflict_id == conflict_id) return &d;
  }
  return nullptr;
}

GroundTruth Workbench::ground_truth(std::string_view course_id) const {
  const auto& m = match(course_id);
  std::unordered_set<std::string_view> ids;
  for (const auto& c : m.conflicts) ids.insert(c.id);
  std::vector<Adjudication> mine;
  for (const auto& d : decisions_) {
    if (ids.count(d.conflict_id)) mine.push_back(d);
  }
  return apply_adjudications(m.draft, m.conflicts, mine);
}

std::vector<std::string> Workbench::blocked_courses() const {
  std::vector<std::string> out;
  for (const auto& c : open_conflicts()) {
    if (out.empty() || out.back() != c.course_id) out.push_back(c.course_id);
  }
  return out;
}

void Workbench::add_decision(const Adjudication& decision) {
  std::vector<Adjudication> next = decisions_;
  next.push_back(decision);
  check_decisions(conflicts_, next);
  // The new bite must also fit its course's ground truth.
  if (const Conflict* c = find_conflict(decision.conflict_id)) {
    const auto& m = match(c->course_id);
    std::unordered_set<std::string_view> ids;
    for (const auto& k : m.conflicts) ids.insert(k.id);
    std::vector<Adjudication> mine;
    for (const auto& d : next) {
      if (ids.count(d.conflict_id)) mine.push_back(d);
    }
    apply_adjudications(m.draft, m.conflicts, mine);
  }
  append_decision(dataset_.decisions_path(), decision);
  decisions_ = std::move(next);
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

PipelineResult run_pipeline(const Workbench& bench, const fs::path& out_dir, const PipelineOptions& options) {
  options.params.check();
  options.smoothing.check();
  const Dataset& ds = bench.dataset();

  // Everything the run depends on, in a fixed order.
  std::string inputs = read_file(ds.manifest_path);
  for (const auto& c : ds.courses) {
    inputs += read_file(ds.root / c.entry.motion);
    for (const auto& l : c.entry.labels) inputs += read_file(ds.root / l);
  }
  for (const auto& d : bench.decisions()) inputs += format_decision_line(d) + "\n";
  inputs += fmt::format("params {} smoothing {} {} food_min {} spb {}\n", codec::params_object(options.params),
                        exact(options.smoothing.window_width_s), exact(options.smoothing.sigma_s),
                        options.food_min_bites, static_cast<int>(options.spb_weighting));

  PipelineResult result;
  result.input_hash = content_hash(inputs);
  const auto hash_path = out_dir / ".inputs-hash";
  if (!options.force && fs::exists(hash_path) && read_file(hash_path) == result.input_hash + "\n") {
    result.skipped = true;
    result.blocked = bench.blocked_courses();
    return result;
  }

  auto emit = [&](const fs::path& rel, std::string_view contents) {
    write_file(out_dir / rel, contents);
    result.written.push_back(rel);
  };

  result.blocked = bench.blocked_courses();
  const std::unordered_set<std::string> blocked(result.blocked.begin(), result.blocked.end());

  std::vector<CourseEvaluation> evaluated;
  std::vector<MotionTrace> traces;
  std::size_t total_bites = 0;
  std::string course_rows;
  for (const auto& c : ds.courses) {
    const auto& id = c.entry.course_id;
    std::vector<Detection> dets;
    GroundTruth gt;
    try {
      dets = detect_course(c.trace, options.params, options.smoothing);
      gt = bench.ground_truth(id);
    } catch (const Error& e) {
      throw DataError(fmt::format("course {}: {}", id, e.what()));
    }
    total_bites += gt.bites.size();
    emit(fs::path("detections") / (id + ".jsonl"), format_detections_jsonl(id, dets, options.params));
    if (blocked.count(id)) continue;
    emit(fs::path("groundtruth") / (id + ".jsonl"), format_labels_jsonl(gt.bites));

    CourseEvaluation ev;
    ev.course_id = id;
    ev.participant_id = c.entry.participant_id;
    ev.duration_s = c.trace.duration();
    ev.outcome = classify(dets, gt);
    ev.actual = std::move(gt);
    result.totals += ev.outcome;
    course_rows += fmt::format(
        R"({}{{"course_id":{},"participant_id":{},"duration_s":{},"bites":{},"detections":{},"T":{},"F":{},"U":{}}})",
        course_rows.empty() ? "\n  " : ",\n  ", json_string(id), json_string(ev.participant_id), codec::fixed3(ev.duration_s),
        ev.actual.bites.size(), dets.size(), ev.outcome.true_count(), ev.outcome.false_count(),
        ev.outcome.undetected_count());
    evaluated.push_back(std::move(ev));
    traces.push_back(c.trace);
  }

  // Conflict queue with status.
  std::string conflicts = "[";
  for (std::size_t i = 0; i < bench.conflicts().size(); ++i) {
    const auto& c = bench.conflicts()[i];
    const Adjudication* d = bench.decision_for(c.id);
    const std::string extra =
        d ? fmt::format(R"(,"status":"resolved","decision":{})", format_decision_line(*d)) : R"(,"status":"open")";
    conflicts += i ? ",\n " : "\n ";
    conflicts += codec::conflict_object(c, extra);
  }
  conflicts += bench.conflicts().empty() ? "]\n" : "\n]\n";
  emit("conflicts.json", conflicts);

  std::string blocked_json = R"({"blocked":[)";
  for (std::size_t i = 0; i < result.blocked.size(); ++i) {
    const auto& id = result.blocked[i];
    std::size_t open = 0;
    for (const auto& c : bench.open_conflicts()) open += c.course_id == id;
    blocked_json += fmt::format(R"({}{{"course_id":{},"open_conflicts":{}}})", i ? "," : "", json_string(id), open);
  }
  blocked_json += "]}\n";
  emit("blocked.json", blocked_json);

  if (total_bites > 0) {
    emit("error_report.tsv", format_error_report_tsv(error_report(bench.conflicts(), total_bites), total_bites));
  } else {
    emit("error_report.tsv", "kind\tcount\tpercent\t# total_bites=0\n");
  }

  emit("summary.json", fmt::format("{{\"dataset_id\":{},\"params\":{},\"totals\":{},\"courses\":[{}{}]}}\n",
                                   json_string(ds.manifest.dataset_id), codec::params_object(options.params),
                                   totals_object(result.totals), course_rows, course_rows.empty() ? "" : "\n"));

  for (GroupBy g : kAllGroups) {
    const auto rows = stratified_report(evaluated, ds.manifest.participants, g, options.spb_weighting);
    const auto stem = fmt::format("report_{}", to_string(g));
    emit(stem + ".tsv", format_report_tsv(g, rows));
    emit(stem + ".json", format_report_json(g, rows));
  }
  emit("foods.tsv", format_food_tsv(per_food_analysis(evaluated, traces, options.food_min_bites)));

  write_file(hash_path, result.input_hash + "\n");
  return result;
}

}  // namespace bitewatch::io
