// bitewatch: command-line front end for the bite detection workbench.
//
// Outputs go under the directory named by --out, else $BITEWATCH_OUT, else
// ./bitewatch-out. Exit status: 0 ok, 1 data error, 2 usage error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bitewatch/pipeline.hpp"
#include "bitewatch/service.hpp"

using namespace bitewatch;
using namespace bitewatch::io;

namespace {

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BITEWATCH_OUT"); env && *env) return env;
  return "bitewatch-out";
}

struct ParamFlags {
  std::optional<double> t1, t2, t3, t4;

  void add(CLI::App* app) {
    app->add_option("--t1", t1, "positive roll threshold (deg/s)");
    app->add_option("--t2", t2, "negative roll threshold magnitude (deg/s)");
    app->add_option("--t3", t3, "minimum positive-to-negative roll time (s)");
    app->add_option("--t4", t4, "refractory time after a bite (s)");
  }
  DetectorParams resolve() const {
    DetectorParams p;
    if (t1) p.t1 = *t1;
    if (t2) p.t2 = *t2;
    if (t3) p.t3 = *t3;
    if (t4) p.t4 = *t4;
    try {
      p.check();
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

struct SmoothingFlags {
  double width = SmoothingSpec{}.window_width_s;
  double sigma = SmoothingSpec{}.sigma_s;

  void add(CLI::App* app) {
    app->add_option("--width", width, "smoothing window width (s)")->capture_default_str();
    app->add_option("--sigma", sigma, "Gaussian sigma (s)")->capture_default_str();
  }
  SmoothingSpec resolve() const {
    SmoothingSpec s{width, sigma};
    try {
      s.check();
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    return s;
  }
};

std::string stem_of(const fs::path& p) {
  auto s = p.filename().string();
  return s.substr(0, s.find('.'));
}

void wrote(const fs::path& p) { std::cout << p.string() << "\n"; }

// Evaluates every unblocked course in memory, as the pipeline does.
struct Evaluated {
  std::vector<CourseEvaluation> courses;
  std::vector<MotionTrace> traces;
  std::vector<std::string> blocked;
};

Evaluated evaluate_courses(const Workbench& bench, const DetectorParams& params, const SmoothingSpec& smoothing) {
  Evaluated out;
  out.blocked = bench.blocked_courses();
  for (const auto& c : bench.dataset().courses) {
    const auto& id = c.entry.course_id;
    if (std::find(out.blocked.begin(), out.blocked.end(), id) != out.blocked.end()) continue;
    CourseEvaluation ev;
    ev.course_id = id;
    ev.participant_id = c.entry.participant_id;
    ev.duration_s = c.trace.duration();
    ev.actual = bench.ground_truth(id);
    ev.outcome = classify(detect_course(c.trace, params, smoothing), ev.actual);
    out.courses.push_back(std::move(ev));
    out.traces.push_back(c.trace);
  }
  return out;
}

void warn_blocked(const std::vector<std::string>& blocked) {
  for (const auto& id : blocked) std::cerr << "warning: course " << id << " has open conflicts; left out\n";
}

int cmd_validate(const fs::path& input) {
  bool clean = true;
  auto print = [&](const std::string& what, const std::vector<Anomaly>& anomalies) {
    for (const auto& a : anomalies) {
      clean = false;
      std::cout << fmt::format("{}\t{}\t{}\t{}\n", what, to_string(a.kind), a.index, a.detail);
    }
  };
  if (input.extension() == ".json") {
    const auto ds = load_dataset(input);
    for (const auto& c : ds.courses) print(c.entry.course_id, c.anomalies);
    std::cerr << fmt::format("{}: {} courses, {}\n", input.string(), ds.courses.size(),
                             clean ? "no anomalies" : "anomalies found");
  } else {
    print(input.string(), validate_trace(read_motion_csv(input)));
  }
  return clean ? kOk : kDataError;
}

int cmd_smooth(const fs::path& input, const SmoothingSpec& spec, const fs::path& root) {
  const auto trace = read_motion_csv(input);
  require_valid(trace);
  const auto path = root / "smoothed" / (stem_of(input) + ".csv");
  write_motion_csv(path, smooth(trace, spec));
  wrote(path);
  return kOk;
}

int cmd_detect(const fs::path& input, std::string course_id, const DetectorParams& params,
               const SmoothingSpec& smoothing, const fs::path& root) {
  if (course_id.empty()) course_id = stem_of(input);
  const auto dets = detect_course(read_motion_csv(input), params, smoothing);
  const auto path = root / "detections" / (course_id + ".jsonl");
  write_file(path, format_detections_jsonl(course_id, dets, params));
  std::cerr << fmt::format("{}: {} detections ({})\n", course_id, dets.size(), params.describe());
  wrote(path);
  return kOk;
}

int cmd_merge(const fs::path& a_path, const fs::path& b_path, std::string course_id, double window,
              const fs::path& root) {
  if (course_id.empty()) course_id = stem_of(a_path);
  const auto a = read_labels_jsonl(a_path);
  const auto b = read_labels_jsonl(b_path);
  const auto m = match_raters(course_id, a, b, window);
  const auto gt_path = root / "merged" / (course_id + ".jsonl");
  const auto conflicts_path = root / "conflicts" / (course_id + ".json");
  write_file(gt_path, format_labels_jsonl(m.draft.bites));
  write_file(conflicts_path, format_conflicts_json(m.conflicts));
  std::cerr << fmt::format("{}: {} merged bites, {} conflicts\n", course_id, m.draft.bites.size(), m.conflicts.size());
  wrote(gt_path);
  wrote(conflicts_path);
  return kOk;
}

int cmd_error_report(const fs::path& manifest, const fs::path& root) {
  const Workbench bench(load_dataset(manifest));
  std::size_t total = 0;
  for (const auto& c : bench.dataset().courses) total += bench.ground_truth(c.entry.course_id).bites.size();
  if (total == 0) throw DataError("error-report: dataset has no bites");
  const auto tsv = format_error_report_tsv(error_report(bench.conflicts(), total), total);
  const auto path = root / "error_report.tsv";
  write_file(path, tsv);
  std::cout << tsv;
  return kOk;
}

int cmd_evaluate(const fs::path& manifest, PipelineOptions options, const fs::path& root) {
  const auto r = run_pipeline(Workbench(load_dataset(manifest)), root, options);
  warn_blocked(r.blocked);
  if (r.skipped) {
    std::cerr << fmt::format("inputs unchanged ({}); outputs in {} left as they are\n", r.input_hash, root.string());
    return kOk;
  }
  std::cerr << fmt::format("T={} F={} U={} sensitivity={} ppv={}\n", r.totals.t, r.totals.f, r.totals.u,
                           format_metric(r.totals.sensitivity()), format_metric(r.totals.ppv()));
  for (const auto& p : r.written) wrote(root / p);
  return kOk;
}

int cmd_report(const fs::path& manifest, const std::string& by, const std::string& format, SpbWeighting weighting,
               const DetectorParams& params, const SmoothingSpec& smoothing, const fs::path& root) {
  GroupBy g;
  try {
    g = parse_group_by(by);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const Workbench bench(load_dataset(manifest));
  const auto ev = evaluate_courses(bench, params, smoothing);
  warn_blocked(ev.blocked);
  const auto rows = stratified_report(ev.courses, bench.dataset().manifest.participants, g, weighting);
  const auto text = format == "json" ? format_report_json(g, rows) : format_report_tsv(g, rows);
  write_file(root / "reports" / fmt::format("{}.{}", to_string(g), format), text);
  std::cout << text;
  return kOk;
}

int cmd_sweep(const fs::path& manifest, const std::vector<std::string>& axes, unsigned threads,
              const SmoothingSpec& smoothing, const fs::path& root) {
  ParamGrid grid;
  std::vector<double>* slots[] = {&grid.t1, &grid.t2, &grid.t3, &grid.t4};
  for (std::size_t i = 0; i < 4; ++i) {
    if (axes[i].empty()) continue;
    try {
      *slots[i] = parse_grid_axis(axes[i]);
    } catch (const Error& e) {
      throw UsageError(fmt::format("--t{}: {}", i + 1, e.what()));
    }
  }
  const auto points = grid.expand();
  for (const auto& p : points) {
    try {
      p.check();
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
  }

  const Workbench bench(load_dataset(manifest));
  const auto blocked = bench.blocked_courses();
  warn_blocked(blocked);
  std::vector<SweepCourse> courses;
  for (const auto& c : bench.dataset().courses) {
    if (std::find(blocked.begin(), blocked.end(), c.entry.course_id) != blocked.end()) continue;
    courses.push_back({c.trace, bench.ground_truth(c.entry.course_id)});
  }
  const auto tsv = format_sweep_tsv(parameter_sweep(courses, points, smoothing, threads));
  write_file(root / "sweep.tsv", tsv);
  std::cout << tsv;
  return kOk;
}

int cmd_synth_render(const fs::path& script_path, std::uint64_t seed, const fs::path& out, double shift) {
  auto script = parse_script_json(read_file(script_path));
  synth::Corpus corpus;
  Participant p{"p1", "", 30.0, "", Hand::Right, 0.0, 0.0};
  corpus.participants.push_back(p);
  synth::SynthCourse course;
  course.participant_id = p.id;
  for (const auto& b : script.bites) {
    if (std::find(course.menu.begin(), course.menu.end(), b.food_id) == course.menu.end()) {
      course.menu.push_back(b.food_id);
    }
  }
  course.rendered = synth::render(script, seed);
  course.script = std::move(script);
  corpus.courses.push_back(std::move(course));
  wrote(write_synth_dataset(out, corpus, {stem_of(script_path), shift}));
  return kOk;
}

int cmd_synth_cohort(const fs::path& profiles_path, std::uint64_t seed, const fs::path& out, double shift) {
  const auto profiles = parse_profiles_json(read_file(profiles_path));
  wrote(write_synth_dataset(out, synth::cohort(profiles, seed), {stem_of(profiles_path), shift}));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bitewatch: wrist-motion bite detection workbench"};
  app.require_subcommand(1);
  std::string out_flag;
  app.add_option("--out", out_flag, "output root (default $BITEWATCH_OUT or ./bitewatch-out)");

  std::function<int()> action;

  std::string input, input_b, course_id, by = "gender", format = "tsv", address = "127.0.0.1:8080";
  std::string manifest;
  bool force = false, participant_weighted = false;
  double window = 1.0, shift = 0.0;
  std::size_t food_min = 100;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> axes(4);
  ParamFlags params;
  SmoothingFlags smoothing;
  auto root = [&] { return output_root(out_flag); };

  auto* validate = app.add_subcommand("validate", "check a motion CSV or a dataset manifest");
  validate->add_option("input", input, "motion CSV or manifest.json")->required();
  validate->callback([&] { action = [&] { return cmd_validate(input); }; });

  auto* smooth_cmd = app.add_subcommand("smooth", "write a Gaussian-smoothed copy of a motion CSV");
  smooth_cmd->add_option("input", input, "motion CSV")->required();
  smoothing.add(smooth_cmd);
  smooth_cmd->callback([&] { action = [&] { return cmd_smooth(input, smoothing.resolve(), root()); }; });

  auto* detect = app.add_subcommand("detect", "run the bite detector over a motion CSV");
  detect->add_option("input", input, "motion CSV")->required();
  detect->add_option("--course-id", course_id, "course id (default: file stem)");
  params.add(detect);
  smoothing.add(detect);
  detect->callback([&] {
    action = [&] { return cmd_detect(input, course_id, params.resolve(), smoothing.resolve(), root()); };
  });

  auto* merge = app.add_subcommand("merge", "match two raters' labels into draft ground truth and conflicts");
  merge->add_option("rater_a", input, "rater A labels JSONL")->required();
  merge->add_option("rater_b", input_b, "rater B labels JSONL")->required();
  merge->add_option("--course-id", course_id, "course id (default: stem of rater A's file)");
  merge->add_option("--window", window, "agreement window (s)")->capture_default_str()->check(CLI::PositiveNumber);
  merge->callback([&] { action = [&] { return cmd_merge(input, input_b, course_id, window, root()); }; });

  auto* errors = app.add_subcommand("error-report", "tabulate inter-rater conflicts by kind");
  errors->add_option("manifest", manifest, "dataset manifest")->required();
  errors->callback([&] { action = [&] { return cmd_error_report(manifest, root()); }; });

  auto* evaluate = app.add_subcommand("evaluate", "run the full pipeline and write every artifact");
  evaluate->add_option("manifest", manifest, "dataset manifest")->required();
  params.add(evaluate);
  smoothing.add(evaluate);
  evaluate->add_option("--food-min-bites", food_min, "minimum bites for a food row")->capture_default_str();
  evaluate->add_flag("--participant-weighted", participant_weighted, "average SPB per participant");
  evaluate->add_flag("--force", force, "recompute even if inputs are unchanged");
  evaluate->callback([&] {
    action = [&] {
      PipelineOptions o;
      o.params = params.resolve();
      o.smoothing = smoothing.resolve();
      o.food_min_bites = food_min;
      o.spb_weighting = participant_weighted ? SpbWeighting::Participant : SpbWeighting::Bite;
      o.force = force;
      return cmd_evaluate(manifest, o, root());
    };
  });

  auto* report = app.add_subcommand("report", "stratified sensitivity and seconds-per-bite report");
  report->add_option("manifest", manifest, "dataset manifest")->required();
  report->add_option("--by", by, "age|gender|ethnicity|container|utensil|hand_used|food")->capture_default_str();
  report->add_option("--format", format, "tsv|json")->capture_default_str()->check(CLI::IsMember({"tsv", "json"}));
  report->add_flag("--participant-weighted", participant_weighted, "average SPB per participant");
  params.add(report);
  smoothing.add(report);
  report->callback([&] {
    action = [&] {
      return cmd_report(manifest, by, format, participant_weighted ? SpbWeighting::Participant : SpbWeighting::Bite,
                        params.resolve(), smoothing.resolve(), root());
    };
  });

  auto* sweep = app.add_subcommand("sweep", "grid search over detector thresholds");
  sweep->add_option("manifest", manifest, "dataset manifest")->required();
  for (int i = 0; i < 4; ++i) {
    sweep->add_option(fmt::format("--t{}", i + 1), axes[i], "values \"a,b,c\" or range \"start:stop:step\"");
  }
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
  smoothing.add(sweep);
  sweep->callback([&] { action = [&] { return cmd_sweep(manifest, axes, threads, smoothing.resolve(), root()); }; });

  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic datasets");
  synth_cmd->require_subcommand(1);
  std::string synth_out;
  auto* render = synth_cmd->add_subcommand("render", "render one meal script");
  render->add_option("--script", input, "meal script JSON")->required();
  auto* cohort = synth_cmd->add_subcommand("cohort", "render a cohort of participant profiles");
  cohort->add_option("--profiles", input, "cohort JSON")->required();
  for (auto* sub : {render, cohort}) {
    sub->add_option("--seed", seed, "noise seed")->capture_default_str();
    sub->add_option("--out", synth_out, "dataset directory")->required();
    sub->add_option("--rater-b-shift", shift, "offset of rater B's labels (s)")->capture_default_str();
  }
  render->callback([&] { action = [&] { return cmd_synth_render(input, seed, synth_out, shift); }; });
  cohort->callback([&] { action = [&] { return cmd_synth_cohort(input, seed, synth_out, shift); }; });

  auto* serve_cmd = app.add_subcommand("serve", "serve the adjudication API under /v1");
  serve_cmd->add_option("manifest", manifest, "dataset manifest")->required();
  serve_cmd->add_option("--address", address, "host:port")->capture_default_str();
  params.add(serve_cmd);
  serve_cmd->callback([&] {
    action = [&] {
      ServiceOptions o;
      o.params = params.resolve();
      std::cerr << "listening on http://" << address << "/v1\n";
      if (address.find(':') == std::string::npos) throw UsageError("--address must be host:port");
      if (!serve(manifest, address, o)) {
        std::cerr << "error: cannot listen on " << address << "\n";
        return kDataError;
      }
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
}
