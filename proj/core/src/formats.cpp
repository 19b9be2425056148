#include "bitewatch/formats.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json_codec.hpp"

namespace bitewatch::io {
namespace {

using codec::exact;
using codec::fixed3;
using codec::json;

constexpr std::string_view kMotionHeader = "t,gx,gy,gz,ax,ay,az";

// Splits on '\n', dropping a trailing '\r' and blank lines; keeps 1-based
// line numbers.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.emplace_back(number, line);
    start = end + 1;
    ++number;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw DataError(fmt::format("line {}: \"{}\" is not a number", line_no, field));
  }
  return v;
}

std::string metric_or_null(const std::optional<double>& v) { return v ? exact(*v) : "null"; }

}  // namespace

MissingFileError::MissingFileError(const fs::path& path)
    : DataError(fmt::format("missing file: {}", path.string())), path_(path) {}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError(fmt::format("write failed for {}", path.string()));
}

std::string format_motion_csv(const MotionTrace& trace) {
  std::string out(kMotionHeader);
  out += '\n';
  for (const auto& s : trace.samples) {
    out += fmt::format("{},{},{},{},{},{},{}\n", fixed3(s.t), exact(s.gyro[0]), exact(s.gyro[1]),
                       exact(s.gyro[2]), exact(s.accel[0]), exact(s.accel[1]), exact(s.accel[2]));
  }
  return out;
}

MotionTrace parse_motion_csv(std::string_view text, double nominal_rate_hz) {
  MotionTrace trace;
  trace.nominal_rate_hz = nominal_rate_hz;
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front().second != kMotionHeader) {
    throw DataError(fmt::format("motion CSV must start with header \"{}\"", kMotionHeader));
  }
  trace.samples.reserve(lines.size() - 1);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto [no, line] = lines[k];
    std::array<double, 7> v{};
    std::size_t start = 0;
    for (std::size_t c = 0; c < v.size(); ++c) {
      auto comma = line.find(',', start);
      if ((c + 1 < v.size()) == (comma == std::string_view::npos)) {
        throw DataError(fmt::format("line {}: expected 7 comma-separated fields", no));
      }
      v[c] = parse_double(line.substr(start, comma - start), no);
      start = comma + 1;
    }
    trace.samples.push_back(MotionSample{v[0], {v[1], v[2], v[3]}, {v[4], v[5], v[6]}});
  }
  return trace;
}

MotionTrace read_motion_csv(const fs::path& path, double nominal_rate_hz) {
  try {
    return parse_motion_csv(read_file(path), nominal_rate_hz);
  } catch (const MissingFileError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_motion_csv(const fs::path& path, const MotionTrace& trace) {
  write_file(path, format_motion_csv(trace));
}

std::string format_labels_jsonl(std::span<const BiteLabel> labels) {
  std::string out;
  for (const auto& l : labels) {
    out += codec::label_object(l);
    out += '\n';
  }
  return out;
}

std::vector<BiteLabel> parse_labels_jsonl(std::string_view text) {
  std::vector<BiteLabel> out;
  for (const auto& [no, line] : lines_of(text)) {
    try {
      out.push_back(codec::label_from_json(codec::parse(line, "label")));
    } catch (const EnumError&) {
      throw;
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", no, e.what()));
    }
  }
  return out;
}

std::vector<BiteLabel> read_labels_jsonl(const fs::path& path) {
  return parse_labels_jsonl(read_file(path));
}

void write_labels_jsonl(const fs::path& path, std::span<const BiteLabel> labels) {
  write_file(path, format_labels_jsonl(labels));
}

std::string format_detections_jsonl(std::string_view course_id, std::span<const Detection> detections,
                                    const DetectorParams& params) {
  std::string out;
  const auto p = codec::params_object(params);
  for (const auto& d : detections) {
    out += fmt::format(R"({{"course_id":{},"t":{},"params":{}}})", codec::json_string(course_id), fixed3(d.t), p);
    out += '\n';
  }
  return out;
}

std::vector<Detection> parse_detections_jsonl(std::string_view text) {
  std::vector<Detection> out;
  for (const auto& [no, line] : lines_of(text)) {
    try {
      out.push_back(Detection{codec::required<double>(codec::parse(line, "detection"), "t")});
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", no, e.what()));
    }
  }
  return out;
}

std::string format_decision_line(const Adjudication& decision) { return codec::decision_object(decision); }

Adjudication parse_decision(std::string_view json_text) {
  return codec::decision_from_json(codec::parse(json_text, "decision"));
}

std::vector<Adjudication> parse_decisions_jsonl(std::string_view text) {
  std::vector<Adjudication> out;
  for (const auto& [no, line] : lines_of(text)) {
    try {
      out.push_back(parse_decision(line));
    } catch (const EnumError&) {
      throw;
    } catch (const DataError& e) {
      throw DataError(fmt::format("decision line {}: {}", no, e.what()));
    }
  }
  return out;
}

std::vector<Adjudication> read_decisions_jsonl(const fs::path& path) {
  if (!fs::exists(path)) return {};
  return parse_decisions_jsonl(read_file(path));
}

void append_decision(const fs::path& path, const Adjudication& decision) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw DataError(fmt::format("cannot append to {}", path.string()));
  out << format_decision_line(decision) << '\n';
  out.flush();
  if (!out) throw DataError(fmt::format("append failed for {}", path.string()));
}

std::string format_conflicts_json(std::span<const Conflict> conflicts) {
  std::string out = "[";
  for (std::size_t i = 0; i < conflicts.size(); ++i) {
    out += i ? ",\n " : "\n ";
    out += codec::conflict_object(conflicts[i]);
  }
  out += conflicts.empty() ? "]\n" : "\n]\n";
  return out;
}

std::vector<Conflict> parse_conflicts_json(std::string_view text) {
  const auto j = codec::parse(text, "conflicts");
  if (!j.is_array()) throw DataError("conflicts file must hold a JSON array");
  std::vector<Conflict> out;
  for (const auto& item : j) out.push_back(codec::conflict_from_json(item));
  return out;
}

std::string format_script_json(const synth::MealScript& script) {
  codec::ordered_json j;
  j["course_id"] = script.course_id;
  j["duration_s"] = script.duration_s;
  j["noise_std"] = script.noise_std;
  j["bites"] = codec::ordered_json::array();
  for (const auto& b : script.bites) {
    j["bites"].push_back({{"t", b.t},
                          {"food_id", b.food_id},
                          {"hand", to_string(b.hand)},
                          {"utensil", to_string(b.utensil)},
                          {"container", to_string(b.container)},
                          {"gesture",
                           {{"pos_amp", b.gesture.pos_amp},
                            {"neg_amp", b.gesture.neg_amp},
                            {"lobe_dur_s", b.gesture.lobe_dur_s},
                            {"lobe_gap_s", b.gesture.lobe_gap_s}}}});
  }
  j["distractors"] = codec::ordered_json::array();
  for (const auto& d : script.distractors) {
    j["distractors"].push_back({{"t", d.t}, {"amp", d.amp}, {"lobe_dur_s", d.lobe_dur_s}});
  }
  return j.dump(2) + "\n";
}

synth::MealScript parse_script_json(std::string_view text) {
  using codec::optional_field;
  using codec::required;
  const auto j = codec::parse(text, "script");
  synth::MealScript s;
  s.course_id = optional_field<std::string>(j, "course_id", s.course_id);
  s.duration_s = required<double>(j, "duration_s");
  s.noise_std = optional_field<double>(j, "noise_std", 0.0);
  for (const auto& b : j.value("bites", json::array())) {
    synth::ScriptedBite bite;
    bite.t = required<double>(b, "t");
    bite.food_id = optional_field<std::string>(b, "food_id", bite.food_id);
    bite.hand = parse_hand(optional_field<std::string>(b, "hand", "right"));
    bite.utensil = parse_utensil(optional_field<std::string>(b, "utensil", "fork"));
    bite.container = parse_container(optional_field<std::string>(b, "container", "plate"));
    const auto g = b.value("gesture", json::object());
    bite.gesture.pos_amp = optional_field<double>(g, "pos_amp", bite.gesture.pos_amp);
    bite.gesture.neg_amp = optional_field<double>(g, "neg_amp", bite.gesture.neg_amp);
    bite.gesture.lobe_dur_s = optional_field<double>(g, "lobe_dur_s", bite.gesture.lobe_dur_s);
    bite.gesture.lobe_gap_s = optional_field<double>(g, "lobe_gap_s", bite.gesture.lobe_gap_s);
    s.bites.push_back(std::move(bite));
  }
  for (const auto& d : j.value("distractors", json::array())) {
    synth::Distractor dist;
    dist.t = required<double>(d, "t");
    dist.amp = optional_field<double>(d, "amp", dist.amp);
    dist.lobe_dur_s = optional_field<double>(d, "lobe_dur_s", dist.lobe_dur_s);
    s.distractors.push_back(dist);
  }
  return s;
}

namespace {

synth::GestureTemplate gesture_from_json(const json& g) {
  using codec::optional_field;
  synth::GestureTemplate t;
  t.pos_amp = optional_field<double>(g, "pos_amp", t.pos_amp);
  t.neg_amp = optional_field<double>(g, "neg_amp", t.neg_amp);
  t.lobe_dur_s = optional_field<double>(g, "lobe_dur_s", t.lobe_dur_s);
  t.lobe_gap_s = optional_field<double>(g, "lobe_gap_s", t.lobe_gap_s);
  return t;
}

}  // namespace

std::vector<synth::Profile> parse_profiles_json(std::string_view text) {
  using codec::optional_field;
  const auto j = codec::parse(text, "cohort");
  if (!j.contains("profiles") || !j["profiles"].is_array()) throw DataError("cohort: missing \"profiles\" array");
  std::vector<synth::Profile> out;
  for (const auto& e : j["profiles"]) {
    if (!e.contains("participant")) throw DataError("cohort: profile without \"participant\"");
    synth::Profile p;
    p.participant = codec::participant_from_json(e["participant"]);
    p.spb_mean = optional_field<double>(e, "spb_mean", p.spb_mean);
    p.spb_std = optional_field<double>(e, "spb_std", p.spb_std);
    p.n_bites = optional_field<std::size_t>(e, "n_bites", p.n_bites);
    p.noise_std = optional_field<double>(e, "noise_std", p.noise_std);
    p.menu = optional_field<std::vector<std::string>>(e, "menu", p.menu);
    p.hand = parse_hand(optional_field<std::string>(e, "hand", std::string(to_string(p.hand))));
    p.utensil = parse_utensil(optional_field<std::string>(e, "utensil", std::string(to_string(p.utensil))));
    p.container = parse_container(optional_field<std::string>(e, "container", std::string(to_string(p.container))));
    p.gesture = gesture_from_json(e.value("gesture", json::object()));
    out.push_back(std::move(p));
  }
  return out;
}

std::string format_metric(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string("-");
}

std::string format_report_tsv(GroupBy group_by, std::span<const StratumRow> rows) {
  std::string out = fmt::format("{}\tparticipants\tbites\tdetected\tsensitivity\tsensitivity_pct\tspb\tspb_display\n",
                                to_string(group_by));
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{}\t{}\t{:.6f}\t{}%\t{}\t{}\n", r.key, r.n_participants, r.n_bites, r.n_detected,
                       r.sensitivity, r.sensitivity_percent, format_metric(r.spb),
                       r.spb_display ? std::to_string(*r.spb_display) : std::string("-"));
  }
  return out;
}

std::string format_report_json(GroupBy group_by, std::span<const StratumRow> rows) {
  std::string out = fmt::format(R"({{"group_by":"{}","rows":[)", to_string(group_by));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += i ? ",\n " : "\n ";
    out += fmt::format(
        R"({{"stratum":{},"participants":{},"bites":{},"detected":{},"sensitivity":{},"sensitivity_pct":{},"spb":{},"spb_display":{}}})",
        codec::json_string(r.key), r.n_participants, r.n_bites, r.n_detected, exact(r.sensitivity),
        r.sensitivity_percent, metric_or_null(r.spb),
        r.spb_display ? std::to_string(*r.spb_display) : std::string("null"));
  }
  out += rows.empty() ? "]}\n" : "\n]}\n";
  return out;
}

std::string format_error_report_tsv(std::span<const ErrorRow> rows, std::size_t total_bites) {
  std::string out = fmt::format("kind\tcount\tpercent\t# total_bites={}\n", total_bites);
  for (const auto& r : rows) out += fmt::format("{}\t{}\t{}\n", to_string(r.kind), r.count, r.display);
  return out;
}

std::string format_sweep_tsv(std::span<const SweepRow> rows) {
  std::string out = "t1\tt2\tt3\tt4\tT\tF\tU\tsensitivity\tppv\n";
  for (const auto& r : rows) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", exact(r.params.t1), exact(r.params.t2),
                       exact(r.params.t3), exact(r.params.t4), r.totals.t, r.totals.f, r.totals.u,
                       format_metric(r.sensitivity), format_metric(r.ppv));
  }
  return out;
}

std::string format_food_tsv(const FoodAnalysis& analysis) {
  std::string out = "food\tbites\tdetected\tsensitivity\tspb\tmotion\n";
  for (const auto& r : analysis.rows) {
    out += fmt::format("{}\t{}\t{}\t{:.6f}\t{}\t{}\n", r.food, r.n_bites, r.n_detected, r.sensitivity,
                       format_metric(r.spb), format_metric(r.motion));
  }
  out += fmt::format("# corr(sensitivity, spb)\t{}\n", format_metric(analysis.sensitivity_vs_spb));
  out += fmt::format("# corr(sensitivity, motion)\t{}\n", format_metric(analysis.sensitivity_vs_motion));
  return out;
}

}  // namespace bitewatch::io
