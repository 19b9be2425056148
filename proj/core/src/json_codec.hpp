#pragma once

// nlohmann/json bindings for the domain types. Private to bitewatch_io.

#include <cmath>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "bitewatch/detector.hpp"
#include "bitewatch/evaluation.hpp"
#include "bitewatch/groundtruth.hpp"
#include "bitewatch/synth.hpp"

namespace bitewatch::codec {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Times are written with exactly three decimals. nlohmann has no raw number
// token, so lines that carry a time are assembled by hand with this.
inline std::string fixed3(double t) { return fmt::format("{:.3f}", t); }

// Shortest representation that parses back to the same double.
inline std::string exact(double v) { return fmt::format("{}", v); }

inline std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

template <typename T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw DataError(fmt::format("missing field \"{}\"", key));
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(fmt::format("field \"{}\": {}", key, e.what()));
  }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(fmt::format("field \"{}\": {}", key, e.what()));
  }
}

inline json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("{}: malformed JSON: {}", what, e.what()));
  }
}

// {"t":...,"food_id":...,"hand":...,"utensil":...,"container":...,"rater_id":...}
inline std::string label_object(const BiteLabel& l) {
  return fmt::format(R"({{"t":{},"food_id":{},"hand":"{}","utensil":"{}","container":"{}","rater_id":{}}})",
                     fixed3(l.t), json_string(l.food_id), to_string(l.hand), to_string(l.utensil),
                     to_string(l.container), json_string(l.rater_id));
}

inline BiteLabel label_from_json(const json& j) {
  BiteLabel l;
  l.t = required<double>(j, "t");
  l.food_id = required<std::string>(j, "food_id");
  l.hand = parse_hand(required<std::string>(j, "hand"));
  l.utensil = parse_utensil(required<std::string>(j, "utensil"));
  l.container = parse_container(required<std::string>(j, "container"));
  l.rater_id = optional_field<std::string>(j, "rater_id", "");
  if (!std::isfinite(l.t) || l.t < 0.0) throw DataError(fmt::format("label time {} is invalid", l.t));
  return l;
}

inline std::string params_object(const DetectorParams& p) {
  return fmt::format(R"({{"t1":{},"t2":{},"t3":{},"t4":{}}})", exact(p.t1), exact(p.t2), exact(p.t3),
                     exact(p.t4));
}

inline DetectorParams params_from_json(const json& j) {
  DetectorParams p;
  p.t1 = optional_field<double>(j, "t1", p.t1);
  p.t2 = optional_field<double>(j, "t2", p.t2);
  p.t3 = optional_field<double>(j, "t3", p.t3);
  p.t4 = optional_field<double>(j, "t4", p.t4);
  return p;
}

inline std::string optional_label(const std::optional<BiteLabel>& l) {
  return l ? label_object(*l) : "null";
}

// Conflict record without queue status.
inline std::string conflict_object(const Conflict& c, std::string_view extra = {}) {
  std::string out = fmt::format(R"({{"id":{},"course_id":{},"kind":"{}","pair_id":{},"a":{},"b":{})",
                                json_string(c.id), json_string(c.course_id), to_string(c.kind),
                                c.pair_id ? std::to_string(*c.pair_id) : "null", optional_label(c.a),
                                optional_label(c.b));
  out += extra;
  out += "}";
  return out;
}

inline Conflict conflict_from_json(const json& j) {
  Conflict c;
  c.id = required<std::string>(j, "id");
  c.course_id = required<std::string>(j, "course_id");
  c.kind = parse_conflict_kind(required<std::string>(j, "kind"));
  if (j.contains("pair_id") && !j.at("pair_id").is_null()) c.pair_id = j.at("pair_id").get<std::size_t>();
  if (j.contains("a") && !j.at("a").is_null()) c.a = label_from_json(j.at("a"));
  if (j.contains("b") && !j.at("b").is_null()) c.b = label_from_json(j.at("b"));
  return c;
}

// Decision line: conflict_id, resolution, judge_id, and for custom the label
// fields inline.
inline std::string decision_object(const Adjudication& d) {
  std::string out = fmt::format(R"({{"conflict_id":{},"resolution":"{}","judge_id":{})", json_string(d.conflict_id),
                                to_string(d.resolution), json_string(d.judge_id));
  if (d.resolution == Resolution::Custom && d.custom) {
    const auto& l = *d.custom;
    out += fmt::format(R"(,"t":{},"food_id":{},"hand":"{}","utensil":"{}","container":"{}")", fixed3(l.t),
                       json_string(l.food_id), to_string(l.hand), to_string(l.utensil), to_string(l.container));
  }
  out += "}";
  return out;
}

inline Adjudication decision_from_json(const json& j) {
  Adjudication d;
  d.conflict_id = required<std::string>(j, "conflict_id");
  d.resolution = parse_resolution(required<std::string>(j, "resolution"));
  d.judge_id = required<std::string>(j, "judge_id");
  if (d.judge_id.empty()) throw DataError("judge_id must not be empty");
  if (d.resolution == Resolution::Custom) {
    BiteLabel l = label_from_json(j);
    l.rater_id = d.judge_id;
    d.custom = std::move(l);
  }
  return d;
}

inline json participant_to_json(const Participant& p) {
  return json{{"id", p.id},
              {"gender", p.gender},
              {"age", p.age},
              {"ethnicity", p.ethnicity},
              {"dominant_hand", std::string(to_string(p.dominant_hand))},
              {"height", p.height},
              {"weight", p.weight}};
}

inline Participant participant_from_json(const json& j) {
  Participant p;
  p.id = required<std::string>(j, "id");
  p.gender = optional_field<std::string>(j, "gender", "");
  p.age = required<double>(j, "age");
  p.ethnicity = optional_field<std::string>(j, "ethnicity", "");
  p.dominant_hand = parse_hand(optional_field<std::string>(j, "dominant_hand", "right"));
  p.height = optional_field<double>(j, "height", 0.0);
  p.weight = optional_field<double>(j, "weight", 0.0);
  if (!(p.age > 0.0)) throw DataError(fmt::format("participant {}: age must be > 0", p.id));
  return p;
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace bitewatch::codec
