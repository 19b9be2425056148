// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit
// status is non-zero when any selected criterion fails.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only (1-based)
//   acceptance --list          print the criterion names

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bitewatch/dataset.hpp"
#include "bitewatch/pipeline.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace bitewatch;
namespace io = bitewatch::io;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;  // printed under a failing line

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (notes.size() < 20) notes.push_back(what);
    }
  }
};

BiteLabel bite_at(double t, std::string food = "rice") {
  return BiteLabel{t, std::move(food), Hand::Right, Utensil::Fork, Container::Plate, std::string(kMergedRater)};
}

// -- 1 ---------------------------------------------------------------------

Verdict detector_conformance() {
  Verdict v;
  gen::Rng rng(20240601);
  std::size_t mismatches = 0, detections = 0, samples = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int rep = 0; rep < 10000; ++rep) {
    const auto trace = gen::trace(rng, 1 + gen::index(rng, 2000));
    const auto params = gen::coin(rng, 0.2) ? DetectorParams{} : gen::params(rng);
    const auto got = detect_course(trace, params);

    const auto times = trace.times();
    const auto roll = smooth_channel(times, trace.roll());
    const auto want = oracle::detect(times, roll, params.t1, params.t2, params.t3, params.t4);
    std::vector<double> got_t;
    for (const auto& d : got) got_t.push_back(d.t);
    if (got_t != want) {
      ++mismatches;
      v.require(false, fmt::format("trace {} ({} samples, {}): {} vs {} detections", rep, trace.size(),
                                   params.describe(), got_t.size(), want.size()));
    }
    detections += want.size();
    samples += trace.size();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.require(secs < 60.0, fmt::format("runtime {:.1f} s exceeds 60 s", secs));
  v.detail = fmt::format("10000 traces, {} samples, {} detections, {} mismatches, {:.1f} s", samples, detections,
                         mismatches, secs);
  return v;
}

// -- 2 ---------------------------------------------------------------------

Verdict clean_corpus() {
  Verdict v;
  std::vector<synth::Profile> profiles;
  for (int i = 0; i < 50; ++i) {
    synth::Profile p;
    p.participant = {fmt::format("p{:02}", i), i % 2 ? "male" : "female", 20.0 + i, "white", Hand::Right, 170, 70};
    // Every gap exceeds t4 + t3 + gesture span = 13.5 s.
    p.spb_mean = 14.0 + 0.1 * (i % 20);
    p.spb_std = 0.0;
    p.n_bites = 20;
    profiles.push_back(p);
  }
  const auto corpus = synth::cohort(profiles, 7);
  const DetectorParams defaults{10, 10, 2, 8};
  Totals totals;
  std::size_t bites = 0;
  for (const auto& c : corpus.courses) {
    const auto& b = c.script.bites;
    for (std::size_t k = 1; k < b.size(); ++k) {
      v.require(b[k].t - b[k - 1].t > defaults.t4 + defaults.t3 + b[k].gesture.span(), "spacing too small");
    }
    bites += c.rendered.truth.bites.size();
    totals += classify(detect_course(c.rendered.trace, defaults), c.rendered.truth);
  }
  v.require(corpus.courses.size() == 50 && bites == 1000, "corpus shape");
  v.require(totals.sensitivity() == 1.0, "sensitivity != 1");
  v.require(totals.ppv() == 1.0, "ppv != 1");
  v.detail = fmt::format("50 courses, {} bites: T={} F={} U={} sensitivity={} ppv={}", bites, totals.t, totals.f,
                         totals.u, io::format_metric(totals.sensitivity()), io::format_metric(totals.ppv()));
  return v;
}

// -- 3 ---------------------------------------------------------------------

// Fast eaters: every inter-bite gap uniform in [6 + t3, 8 + t3] s. Each
// course ends with a scripted distractor pair (a positive blip, then a
// negative one 2.5 s later) starting 7 s after the last bite.
std::vector<SweepCourse> fast_corpus(std::size_t n_courses, std::uint64_t seed) {
  gen::Rng rng(seed);
  const double t3 = 2.0;
  std::vector<SweepCourse> out;
  for (std::size_t c = 0; c < n_courses; ++c) {
    synth::MealScript s;
    s.course_id = fmt::format("fast{:03}", c);
    s.noise_std = 2.0;
    double t = 5.0;
    for (int k = 0; k < 25; ++k) {
      synth::ScriptedBite b;
      b.t = t;
      s.bites.push_back(b);
      t += gen::uniform(rng, 6.0 + t3, 8.0 + t3);
    }
    const double last = s.bites.back().t;
    s.distractors.push_back({last + 7.0, 30.0, 0.5});
    s.distractors.push_back({last + 9.5, -30.0, 0.5});
    s.duration_s = last + 12.0;
    auto r = synth::render(s, seed + c);
    out.push_back({std::move(r.trace), std::move(r.truth)});
  }
  return out;
}

Verdict refractory_tradeoff() {
  Verdict v;
  const auto courses = fast_corpus(40, 99);
  ParamGrid grid;
  grid.t4 = {6.0, 8.0};
  const auto params = grid.expand();
  const auto rows = parameter_sweep(courses, params);
  const auto& r6 = rows[0];
  const auto& r8 = rows[1];
  v.require(*r6.sensitivity > *r8.sensitivity, "sensitivity(T4=6) <= sensitivity(T4=8)");
  v.require(r6.totals.f >= r8.totals.f, "false detections(T4=6) < false detections(T4=8)");
  v.detail = fmt::format("T4=6: sens={:.3f} ppv={:.3f} F={}; T4=8: sens={:.3f} ppv={:.3f} F={}", *r6.sensitivity,
                         *r6.ppv, r6.totals.f, *r8.sensitivity, *r8.ppv, r8.totals.f);
  return v;
}

// -- 4 ---------------------------------------------------------------------

struct Row {
  std::string key;
  std::size_t bites;
  std::size_t detected;
  int published_pct;
};

// Tags bites with one category per variable: detected bites fill the rows
// in order, then undetected bites do. Every variable's rows must cover the
// same bite and detection totals.
std::vector<std::string> assign(const std::vector<Row>& rows) {
  std::vector<std::string> tag;
  for (const auto& r : rows) tag.insert(tag.end(), r.detected, r.key);
  for (const auto& r : rows) tag.insert(tag.end(), r.bites - r.detected, r.key);
  return tag;
}

// Builds one course per distinct tag combination, with a detection on each
// detected bite, and scores it through classify().
std::vector<CourseEvaluation> fixture_courses(const std::vector<std::map<std::string, std::string>>& bite_tags,
                                              std::size_t n_detected, std::vector<Participant>& people,
                                              const std::function<Participant(const std::map<std::string, std::string>&)>& person,
                                              const std::function<void(BiteLabel&, const std::map<std::string, std::string>&)>& label) {
  std::map<std::string, CourseEvaluation> by_key;
  std::map<std::string, std::vector<Detection>> dets;
  for (std::size_t k = 0; k < bite_tags.size(); ++k) {
    std::string key;
    for (const auto& [var, val] : bite_tags[k]) key += var + "=" + val + ";";
    auto& c = by_key[key];
    if (c.course_id.empty()) {
      c.course_id = fmt::format("fx{:03}", by_key.size());
      Participant p = person(bite_tags[k]);
      p.id = "pid-" + c.course_id;
      c.participant_id = p.id;
      people.push_back(p);
    }
    const double t = 15.0 * static_cast<double>(c.actual.bites.size() + 1);
    BiteLabel b = bite_at(t);
    label(b, bite_tags[k]);
    c.actual.bites.push_back(b);
    if (k < n_detected) dets[key].push_back({t});
  }
  std::vector<CourseEvaluation> out;
  for (auto& [key, c] : by_key) {
    c.actual.course_id = c.course_id;
    c.duration_s = 15.0 * static_cast<double>(c.actual.bites.size() + 1);
    c.outcome = classify(dets[key], c.actual);
    out.push_back(std::move(c));
  }
  return out;
}

void check_printed(Verdict& v, GroupBy g, const std::vector<CourseEvaluation>& courses,
                   const std::vector<Participant>& people, const std::vector<Row>& rows, std::size_t& matched,
                   std::size_t& total) {
  const auto report = stratified_report(courses, people, g);
  const auto tsv = io::format_report_tsv(g, report);
  std::map<std::string, std::string> printed;
  std::istringstream lines(tsv);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::vector<std::string> cols;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, '\t')) cols.push_back(f);
    printed[cols.at(0)] = cols.at(5);
  }
  for (const auto& r : rows) {
    ++total;
    const auto want = fmt::format("{}%", r.published_pct);
    const auto got = printed.count(r.key) ? printed[r.key] : std::string("(missing)");
    if (got == want) {
      ++matched;
    } else {
      v.require(false, fmt::format("{} {}: printed {} ({}/{}), published {}", to_string(g), r.key, got, r.detected,
                                   r.bites, want));
    }
  }
}

Verdict stratified_sensitivity() {
  Verdict v;
  std::size_t matched = 0, total = 0;

  // Demographic table: one joint fixture, every variable sums to 24088/17956.
  const std::vector<Row> age{{"51-75", 1634, 1404, 86},
                             {"41-50", 2790, 2227, 80},
                             {"31-40", 2531, 1949, 77},
                             {"24-30", 7426, 5326, 72},
                             {"18-23", 9707, 7050, 73}};
  const std::vector<Row> gender{{"female", 11811, 9401, 80}, {"male", 12277, 8555, 70}};
  const std::vector<Row> ethnicity{{"African American", 1958, 1583, 81},
                                   {"Caucasian", 15990, 12327, 77},
                                   {"Hispanic", 1195, 877, 73},
                                   {"Other", 1635, 1115, 68},
                                   {"Asian or Pac. Isl.", 3310, 2054, 62}};
  const std::map<std::string, double> age_of{{"51-75", 60}, {"41-50", 45}, {"31-40", 35}, {"24-30", 27}, {"18-23", 20}};
  {
    const std::size_t n_detected = 17956;
    const auto a = assign(age), g = assign(gender), e = assign(ethnicity);
    std::vector<std::map<std::string, std::string>> tags(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) tags[k] = {{"age", a[k]}, {"gender", g[k]}, {"ethnicity", e[k]}};
    std::vector<Participant> people;
    const auto courses = fixture_courses(
        tags, n_detected, people,
        [&](const auto& t) {
          return Participant{"", t.at("gender"), age_of.at(t.at("age")), t.at("ethnicity"), Hand::Right, 170, 70};
        },
        [](BiteLabel&, const auto&) {});
    check_printed(v, GroupBy::Age, courses, people, age, matched, total);
    check_printed(v, GroupBy::Gender, courses, people, gender, matched, total);
    check_printed(v, GroupBy::Ethnicity, courses, people, ethnicity, matched, total);
  }

  // Bite-variable table: the three variables have different totals, so
  // each gets its own fixture.
  const std::vector<Row> container{
      {"bowl", 3939, 3091, 79}, {"mug", 116, 87, 75}, {"plate", 16434, 12389, 74}, {"glass", 3599, 2389, 66}};
  const std::vector<Row> utensil{
      {"fork", 10308, 8627, 83}, {"spoon", 2389, 1711, 73}, {"hand", 10989, 7419, 68}, {"chopsticks", 400, 198, 50}};
  const std::vector<Row> hand_used{{"l-handed using left hand", 1363, 1106, 81},
                                   {"r-handed using right hand", 18344, 14267, 78},
                                   {"l-handed using both hands", 162, 116, 72},
                                   {"r-handed using both hands", 1233, 860, 70}};
  auto single = [&](GroupBy g, const std::vector<Row>& rows) {
    std::size_t n_detected = 0;
    for (const auto& r : rows) n_detected += r.detected;
    const auto tag = assign(rows);
    std::vector<std::map<std::string, std::string>> tags(tag.size());
    for (std::size_t k = 0; k < tag.size(); ++k) tags[k] = {{"v", tag[k]}};
    std::vector<Participant> people;
    const auto courses = fixture_courses(
        tags, n_detected, people,
        [&](const auto& t) {
          const bool left = t.at("v").rfind("l-handed", 0) == 0;
          return Participant{"", "female", 30, "Caucasian", left ? Hand::Left : Hand::Right, 170, 70};
        },
        [&](BiteLabel& b, const auto& t) {
          const auto& val = t.at("v");
          if (g == GroupBy::Container) b.container = parse_container(val);
          if (g == GroupBy::Utensil) b.utensil = parse_utensil(val);
          if (g == GroupBy::HandUsed) {
            b.hand = val.find("both") != std::string::npos ? Hand::Both
                     : val.find("left hand") != std::string::npos ? Hand::Left
                                                                  : Hand::Right;
          }
        });
    check_printed(v, g, courses, people, rows, matched, total);
  };
  single(GroupBy::Container, container);
  single(GroupBy::Utensil, utensil);
  single(GroupBy::HandUsed, hand_used);

  v.detail = fmt::format("{}/{} published sensitivity percentages reproduced", matched, total);
  return v;
}

// -- 5 ---------------------------------------------------------------------

Verdict rater_error_rates() {
  Verdict v;
  // Two raters over one long course. Each label pair is 10 s from the next;
  // the first `counts` pairs are disturbed to raise one conflict each.
  const std::size_t missed = 900, time_err = 1217, identity = 714, entry = 1059, total_bites = 24088;
  std::vector<BiteLabel> a, b;
  std::size_t k = 0;
  auto next_t = [&] { return 10.0 * static_cast<double>(++k); };
  for (std::size_t i = 0; i < missed; ++i) a.push_back(bite_at(next_t()));
  for (std::size_t i = 0; i < time_err; ++i) {
    const double t = next_t();
    a.push_back(bite_at(t));
    b.push_back(bite_at(t + 1.5));
  }
  for (std::size_t i = 0; i < identity; ++i) {
    const double t = next_t();
    a.push_back(bite_at(t, "rice"));
    b.push_back(bite_at(t + 0.2, "soup"));
  }
  for (std::size_t i = 0; i < entry; ++i) {
    const double t = next_t();
    a.push_back(bite_at(t));
    auto x = bite_at(t - 0.3);
    x.hand = Hand::Left;
    b.push_back(x);
  }
  while (a.size() < total_bites) {
    const double t = next_t();
    a.push_back(bite_at(t));
    b.push_back(bite_at(t + 0.1));
  }
  for (auto& l : a) l.rater_id = "a";
  for (auto& l : b) l.rater_id = "b";

  const auto m = match_raters("table1", a, b);
  const auto tsv = io::format_error_report_tsv(error_report(m.conflicts, total_bites), total_bites);
  const std::vector<std::pair<std::string, std::string>> expected{
      {"missed_bite", "900\t3.7%"}, {"time_error", "1217\t5.0%"}, {"identity_error", "714\t3.0%"},
      {"data_entry_error", "1059\t4.4%"}};
  std::string printed;
  for (const auto& [kind, want] : expected) {
    const auto pos = tsv.find(kind + "\t");
    const auto line = pos == std::string::npos ? std::string("(missing)")
                                               : tsv.substr(pos + kind.size() + 1, tsv.find('\n', pos) - pos - kind.size() - 1);
    printed += (printed.empty() ? "" : ", ") + kind + " " + line;
    v.require(line == want, fmt::format("{}: printed \"{}\", published \"{}\"", kind, line, want));
  }
  v.detail = printed;
  return v;
}

// -- 6 ---------------------------------------------------------------------

Verdict evaluation_identities() {
  Verdict v;
  gen::Rng rng(6060);
  std::size_t violations = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const bool grid = gen::coin(rng);
    const auto dt = gen::times(rng, gen::index(rng, 12), 60.0, grid);
    const auto bt = gen::times(rng, gen::index(rng, 12), 60.0, grid);
    std::vector<Detection> d;
    for (double t : dt) d.push_back({t});
    GroundTruth gt;
    for (double t : bt) gt.bites.push_back(bite_at(t));
    const auto o = classify(d, gt);

    bool ok = o.true_count() + o.undetected_count() == bt.size() && o.true_count() + o.false_count() == dt.size();
    std::set<std::size_t> used_bites;
    std::set<double> used_dets;
    for (std::size_t k = 0; k < o.pairs.size(); ++k) {
      ok &= used_bites.insert(o.paired_bite_index[k]).second;
      ok &= used_dets.insert(o.pairs[k].first.t).second || grid;  // grid times may repeat across series only
      const auto it = std::find(dt.begin(), dt.end(), o.pairs[k].first.t);
      const auto i = static_cast<std::size_t>(it - dt.begin());
      const double lo = i == 0 ? -INFINITY : dt[i - 1];
      const double hi = i + 1 < dt.size() ? dt[i + 1] : INFINITY;
      ok &= o.pairs[k].second.t > lo && o.pairs[k].second.t < hi;
    }
    const auto want = oracle::classify(dt, bt);
    ok &= want.pairs.size() == o.pairs.size() && want.false_detections.size() == o.false_count();
    if (!ok) {
      ++violations;
      v.require(false, fmt::format("case {}: {} detections, {} bites", rep, dt.size(), bt.size()));
    }
  }
  v.detail = fmt::format("10000 cases, {} violations", violations);
  return v;
}

// -- 7 ---------------------------------------------------------------------

Verdict smoothing_suite() {
  Verdict v;
  gen::Rng rng(7070);
  double worst_sum = 0, worst_const = 0, worst_linear = 0, worst_impulse = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto n = 1 + gen::index(rng, 300);
    const auto t = gen::clock(rng, n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (double w : smoothing_weights(t, i, {}).weights) s += w;
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
    const double c = gen::uniform(rng, -100, 100);
    for (double y : smooth_channel(t, std::vector<double>(n, c))) worst_const = std::max(worst_const, std::abs(y - c));

    const auto x = gen::roll(rng, n), y = gen::roll(rng, n);
    const double a = gen::uniform(rng, -5, 5), b = gen::uniform(rng, -5, 5);
    std::vector<double> ax(n);
    for (std::size_t i = 0; i < n; ++i) ax[i] = a * x[i] + b * y[i];
    const auto sx = smooth_channel(t, x), sy = smooth_channel(t, y), sax = smooth_channel(t, ax);
    for (std::size_t i = 0; i < n; ++i) worst_linear = std::max(worst_linear, std::abs(sax[i] - (a * sx[i] + b * sy[i])));
  }
  v.require(worst_sum <= 1e-9, fmt::format("weight sum off by {}", worst_sum));
  v.require(worst_const <= 1e-9, fmt::format("constant drifted by {}", worst_const));
  v.require(worst_linear <= 1e-7, fmt::format("linearity off by {}", worst_linear));

  // Unit impulse at the centre of a long zero trace, 15 Hz: the response
  // is the kernel w_k ∝ exp(-(k dt)^2 / (2 sigma^2)), |k dt| <= 0.5 s.
  const double dt = 1.0 / 15.0, sigma = 2.0 / 3.0;
  std::vector<double> w;
  double norm = 0;
  for (int k = -7; k <= 7; ++k) {
    w.push_back(std::exp(-(k * dt) * (k * dt) / (2 * sigma * sigma)));
    norm += w.back();
  }
  std::vector<double> times(301), impulse(301, 0.0);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) / 15.0;
  impulse[150] = 1.0;
  const auto resp = smooth_channel(times, impulse);
  for (int k = -7; k <= 7; ++k) {
    worst_impulse = std::max(worst_impulse, std::abs(resp[150 + k] - w[k + 7] / norm));
  }
  for (std::size_t i = 0; i < resp.size(); ++i) {
    if (i < 143 || i > 157) worst_impulse = std::max(worst_impulse, std::abs(resp[i]));
  }
  v.require(worst_impulse <= 1e-9, fmt::format("impulse response off by {}", worst_impulse));
  v.detail = fmt::format("max |sum-1|={:.1e}, const={:.1e}, linear={:.1e}, impulse={:.1e}", worst_sum, worst_const,
                         worst_linear, worst_impulse);
  return v;
}

// -- 8 ---------------------------------------------------------------------

Verdict rater_merge() {
  Verdict v;
  gen::Rng rng(8080);
  std::size_t conservation_failures = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    auto [a, b] = gen::rater_pair(rng, gen::index(rng, 30));
    const auto m = match_raters("c", a, b);
    std::size_t missed = 0;
    for (const auto& c : m.conflicts) missed += c.kind == ConflictKind::MissedBite;
    if (a.size() + b.size() != 2 * (m.merged_pairs + m.conflict_pairs) + missed) {
      ++conservation_failures;
      v.require(false, fmt::format("conservation fails on case {}", rep));
    }
  }

  std::size_t identical_conflicts = 0, shift_failures = 0;
  double worst = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    // Bites at least 2.5 s apart, so a shift of up to 1 s cannot bring a
    // label closer to its neighbour's counterpart than to its own.
    std::vector<BiteLabel> a;
    double t = 1.0;
    for (std::size_t k = 0, n = 1 + gen::index(rng, 30); k < n; ++k) {
      t += std::round(gen::uniform(rng, 2.5, 20.0) * 1000.0) / 1000.0;
      a.push_back(gen::label(rng, t, "a"));
    }
    identical_conflicts += match_raters("c", a, a).conflicts.size();
    const double shift = gen::uniform(rng, -1.0, 1.0);
    auto b = a;
    for (auto& l : b) l.t += shift;
    const auto m = match_raters("c", a, b);
    if (!m.conflicts.empty() || m.draft.bites.size() != a.size()) {
      ++shift_failures;
      continue;
    }
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(m.draft.bites[i].t - (a[i].t + shift / 2)));
  }
  v.require(identical_conflicts == 0, "identical lists raised conflicts");
  v.require(shift_failures == 0, fmt::format("{} shifted lists not fully matched", shift_failures));
  v.require(worst <= 1e-9, fmt::format("merged time off half-shift by {}", worst));
  v.detail = fmt::format("conservation 10000 cases, {} failures; identical -> {} conflicts; shifts <= 1 s: {} "
                         "unmatched, max half-shift error {:.1e}",
                         conservation_failures, identical_conflicts, shift_failures, worst);
  return v;
}

// -- 9 ---------------------------------------------------------------------

Verdict pearson() {
  Verdict v;
  const std::vector<double> x{1, 2, 3, 4};
  const auto r = pearson_correlation(x, std::vector<double>{1, 3, 2, 4});
  const auto pos = pearson_correlation(x, std::vector<double>{3, 5, 7, 9});
  const auto neg = pearson_correlation(x, std::vector<double>{-1, -2, -3, -4});
  v.require(r && std::abs(*r - 0.8) <= 1e-12, "r([1,2,3,4],[1,3,2,4]) != 0.8");
  v.require(pos && std::abs(*pos - 1.0) <= 1e-12, "y = 2x + 1 does not give 1");
  v.require(neg && std::abs(*neg + 1.0) <= 1e-12, "y = -x does not give -1");
  v.detail = fmt::format("r={:.15f}, +1 case {:.15f}, -1 case {:.15f}", r.value_or(NAN), pos.value_or(NAN),
                         neg.value_or(NAN));
  return v;
}

// -- 10 --------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = io::read_file(e.path());
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  gen::TempDir dir("determinism");
  std::vector<synth::Profile> profiles;
  for (int i = 0; i < 6; ++i) {
    synth::Profile p;
    p.participant = {fmt::format("p{}", i), i % 2 ? "male" : "female", 22.0 + 8 * i, "Caucasian", Hand::Right, 170, 70};
    p.spb_mean = 11 + i;
    p.spb_std = 3;
    p.n_bites = 30;
    p.noise_std = 4;
    p.menu = {"cheese pizza", "salad", "soup"};
    profiles.push_back(p);
  }
  const auto manifest = io::write_synth_dataset(dir / "data", synth::cohort(profiles, 5), {"determinism", 0.25});
  const auto data_before = snapshot(dir / "data");
  io::write_synth_dataset(dir / "data2", synth::cohort(profiles, 5), {"determinism", 0.25});
  v.require(snapshot(dir / "data2") == data_before, "synth dataset differs between generations");

  io::PipelineOptions opts;
  opts.food_min_bites = 10;
  const auto first = io::run_pipeline(io::Workbench(io::load_dataset(manifest)), dir / "out", opts);
  const auto out1 = snapshot(dir / "out");
  opts.force = true;
  io::run_pipeline(io::Workbench(io::load_dataset(manifest)), dir / "out", opts);
  v.require(snapshot(dir / "out") == out1, "forced rerun changed artifacts");
  io::run_pipeline(io::Workbench(io::load_dataset(manifest)), dir / "fresh", opts);
  v.require(snapshot(dir / "fresh") == out1, "run into a fresh directory differs");
  opts.force = false;
  const auto skipped = io::run_pipeline(io::Workbench(io::load_dataset(manifest)), dir / "out", opts);
  v.require(skipped.skipped, "unchanged rerun was not skipped");
  v.require(snapshot(dir / "out") == out1, "skipped rerun changed artifacts");
  v.require(snapshot(dir / "data") == data_before, "pipeline modified its inputs");
  v.detail = fmt::format("{} artifacts byte-identical across reruns, input hash {}", out1.size(), first.input_hash);
  return v;
}

struct Criterion {
  const char* name;
  Verdict (*run)();
};

const Criterion kCriteria[] = {
    {"detector conformance", detector_conformance},
    {"clean-corpus perfection", clean_corpus},
    {"refractory tradeoff", refractory_tradeoff},
    {"stratified sensitivity tables", stratified_sensitivity},
    {"rater error-rate table", rater_error_rates},
    {"evaluation identities", evaluation_identities},
    {"smoothing suite", smoothing_suite},
    {"rater-merge properties", rater_merge},
    {"pearson check", pearson},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  constexpr int n = static_cast<int>(std::size(kCriteria));
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--list") == 0) {
      for (int k = 0; k < n; ++k) std::cout << k + 1 << "\t" << kCriteria[k].name << "\n";
      return 0;
    }
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const int k = std::atoi(argv[++i]);
      if (k < 1 || k > n) {
        std::cerr << "criterion must be 1.." << n << "\n";
        return 2;
      }
      selected.push_back(k - 1);
      continue;
    }
    std::cerr << "usage: acceptance [--list] [--criterion N]...\n";
    return 2;
  }
  if (selected.empty()) {
    for (int k = 0; k < n; ++k) selected.push_back(k);
  }

  int failed = 0;
  for (int k : selected) {
    Verdict v;
    try {
      v = kCriteria[k].run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << "[" << k + 1 << "] " << kCriteria[k].name << ": " << v.detail << "\n";
    if (!v.pass) {
      ++failed;
      for (const auto& note : v.notes) std::cout << "    " << note << "\n";
    }
  }
  return failed ? 1 : 0;
}
