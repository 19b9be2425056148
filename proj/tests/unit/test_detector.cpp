#include <doctest.h>

#include "bitewatch/detector.hpp"
#include "bitewatch/synth.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace bitewatch;

namespace {

std::vector<Detection> run(const std::vector<std::pair<double, double>>& series, DetectorParams p = {}) {
  std::vector<double> t, v;
  for (auto [a, b] : series) {
    t.push_back(a);
    v.push_back(b);
  }
  return detect_roll(t, v, p);
}

// 10 Hz series that is zero except at the given (t, v) points.
std::vector<std::pair<double, double>> pulses(double end, std::vector<std::pair<double, double>> at) {
  std::vector<std::pair<double, double>> s;
  for (int k = 0; k <= static_cast<int>(end * 10); ++k) {
    const double t = k / 10.0;
    double v = 0.0;
    for (auto [pt, pv] : at) {
      if (std::abs(pt - t) < 1e-9) v = pv;
    }
    s.emplace_back(t, v);
  }
  return s;
}

synth::MealScript spaced(std::size_t n, double spacing) {
  synth::MealScript m;
  m.duration_s = spacing * static_cast<double>(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    synth::ScriptedBite b;
    b.t = spacing * static_cast<double>(i);
    m.bites.push_back(b);
  }
  return m;
}

}  // namespace

TEST_CASE("flat signal never fires") {
  CHECK(run(pulses(30, {})).empty());
}

TEST_CASE("+20 at t=1 then -20 at t=4 fires at 4.0") {
  const auto d = run(pulses(10, {{1.0, 20.0}, {4.0, -20.0}}));
  REQUIRE(d.size() == 1);
  CHECK(d[0].t == 4.0);
}

TEST_CASE("negative lobe 1.5 s after the positive one is too early") {
  DetectorState st;
  for (auto [t, v] : pulses(3, {{1.0, 20.0}, {2.5, -20.0}})) {
    auto r = step(st, t, v, {});
    CHECK_FALSE(r.detection);
    st = r.state;
  }
  CHECK(st.event == DetectorEvent::RolledPositive);
}

TEST_CASE("thresholds are strict") {
  CHECK(run(pulses(10, {{1.0, 10.0}, {4.0, -20.0}})).empty());
  CHECK(run(pulses(10, {{1.0, 20.0}, {4.0, -10.0}})).empty());
  // t - s == t3 exactly does not satisfy t - s > t3.
  CHECK(run({{0.0, 20.0}, {2.0, -20.0}}).empty());
  CHECK(run({{0.0, 20.0}, {2.0, -20.0}, {2.5, -20.0}}).size() == 1);
}

TEST_CASE("refractory period blocks re-arming for more than t4") {
  // Bite at 4.0; re-arm needs t - 4 > 8.
  auto s = pulses(30, {{1.0, 20.0}, {4.0, -20.0}, {11.9, 20.0}, {15.0, -20.0}});
  CHECK(run(s).size() == 1);
  s = pulses(30, {{1.0, 20.0}, {4.0, -20.0}, {12.1, 20.0}, {15.0, -20.0}});
  // At 12.1 the Refractory->Idle transition happens after the positive
  // check, so that sample cannot arm; 12.2 is zero. Nothing fires.
  CHECK(run(s).size() == 1);
  s = pulses(30, {{1.0, 20.0}, {4.0, -20.0}, {12.2, 20.0}, {15.0, -20.0}});
  CHECK(run(s).size() == 2);
}

TEST_CASE("non-increasing time is a contract violation") {
  DetectorState st = step({}, 1.0, 0.0, {}).state;
  CHECK_THROWS_AS(step(st, 1.0, 0.0, {}), ContractViolation);
  CHECK_THROWS_AS(step(st, 0.5, 0.0, {}), ContractViolation);
}

TEST_CASE("parameters are validated") {
  CHECK_THROWS_AS((DetectorParams{0.0, 10, 2, 8}.check()), ContractViolation);
  CHECK_THROWS_AS((DetectorParams{10, -1, 2, 8}.check()), ContractViolation);
  CHECK_THROWS_AS((DetectorParams{10, 10, -1, 8}.check()), ContractViolation);
  CHECK_NOTHROW((DetectorParams{10, 10, 0, 0}.check()));
}

TEST_CASE("reset") {
  SUBCASE("reset then flat signal") {
    Detector d;
    d.push(0.0, 50.0);
    d.reset();
    for (int k = 1; k < 100; ++k) CHECK_FALSE(d.push(k * 0.1, 0.0));
  }
  SUBCASE("reset clears refractory") {
    Detector d;
    std::vector<double> hits;
    for (auto [t, v] : pulses(10, {{1.0, 20.0}, {4.0, -20.0}, {5.0, 20.0}, {8.0, -20.0}})) {
      if (t == 4.5) d.reset();
      if (auto det = d.push(t, v)) hits.push_back(det->t);
    }
    CHECK(hits == std::vector<double>{4.0, 8.0});
  }
  SUBCASE("reset is idempotent") {
    DetectorState st = step({}, 3.0, 20.0, {}).state;
    CHECK(reset(reset(st)) == reset(st));
    CHECK(reset(st).event == DetectorEvent::Idle);
  }
}

TEST_CASE("streaming matches batch") {
  gen::Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const auto t = gen::clock(rng, 500);
    const auto v = gen::roll(rng, 500);
    const auto p = gen::params(rng);
    Detector d(p);
    std::vector<Detection> streamed;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (auto det = d.push(t[i], v[i])) streamed.push_back(*det);
    }
    CHECK(streamed == detect_roll(t, v, p));
  }
}

TEST_CASE("detect_roll matches the loop transcription") {
  gen::Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = gen::clock(rng, 1 + gen::index(rng, 800));
    const auto v = gen::roll(rng, t.size());
    const auto p = gen::params(rng);
    std::vector<double> got;
    for (const auto& d : detect_roll(t, v, p)) got.push_back(d.t);
    CHECK(got == oracle::detect(t, v, p.t1, p.t2, p.t3, p.t4));
  }
}

TEST_CASE("detections are spaced by more than t4 + t3") {
  gen::Rng rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = gen::clock(rng, 600);
    const auto v = gen::roll(rng, 600);
    const auto p = gen::params(rng);
    const auto d = detect_roll(t, v, p);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].t - d[i - 1].t > p.t4 + p.t3);
  }
}

TEST_CASE("raising t1 never adds detections") {
  gen::Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = gen::clock(rng, 600);
    const auto v = gen::roll(rng, 600);
    auto p = gen::params(rng);
    const auto lo = detect_roll(t, v, p).size();
    p.t1 += gen::uniform(rng, 0.0, 20.0);
    CHECK(detect_roll(t, v, p).size() <= lo);
  }
}

TEST_CASE("scaling roll and both thresholds leaves detections unchanged") {
  gen::Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = gen::clock(rng, 400);
    auto v = gen::roll(rng, 400);
    auto p = gen::params(rng);
    const auto before = detect_roll(t, v, p);
    const double k = std::ldexp(1.0, static_cast<int>(gen::index(rng, 9)) - 4);  // exact in binary
    for (auto& x : v) x *= k;
    p.t1 *= k;
    p.t2 *= k;
    CHECK(detect_roll(t, v, p) == before);
  }
}

TEST_CASE("detect_course on rendered gestures") {
  SUBCASE("20 gestures 15 s apart -> 20 detections, one per gesture") {
    const auto r = synth::render(spaced(20, 15.0), 1);
    const auto d = detect_course(r.trace);
    REQUIRE(d.size() == 20);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i].t - r.truth.bites[i].t) < 2.0);
  }
  SUBCASE("gestures 5 s apart -> two of every three are missed") {
    // The next positive lobe starts inside the refractory period, and so
    // does the one after it.
    for (std::size_t n : {1u, 2u, 7u, 10u}) {
      const auto r = synth::render(spaced(n, 5.0), 1);
      CHECK(detect_course(r.trace).size() == (n + 2) / 3);
    }
  }
  SUBCASE("empty trace") { CHECK(detect_course(MotionTrace{}).empty()); }
  SUBCASE("invalid trace") {
    auto r = synth::render(spaced(2, 15.0), 1);
    r.trace.samples[10].t = r.trace.samples[9].t;
    CHECK_THROWS_AS(detect_course(r.trace), TraceValidationError);
  }
}
