#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "bitewatch/detector.hpp"
#include "bitewatch/evaluation.hpp"
#include "bitewatch/groundtruth.hpp"
#include "bitewatch/synth.hpp"

using namespace bitewatch;

namespace {

// A meal with one bite every 12 s and light noise.
synth::Rendered meal(double minutes) {
  synth::MealScript s;
  s.duration_s = minutes * 60.0;
  s.noise_std = 3.0;
  for (double t = 5.0; t + 1.0 < s.duration_s; t += 12.0) s.bites.push_back({t});
  return synth::render(s, 11);
}

std::vector<BiteLabel> labels(std::size_t n, double jitter, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::vector<BiteLabel> out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back({10.0 + 8.0 * static_cast<double>(k) + u(rng), "rice", Hand::Right, Utensil::Fork,
                   Container::Plate, "r"});
  }
  return out;
}

void BM_Smooth(benchmark::State& state) {
  const auto r = meal(static_cast<double>(state.range(0)));
  const auto times = r.trace.times();
  const auto roll = r.trace.roll();
  for (auto _ : state) benchmark::DoNotOptimize(smooth_channel(times, roll));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(times.size()));
}
BENCHMARK(BM_Smooth)->Arg(1)->Arg(10)->Arg(60);

void BM_DetectCourse(benchmark::State& state) {
  const auto r = meal(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(detect_course(r.trace));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.trace.size()));
}
BENCHMARK(BM_DetectCourse)->Arg(1)->Arg(10)->Arg(60);

void BM_DetectRollOnly(benchmark::State& state) {
  const auto r = meal(static_cast<double>(state.range(0)));
  const auto times = r.trace.times();
  const auto roll = smooth_channel(times, r.trace.roll());
  for (auto _ : state) benchmark::DoNotOptimize(detect_roll(times, roll, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(times.size()));
}
BENCHMARK(BM_DetectRollOnly)->Arg(10)->Arg(60);

void BM_Classify(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  GroundTruth gt;
  gt.bites = labels(n, 0.0, 1);
  std::vector<Detection> dets;
  for (const auto& b : labels(n, 3.0, 2)) dets.push_back({b.t});
  for (auto _ : state) benchmark::DoNotOptimize(classify(dets, gt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Classify)->Arg(100)->Arg(1000)->Arg(10000);

void BM_MatchRaters(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = labels(n, 0.5, 3);
  const auto b = labels(n, 1.5, 4);
  for (auto _ : state) benchmark::DoNotOptimize(match_raters("c", a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MatchRaters)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
