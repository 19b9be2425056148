#include "bitewatch/evaluation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

namespace bitewatch {
namespace {

constexpr std::array<std::string_view, 7> kGroupNames = {"age",     "gender",    "ethnicity", "container",
                                                         "utensil", "hand_used", "food"};

int whole_percent(std::size_t num, std::size_t den) {
  return static_cast<int>((200ULL * num + den) / (2ULL * den));
}

double parse_number(std::string_view s) {
  const auto trimmed = s.substr(0, s.find_last_not_of(' ') + 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
  if (ec != std::errc{} || ptr != trimmed.data() + trimmed.size() || trimmed.empty()) {
    throw ContractViolation(fmt::format("grid value \"{}\" is not a number", s));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

EvalOutcome classify(std::span<const Detection> detections, const GroundTruth& actual) {
  for (std::size_t i = 1; i < detections.size(); ++i) {
    if (detections[i].t < detections[i - 1].t) {
      throw ContractViolation(fmt::format("detections not time-sorted at index {}", i));
    }
  }
  const auto& bites = actual.bites;
  require_sorted(bites, "ground truth");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  EvalOutcome out;
  std::vector<char> paired(bites.size(), 0);
  // Every bite before `next` is paired or at/below the current window's
  // lower bound, which never decreases.
  std::size_t next = 0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const double lo = i == 0 ? -kInf : detections[i - 1].t;
    const double hi = i + 1 == detections.size() ? kInf : detections[i + 1].t;
    while (next < bites.size() && (paired[next] || bites[next].t <= lo)) ++next;
    if (next < bites.size() && bites[next].t < hi) {
      paired[next] = 1;
      out.pairs.emplace_back(detections[i], bites[next]);
      out.paired_bite_index.push_back(next);
    } else {
      out.false_detections.push_back(detections[i]);
    }
  }
  for (std::size_t k = 0; k < bites.size(); ++k) {
    if (!paired[k]) out.undetected.push_back(bites[k]);
  }
  out.sensitivity = ratio(out.true_count(), bites.size());
  out.ppv = ratio(out.true_count(), detections.size());
  return out;
}

Totals& Totals::operator+=(const EvalOutcome& o) {
  t += o.true_count();
  f += o.false_count();
  u += o.undetected_count();
  return *this;
}

std::string_view to_string(GroupBy g) { return kGroupNames[static_cast<std::size_t>(g)]; }

GroupBy parse_group_by(std::string_view s) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == s) return static_cast<GroupBy>(i);
  }
  throw EnumError("group_by", std::string(s), std::vector<std::string>(kGroupNames.begin(), kGroupNames.end()));
}

std::string age_stratum(double age) {
  if (age < 18) return "<18";
  if (age < 24) return "18-23";
  if (age < 31) return "24-30";
  if (age < 41) return "31-40";
  if (age < 51) return "41-50";
  if (age < 76) return "51-75";
  return ">75";
}

std::string hand_used_stratum(Hand dominant, Hand used) {
  const char* who = dominant == Hand::Left ? "l" : "r";
  const char* how = used == Hand::Left ? "left hand" : used == Hand::Right ? "right hand" : "both hands";
  return fmt::format("{}-handed using {}", who, how);
}

UnknownParticipantError::UnknownParticipantError(const std::string& course_id,
                                                 const std::string& participant_id)
    : DataError(fmt::format("course \"{}\" references unknown participant \"{}\"", course_id,
                            participant_id)) {}

std::vector<StratumRow> stratified_report(std::span<const CourseEvaluation> courses,
                                          std::span<const Participant> participants, GroupBy group_by,
                                          SpbWeighting weighting) {
  std::unordered_map<std::string_view, const Participant*> people;
  for (const auto& p : participants) people.emplace(p.id, &p);

  struct Acc {
    std::size_t bites = 0;
    std::size_t detected = 0;
    double spb_sum = 0.0;
    std::size_t spb_bites = 0;
    // participant -> (spb sum, bites with spb)
    std::map<std::string, std::pair<double, std::size_t>> per_participant;
    std::set<std::string> participants;
  };
  std::map<std::string, Acc> acc;

  for (const auto& c : courses) {
    auto it = people.find(c.participant_id);
    if (it == people.end()) throw UnknownParticipantError(c.course_id, c.participant_id);
    const Participant& p = *it->second;
    const auto course_spb = c.duration_s > 0.0 ? seconds_per_bite(c.duration_s, c.actual.bites.size())
                                               : std::nullopt;
    std::vector<char> detected(c.actual.bites.size(), 0);
    for (auto k : c.outcome.paired_bite_index) detected.at(k) = 1;

    for (std::size_t k = 0; k < c.actual.bites.size(); ++k) {
      const auto& bite = c.actual.bites[k];
      std::string key;
      switch (group_by) {
        case GroupBy::Age: key = age_stratum(p.age); break;
        case GroupBy::Gender: key = p.gender; break;
        case GroupBy::Ethnicity: key = p.ethnicity; break;
        case GroupBy::Container: key = to_string(bite.container); break;
        case GroupBy::Utensil: key = to_string(bite.utensil); break;
        case GroupBy::HandUsed: key = hand_used_stratum(p.dominant_hand, bite.hand); break;
        case GroupBy::Food: key = bite.food_id; break;
      }
      Acc& a = acc[key];
      ++a.bites;
      a.detected += detected[k];
      a.participants.insert(p.id);
      if (course_spb) {
        const double spb = course_spb.value_or(0.0);
        a.spb_sum += spb;
        ++a.spb_bites;
        auto& pp = a.per_participant[p.id];
        pp.first += spb;
        ++pp.second;
      }
    }
  }

  std::vector<StratumRow> rows;
  for (const auto& [key, a] : acc) {
    StratumRow r;
    r.key = key;
    r.n_participants = a.participants.size();
    r.n_bites = a.bites;
    r.n_detected = a.detected;
    r.sensitivity = static_cast<double>(a.detected) / static_cast<double>(a.bites);
    r.sensitivity_percent = whole_percent(a.detected, a.bites);
    if (weighting == SpbWeighting::Bite && a.spb_bites > 0) {
      r.spb = a.spb_sum / static_cast<double>(a.spb_bites);
    } else if (weighting == SpbWeighting::Participant && !a.per_participant.empty()) {
      double sum = 0.0;
      for (const auto& [id, pp] : a.per_participant) sum += pp.first / static_cast<double>(pp.second);
      r.spb = sum / static_cast<double>(a.per_participant.size());
    }
    if (r.spb) r.spb_display = std::lround(*r.spb);
    rows.push_back(std::move(r));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const StratumRow& x, const StratumRow& y) {
    // Compare d_x/n_x > d_y/n_y exactly.
    const auto lhs = static_cast<unsigned long long>(x.n_detected) * y.n_bites;
    const auto rhs = static_cast<unsigned long long>(y.n_detected) * x.n_bites;
    if (lhs != rhs) return lhs > rhs;
    return x.key < y.key;
  });
  return rows;
}

std::optional<double> seconds_per_bite(double duration_s, std::size_t n_bites) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ContractViolation(fmt::format("course duration must be > 0, got {}", duration_s));
  }
  if (n_bites == 0) return std::nullopt;
  return duration_s / static_cast<double>(n_bites);
}

std::optional<double> pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ContractViolation(fmt::format("pearson: lengths differ ({} vs {})", x.size(), y.size()));
  }
  if (x.size() < 2) throw ContractViolation("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::optional<double> motion_amount(const MotionTrace& trace, double bite_t, double window_s) {
  if (!(window_s > 0.0)) throw ContractViolation("motion window must be > 0");
  const double half = window_s / 2.0;
  const auto& s = trace.samples;
  auto first = std::lower_bound(s.begin(), s.end(), bite_t - half,
                                [](const MotionSample& m, double t) { return m.t < t; });
  double sum = 0.0;
  std::size_t n = 0;
  for (auto it = first; it != s.end() && it->t - bite_t <= half; ++it) {
    if (std::abs(it->t - bite_t) > half) continue;
    sum += std::hypot(it->gyro[0], it->gyro[1], it->gyro[2]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

FoodAnalysis per_food_analysis(std::span<const CourseEvaluation> courses,
                               std::span<const MotionTrace> traces, std::size_t min_bites,
                               double motion_window_s) {
  if (traces.size() != courses.size()) {
    throw ContractViolation("per_food_analysis: one trace per course required");
  }
  struct Acc {
    std::size_t bites = 0;
    std::size_t detected = 0;
    double spb_sum = 0.0;
    std::size_t spb_n = 0;
    double motion_sum = 0.0;
    std::size_t motion_n = 0;
  };
  std::map<std::string, Acc> acc;
  for (std::size_t c = 0; c < courses.size(); ++c) {
    const auto& course = courses[c];
    const auto spb = course.duration_s > 0.0
                         ? seconds_per_bite(course.duration_s, course.actual.bites.size())
                         : std::nullopt;
    std::vector<char> detected(course.actual.bites.size(), 0);
    for (auto k : course.outcome.paired_bite_index) detected.at(k) = 1;
    for (std::size_t k = 0; k < course.actual.bites.size(); ++k) {
      const auto& bite = course.actual.bites[k];
      Acc& a = acc[bite.food_id];
      ++a.bites;
      a.detected += detected[k];
      if (spb) {
        a.spb_sum += *spb;
        ++a.spb_n;
      }
      if (auto m = motion_amount(traces[c], bite.t, motion_window_s)) {
        a.motion_sum += *m;
        ++a.motion_n;
      }
    }
  }

  FoodAnalysis out;
  for (const auto& [food, a] : acc) {
    if (a.bites <= min_bites) continue;
    FoodRow r;
    r.food = food;
    r.n_bites = a.bites;
    r.n_detected = a.detected;
    r.sensitivity = static_cast<double>(a.detected) / static_cast<double>(a.bites);
    if (a.spb_n) r.spb = a.spb_sum / static_cast<double>(a.spb_n);
    if (a.motion_n) r.motion = a.motion_sum / static_cast<double>(a.motion_n);
    out.rows.push_back(std::move(r));
  }

  auto correlate = [&](auto member) -> std::optional<double> {
    std::vector<double> xs, ys;
    for (const auto& r : out.rows) {
      if (!(r.*member)) continue;
      xs.push_back(r.sensitivity);
      ys.push_back(*(r.*member));
    }
    if (xs.size() < 2) return std::nullopt;
    return pearson_correlation(xs, ys);
  };
  out.sensitivity_vs_spb = correlate(&FoodRow::spb);
  out.sensitivity_vs_motion = correlate(&FoodRow::motion);
  return out;
}

std::vector<double> parse_grid_axis(std::string_view text) {
  if (text.empty()) throw ContractViolation("empty grid axis");
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ContractViolation(fmt::format("range \"{}\" must be start:stop:step", text));
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double stride = parse_number(parts[2]);
    if (!(stride > 0.0)) throw ContractViolation(fmt::format("range \"{}\" needs a positive step", text));
    if (stop < start) throw ContractViolation(fmt::format("range \"{}\" ends before it starts", text));
    // Index-based so accumulated rounding cannot drop the endpoint.
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / stride + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * stride);
    return out;
  }
  for (auto part : split(text, ',')) out.push_back(parse_number(part));
  return out;
}

std::vector<DetectorParams> ParamGrid::expand() const {
  std::vector<DetectorParams> out;
  for (double a : t1)
    for (double b : t2)
      for (double c : t3)
        for (double d : t4) out.push_back(DetectorParams{a, b, c, d});
  return out;
}

std::vector<SweepRow> parameter_sweep(std::span<const SweepCourse> courses,
                                      std::span<const DetectorParams> grid, const SmoothingSpec& smoothing,
                                      unsigned threads) {
  for (const auto& p : grid) p.check();

  // Smoothing does not depend on the detector parameters; do it once.
  struct Prepared {
    std::vector<double> times;
    std::vector<double> roll;
  };
  std::vector<Prepared> prepared;
  prepared.reserve(courses.size());
  for (const auto& c : courses) {
    require_valid(c.trace);
    auto times = c.trace.times();
    auto roll = smooth_channel(times, c.trace.roll(), smoothing);
    prepared.push_back({std::move(times), std::move(roll)});
  }

  std::vector<SweepRow> rows(grid.size());
  auto run_point = [&](std::size_t g) {
    Totals totals;
    for (std::size_t c = 0; c < courses.size(); ++c) {
      const auto dets = detect_roll(prepared[c].times, prepared[c].roll, grid[g]);
      totals += classify(dets, courses[c].actual);
    }
    rows[g] = SweepRow{grid[g], totals, totals.sensitivity(), totals.ppv()};
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, grid.size()));
  if (threads <= 1) {
    for (std::size_t g = 0; g < grid.size(); ++g) run_point(g);
    return rows;
  }
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t g = cursor++; g < grid.size(); g = cursor++) {
          try {
            run_point(g);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace bitewatch
