#include "bitewatch/groundtruth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <map>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

namespace bitewatch {
namespace {

constexpr std::array<std::string_view, 4> kKindNames = {"missed_bite", "time_error", "identity_error",
                                                        "data_entry_error"};
constexpr std::array<std::string_view, 4> kResolutionNames = {"keep_a", "keep_b", "custom", "discard"};

void require_strictly_increasing(std::span<const BiteLabel> labels, std::string_view what) {
  require_sorted(labels, what);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (!(labels[i].t > labels[i - 1].t)) {
      throw ContractViolation(fmt::format("{} has two labels at t={}", what, labels[i].t));
    }
  }
}

// One-to-one pairing between two sorted label lists that never crosses: if
// a[i] pairs with b[j], no a[i' < i] pairs with b[j' > j].
class Pairing {
 public:
  Pairing(std::size_t na, std::size_t nb) : a_to_b_(na, kNone), b_to_a_(nb, kNone) {}

  bool a_free(std::size_t i) const { return a_to_b_[i] == kNone; }
  bool b_free(std::size_t j) const { return b_to_a_[j] == kNone; }
  std::size_t partner_of_a(std::size_t i) const { return a_to_b_[i]; }

  bool crosses(std::size_t i, std::size_t j) const {
    auto above = by_a_.upper_bound(i);
    if (above != by_a_.end() && above->second < j) return true;
    if (above != by_a_.begin()) {
      auto below = std::prev(above);
      if (below->second > j) return true;
    }
    return false;
  }

  void add(std::size_t i, std::size_t j) {
    a_to_b_[i] = j;
    b_to_a_[j] = i;
    by_a_.emplace(i, j);
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  std::vector<std::size_t> a_to_b_;
  std::vector<std::size_t> b_to_a_;
  std::map<std::size_t, std::size_t> by_a_;
};

struct Candidate {
  double distance;
  double time_sum;
  std::size_t i;
  std::size_t j;
};

// Greedily pairs free labels whose distance d satisfies lo < d <= hi (lo < 0
// admits d = 0), closest first.
std::vector<std::pair<std::size_t, std::size_t>> pair_band(std::span<const BiteLabel> a,
                                                           std::span<const BiteLabel> b,
                                                           double lo, double hi, Pairing& pairing) {
  std::vector<Candidate> cands;
  std::size_t start = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!pairing.a_free(i)) continue;
    while (start < b.size() && b[start].t < a[i].t - hi) ++start;
    for (std::size_t j = start; j < b.size() && b[j].t <= a[i].t + hi; ++j) {
      if (!pairing.b_free(j)) continue;
      const double d = std::abs(a[i].t - b[j].t);
      if (d > lo && d <= hi) cands.push_back({d, a[i].t + b[j].t, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    return std::tie(x.distance, x.time_sum, x.i, x.j) < std::tie(y.distance, y.time_sum, y.i, y.j);
  });
  std::vector<std::pair<std::size_t, std::size_t>> made;
  for (const auto& c : cands) {
    if (!pairing.a_free(c.i) || !pairing.b_free(c.j) || pairing.crosses(c.i, c.j)) continue;
    pairing.add(c.i, c.j);
    made.emplace_back(c.i, c.j);
  }
  return made;
}

bool variables_differ(const BiteLabel& x, const BiteLabel& y) {
  return x.hand != y.hand || x.utensil != y.utensil || x.container != y.container;
}

BiteLabel as_merged(BiteLabel label) {
  label.rater_id = std::string(kMergedRater);
  return label;
}

double anchor_time(const Conflict& c) {
  if (c.a && c.b) return std::min(c.a->t, c.b->t);
  return c.a ? c.a->t : c.b->t;
}

// The bite a single decision implies for its conflict, or nullopt for a
// discard.
std::optional<BiteLabel> resolve_one(const Conflict& c, const Adjudication& d) {
  switch (d.resolution) {
    case Resolution::Discard:
      return std::nullopt;
    case Resolution::Custom:
      return as_merged(*d.custom);
    case Resolution::KeepA:
    case Resolution::KeepB: {
      const BiteLabel& chosen = d.resolution == Resolution::KeepA ? *c.a : *c.b;
      BiteLabel out = as_merged(chosen);
      // Both raters saw the bite within the window; only its variables were
      // in dispute, so the time stays averaged.
      if (c.kind == ConflictKind::IdentityError || c.kind == ConflictKind::DataEntryError) {
        out.t = (c.a->t + c.b->t) / 2.0;
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ConflictKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

ConflictKind parse_conflict_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<ConflictKind>(i);
  }
  throw EnumError("kind", std::string(s), std::vector<std::string>(kKindNames.begin(), kKindNames.end()));
}

std::string_view to_string(Resolution r) { return kResolutionNames[static_cast<std::size_t>(r)]; }

Resolution parse_resolution(std::string_view s) {
  for (std::size_t i = 0; i < kResolutionNames.size(); ++i) {
    if (kResolutionNames[i] == s) return static_cast<Resolution>(i);
  }
  throw EnumError("resolution", std::string(s),
                  std::vector<std::string>(kResolutionNames.begin(), kResolutionNames.end()));
}

void check_ground_truth(const GroundTruth& gt) {
  for (std::size_t i = 0; i < gt.bites.size(); ++i) {
    check_label(gt.bites[i]);
    if (i > 0 && !(gt.bites[i].t > gt.bites[i - 1].t)) {
      throw ContractViolation(fmt::format("ground truth for {} not strictly increasing at index {}",
                                          gt.course_id, i));
    }
  }
}

MatchResult match_raters(std::string_view course_id, std::span<const BiteLabel> labels_a,
                         std::span<const BiteLabel> labels_b, double window_s) {
  if (!(window_s > 0.0) || !std::isfinite(window_s)) {
    throw ContractViolation(fmt::format("match window must be > 0, got {}", window_s));
  }
  require_strictly_increasing(labels_a, "rater A labels");
  require_strictly_increasing(labels_b, "rater B labels");

  Pairing pairing(labels_a.size(), labels_b.size());
  const auto in_window = pair_band(labels_a, labels_b, -1.0, window_s, pairing);
  const auto time_band = pair_band(labels_a, labels_b, window_s, 2.0 * window_s, pairing);

  MatchResult result;
  result.draft.course_id = std::string(course_id);

  std::vector<Conflict> conflicts;
  std::size_t next_pair = 0;
  auto make = [&](ConflictKind kind, std::optional<BiteLabel> a, std::optional<BiteLabel> b,
                  std::optional<std::size_t> pair) {
    conflicts.push_back(Conflict{"", kind, std::string(course_id), std::move(a), std::move(b), pair});
  };

  for (auto [i, j] : in_window) {
    const auto& a = labels_a[i];
    const auto& b = labels_b[j];
    const bool identity = !same_food(a.food_id, b.food_id);
    const bool entry = variables_differ(a, b);
    if (!identity && !entry) {
      BiteLabel merged = as_merged(a);
      merged.t = (a.t + b.t) / 2.0;
      result.draft.bites.push_back(std::move(merged));
      ++result.merged_pairs;
      continue;
    }
    const std::size_t pair = next_pair++;
    if (identity) make(ConflictKind::IdentityError, a, b, pair);
    if (entry) make(ConflictKind::DataEntryError, a, b, pair);
    ++result.conflict_pairs;
  }
  for (auto [i, j] : time_band) {
    make(ConflictKind::TimeError, labels_a[i], labels_b[j], next_pair++);
    ++result.conflict_pairs;
  }
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    if (pairing.a_free(i)) make(ConflictKind::MissedBite, labels_a[i], std::nullopt, std::nullopt);
  }
  for (std::size_t j = 0; j < labels_b.size(); ++j) {
    if (pairing.b_free(j)) make(ConflictKind::MissedBite, std::nullopt, labels_b[j], std::nullopt);
  }

  std::sort(result.draft.bites.begin(), result.draft.bites.end(),
            [](const BiteLabel& x, const BiteLabel& y) { return x.t < y.t; });
  std::stable_sort(conflicts.begin(), conflicts.end(), [](const Conflict& x, const Conflict& y) {
    const auto kx = std::make_tuple(anchor_time(x), static_cast<int>(x.kind), !x.a.has_value());
    const auto ky = std::make_tuple(anchor_time(y), static_cast<int>(y.kind), !y.a.has_value());
    return kx < ky;
  });
  // Renumber pairs in output order so ids and pair ids read top to bottom.
  std::unordered_map<std::size_t, std::size_t> renumber;
  for (std::size_t k = 0; k < conflicts.size(); ++k) {
    conflicts[k].id = fmt::format("{}:{:04}", course_id, k);
    if (conflicts[k].pair_id) {
      auto [it, _] = renumber.emplace(*conflicts[k].pair_id, renumber.size());
      conflicts[k].pair_id = it->second;
    }
  }
  result.conflicts = std::move(conflicts);
  return result;
}

UnknownConflictError::UnknownConflictError(const std::string& id)
    : DataError(fmt::format("decision targets unknown conflict \"{}\"", id)) {}

DuplicateDecisionError::DuplicateDecisionError(const std::string& id)
    : DataError(fmt::format("conflict \"{}\" already has a decision", id)) {}

void check_decisions(std::span<const Conflict> conflicts, std::span<const Adjudication> decisions) {
  std::unordered_map<std::string_view, const Conflict*> by_id;
  for (const auto& c : conflicts) by_id.emplace(c.id, &c);
  std::unordered_set<std::string_view> seen;
  for (const auto& d : decisions) {
    auto it = by_id.find(d.conflict_id);
    if (it == by_id.end()) throw UnknownConflictError(d.conflict_id);
    if (!seen.insert(d.conflict_id).second) throw DuplicateDecisionError(d.conflict_id);
    const Conflict& c = *it->second;
    switch (d.resolution) {
      case Resolution::KeepA:
        if (!c.a) throw InvalidResolutionError(fmt::format("conflict {} has no rater A label", c.id));
        break;
      case Resolution::KeepB:
        if (!c.b) throw InvalidResolutionError(fmt::format("conflict {} has no rater B label", c.id));
        break;
      case Resolution::Custom:
        if (!d.custom) {
          throw InvalidResolutionError(fmt::format("custom decision for {} carries no label", c.id));
        }
        if (!std::isfinite(d.custom->t) || d.custom->t < 0.0) {
          throw InvalidResolutionError(
              fmt::format("custom decision for {} has invalid time {}", c.id, d.custom->t));
        }
        break;
      case Resolution::Discard:
        break;
    }
  }
}

std::vector<Conflict> open_conflicts(std::span<const Conflict> conflicts,
                                     std::span<const Adjudication> decisions) {
  std::unordered_set<std::string_view> decided;
  for (const auto& d : decisions) decided.insert(d.conflict_id);
  std::vector<Conflict> out;
  for (const auto& c : conflicts) {
    if (!decided.count(c.id)) out.push_back(c);
  }
  return out;
}

GroundTruth apply_adjudications(const GroundTruth& draft, std::span<const Conflict> conflicts,
                                std::span<const Adjudication> decisions) {
  check_decisions(conflicts, decisions);
  std::unordered_map<std::string_view, const Adjudication*> decision_for;
  for (const auto& d : decisions) decision_for.emplace(d.conflict_id, &d);

  std::vector<BiteLabel> resolved;
  std::map<std::size_t, std::vector<const Conflict*>> pairs;
  for (const auto& c : conflicts) {
    if (c.pair_id && (c.kind == ConflictKind::IdentityError || c.kind == ConflictKind::DataEntryError)) {
      pairs[*c.pair_id].push_back(&c);
      continue;
    }
    auto it = decision_for.find(c.id);
    if (it == decision_for.end()) continue;
    if (auto bite = resolve_one(c, *it->second)) resolved.push_back(std::move(*bite));
  }

  for (const auto& [pair, members] : pairs) {
    std::optional<BiteLabel> identity;
    std::optional<BiteLabel> entry;
    bool complete = true;
    bool discarded = false;
    for (const Conflict* c : members) {
      auto it = decision_for.find(c->id);
      if (it == decision_for.end()) {
        complete = false;
        break;
      }
      auto bite = resolve_one(*c, *it->second);
      if (!bite) discarded = true;
      (c->kind == ConflictKind::IdentityError ? identity : entry) = std::move(bite);
    }
    if (!complete || discarded) continue;
    BiteLabel out = identity ? *identity : *entry;
    if (identity && entry) {
      out.hand = entry->hand;
      out.utensil = entry->utensil;
      out.container = entry->container;
    }
    resolved.push_back(std::move(out));
  }

  GroundTruth gt = draft;
  for (auto& bite : resolved) {
    auto pos = std::lower_bound(gt.bites.begin(), gt.bites.end(), bite.t,
                                [](const BiteLabel& x, double t) { return x.t < t; });
    if (pos != gt.bites.end() && pos->t == bite.t) {
      throw InvalidResolutionError(
          fmt::format("resolved bite at t={} collides with an existing bite in {}", bite.t, gt.course_id));
    }
    gt.bites.insert(pos, std::move(bite));
  }
  return gt;
}

std::vector<ErrorRow> error_report(std::span<const Conflict> conflicts, std::size_t total_bites) {
  if (total_bites == 0) throw ContractViolation("error_report needs total_bites > 0");
  std::array<std::size_t, 4> counts{};
  for (const auto& c : conflicts) ++counts[static_cast<std::size_t>(c.kind)];
  std::vector<ErrorRow> rows;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    // Tenths of a percent, rounded half up in exact integer arithmetic.
    const std::uint64_t tenths = (2000ULL * counts[k] + total_bites) / (2ULL * total_bites);
    rows.push_back(ErrorRow{static_cast<ConflictKind>(k), counts[k], static_cast<double>(tenths) / 10.0,
                            fmt::format("{}.{}%", tenths / 10, tenths % 10)});
  }
  return rows;
}

}  // namespace bitewatch
