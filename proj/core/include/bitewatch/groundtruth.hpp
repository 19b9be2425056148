#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitewatch/labels.hpp"

namespace bitewatch {

// Rater disagreement categories, in the order they are reported.
enum class ConflictKind { MissedBite, TimeError, IdentityError, DataEntryError };

std::string_view to_string(ConflictKind kind);
ConflictKind parse_conflict_kind(std::string_view s);

// A disagreement between two raters. MissedBite carries exactly one side;
// every other kind carries both. Identity and data-entry conflicts raised by
// the same label pair share a pair_id.
struct Conflict {
  std::string id;
  ConflictKind kind = ConflictKind::MissedBite;
  std::string course_id;
  std::optional<BiteLabel> a;
  std::optional<BiteLabel> b;
  std::optional<std::size_t> pair_id;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

struct GroundTruth {
  std::string course_id;
  std::vector<BiteLabel> bites;  // strictly increasing t, rater_id "merged"

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

// Throws ContractViolation unless bite times strictly increase.
void check_ground_truth(const GroundTruth& gt);

struct MatchResult {
  GroundTruth draft;
  std::vector<Conflict> conflicts;
  std::size_t merged_pairs = 0;    // in-window pairs whose variables agree
  std::size_t conflict_pairs = 0;  // label pairs that raised at least one conflict
};

// Pairs two raters' labels one-to-one. Candidate pairs are taken closest
// first (ties go to the earlier pair), first within +-window_s, then among
// the leftovers within +-2*window_s as time errors. Agreeing in-window pairs
// merge at their mean time; disagreeing ones raise IdentityError (food)
// and/or DataEntryError (hand, utensil, container). Leftovers are
// MissedBite. Conflict ids are "<course_id>:<nnnn>".
MatchResult match_raters(std::string_view course_id, std::span<const BiteLabel> labels_a,
                         std::span<const BiteLabel> labels_b, double window_s = 1.0);

enum class Resolution { KeepA, KeepB, Custom, Discard };

std::string_view to_string(Resolution r);
Resolution parse_resolution(std::string_view s);

// A third rater's judgment on one conflict. `custom` is required for
// Resolution::Custom and ignored otherwise.
struct Adjudication {
  std::string conflict_id;
  Resolution resolution = Resolution::Discard;
  std::optional<BiteLabel> custom;
  std::string judge_id;

  friend bool operator==(const Adjudication&, const Adjudication&) = default;
};

class UnknownConflictError : public DataError {
 public:
  explicit UnknownConflictError(const std::string& id);
};

class DuplicateDecisionError : public DataError {
 public:
  explicit DuplicateDecisionError(const std::string& id);
};

class InvalidResolutionError : public DataError {
 public:
  using DataError::DataError;
};

// Checks that every decision targets a distinct known conflict and is
// applicable to it. Throws the errors above.
void check_decisions(std::span<const Conflict> conflicts, std::span<const Adjudication> decisions);

// Conflicts with no decision yet.
std::vector<Conflict> open_conflicts(std::span<const Conflict> conflicts,
                                     std::span<const Adjudication> decisions);

// Inserts resolved bites into the draft in time order. A label pair that
// raised two conflicts yields one bite once both are decided: food from the
// identity decision, hand/utensil/container from the data-entry decision.
GroundTruth apply_adjudications(const GroundTruth& draft, std::span<const Conflict> conflicts,
                                std::span<const Adjudication> decisions);

struct ErrorRow {
  ConflictKind kind;
  std::size_t count = 0;
  double percent = 0.0;  // rounded half-up to one decimal
  std::string display;   // e.g. "3.7%"
};

// One row per ConflictKind in declaration order. Throws ContractViolation
// when total_bites is 0.
std::vector<ErrorRow> error_report(std::span<const Conflict> conflicts, std::size_t total_bites);

}  // namespace bitewatch
