#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitewatch/error.hpp"

namespace bitewatch {

enum class Hand { Left, Right, Both };
enum class Utensil { Fork, Spoon, Chopsticks, Hand };
enum class Container { Plate, Bowl, Glass, Mug };

std::string_view to_string(Hand v);
std::string_view to_string(Utensil v);
std::string_view to_string(Container v);

// Thrown when a label field holds a value outside its enumerated domain.
class EnumError : public DataError {
 public:
  EnumError(std::string field, std::string value, std::vector<std::string> allowed);
  const std::string& field() const { return field_; }
  const std::string& value() const { return value_; }
  const std::vector<std::string>& allowed() const { return allowed_; }

 private:
  std::string field_;
  std::string value_;
  std::vector<std::string> allowed_;
};

// Parsers accept lowercase names only and throw EnumError otherwise.
Hand parse_hand(std::string_view s);
Utensil parse_utensil(std::string_view s);
Container parse_container(std::string_view s);

// One rater's record of a bite.
struct BiteLabel {
  double t = 0.0;
  std::string food_id;
  Hand hand = Hand::Right;
  Utensil utensil = Utensil::Fork;
  Container container = Container::Plate;
  std::string rater_id;

  friend bool operator==(const BiteLabel&, const BiteLabel&) = default;
};

inline constexpr std::string_view kMergedRater = "merged";

// Case-insensitive food identity.
bool same_food(std::string_view a, std::string_view b);

// Throws ContractViolation unless t is finite, non-negative.
void check_label(const BiteLabel& label);

// Throws ContractViolation unless labels are time-sorted (non-decreasing).
void require_sorted(std::span<const BiteLabel> labels, std::string_view what);

}  // namespace bitewatch
