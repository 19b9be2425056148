#include "bitewatch/labels.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

namespace bitewatch {
namespace {

constexpr std::array<std::string_view, 3> kHands = {"left", "right", "both"};
constexpr std::array<std::string_view, 4> kUtensils = {"fork", "spoon", "chopsticks", "hand"};
constexpr std::array<std::string_view, 4> kContainers = {"plate", "bowl", "glass", "mug"};

template <typename E, std::size_t N>
E parse_enum(std::string_view field, std::string_view s, const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  throw EnumError(std::string(field), std::string(s), std::vector<std::string>(names.begin(), names.end()));
}

}  // namespace

std::string_view to_string(Hand v) { return kHands[static_cast<std::size_t>(v)]; }
std::string_view to_string(Utensil v) { return kUtensils[static_cast<std::size_t>(v)]; }
std::string_view to_string(Container v) { return kContainers[static_cast<std::size_t>(v)]; }

EnumError::EnumError(std::string field, std::string value, std::vector<std::string> allowed)
    : DataError(fmt::format("{} \"{}\" is not one of {{{}}}", field, value, fmt::join(allowed, ","))),
      field_(std::move(field)),
      value_(std::move(value)),
      allowed_(std::move(allowed)) {}

Hand parse_hand(std::string_view s) { return parse_enum<Hand>("hand", s, kHands); }
Utensil parse_utensil(std::string_view s) { return parse_enum<Utensil>("utensil", s, kUtensils); }
Container parse_container(std::string_view s) {
  return parse_enum<Container>("container", s, kContainers);
}

bool same_food(std::string_view a, std::string_view b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](unsigned char x, unsigned char y) {
    return std::tolower(x) == std::tolower(y);
  });
}

void check_label(const BiteLabel& label) {
  if (!std::isfinite(label.t) || label.t < 0.0) {
    throw ContractViolation(fmt::format("bite label time must be finite and >= 0, got {}", label.t));
  }
}

void require_sorted(std::span<const BiteLabel> labels, std::string_view what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    check_label(labels[i]);
    if (i > 0 && labels[i].t < labels[i - 1].t) {
      throw ContractViolation(fmt::format("{} not time-sorted at index {} ({} after {})", what, i,
                                          labels[i].t, labels[i - 1].t));
    }
  }
}

}  // namespace bitewatch
