#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string_view>

namespace statemon {

/// Kleene truth value. The encoding orders Violated < NoData < Satisfied, so
/// conjunction is min, disjunction is max and negation is reflection.
enum class TriState : std::uint8_t { Violated = 0, NoData = 1, Satisfied = 2 };

constexpr TriState tri_from_bool(bool b) { return b ? TriState::Satisfied : TriState::Violated; }

constexpr TriState tri_and(TriState a, TriState b) { return std::min(a, b); }
constexpr TriState tri_or(TriState a, TriState b) { return std::max(a, b); }
constexpr TriState tri_not(TriState a) {
  return static_cast<TriState>(2 - static_cast<std::uint8_t>(a));
}
constexpr TriState tri_implies(TriState a, TriState b) { return tri_or(tri_not(a), b); }

constexpr std::string_view to_string(TriState t) {
  switch (t) {
    case TriState::Satisfied: return "satisfied";
    case TriState::Violated: return "violated";
    case TriState::NoData: return "no-data";
  }
  return "?";
}

constexpr std::optional<TriState> parse_tristate(std::string_view s) {
  if (s == "satisfied") return TriState::Satisfied;
  if (s == "violated") return TriState::Violated;
  if (s == "no-data") return TriState::NoData;
  return std::nullopt;
}

}  // namespace statemon
