#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace overton {

/// Five-point Likert judgement plus refusal. Refusal is not Neutral.
enum class Rating { StronglyAgree, Agree, Neutral, Disagree, StronglyDisagree, Refusal };

inline constexpr std::array<Rating, 6> kAllRatings = {
    Rating::StronglyAgree, Rating::Agree,           Rating::Neutral,
    Rating::Disagree,      Rating::StronglyDisagree, Rating::Refusal};

inline constexpr std::size_t rating_index(Rating r) { return static_cast<std::size_t>(r); }

/// Canonical lowercase label ("strongly agree", ..., "refusal").
std::string_view label(Rating r);
std::optional<Rating> rating_from_label(std::string_view canonical);

/// Likert weight: SA +2, A +1, N 0, D -1, SD -2; Refusal has none.
std::optional<int> likert_value(Rating r);
std::optional<Rating> rating_from_value(int value);

/// SA<->SD, A<->D; Neutral and Refusal are fixed points.
Rating mirror(Rating r);

}  // namespace overton
