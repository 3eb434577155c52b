#include "overton/rating.hpp"

namespace overton {

std::string_view label(Rating r) {
    switch (r) {
        case Rating::StronglyAgree: return "strongly agree";
        case Rating::Agree: return "agree";
        case Rating::Neutral: return "neutral";
        case Rating::Disagree: return "disagree";
        case Rating::StronglyDisagree: return "strongly disagree";
        case Rating::Refusal: return "refusal";
    }
    return "refusal";
}

std::optional<Rating> rating_from_label(std::string_view canonical) {
    for (auto r : kAllRatings)
        if (label(r) == canonical) return r;
    return std::nullopt;
}

std::optional<int> likert_value(Rating r) {
    switch (r) {
        case Rating::StronglyAgree: return 2;
        case Rating::Agree: return 1;
        case Rating::Neutral: return 0;
        case Rating::Disagree: return -1;
        case Rating::StronglyDisagree: return -2;
        case Rating::Refusal: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<Rating> rating_from_value(int value) {
    switch (value) {
        case 2: return Rating::StronglyAgree;
        case 1: return Rating::Agree;
        case 0: return Rating::Neutral;
        case -1: return Rating::Disagree;
        case -2: return Rating::StronglyDisagree;
        default: return std::nullopt;
    }
}

Rating mirror(Rating r) {
    switch (r) {
        case Rating::StronglyAgree: return Rating::StronglyDisagree;
        case Rating::Agree: return Rating::Disagree;
        case Rating::Disagree: return Rating::Agree;
        case Rating::StronglyDisagree: return Rating::StronglyAgree;
        default: return r;
    }
}

}  // namespace overton
