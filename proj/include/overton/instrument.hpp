#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace overton {

/// Economic: negative = left, positive = right.
/// Social: negative = libertarian, positive = authoritarian.
enum class Axis { Economic, Social };

std::string_view to_string(Axis axis);
std::optional<Axis> axis_from_string(std::string_view s);

struct Proposition {
    std::string id;
    std::string text;
    Axis axis = Axis::Economic;
    /// +1 when agreement pushes the score toward the positive end of the axis.
    int polarity = 1;

    bool operator==(const Proposition&) const = default;
};

struct SurveyInstrument {
    std::string name;
    std::vector<Proposition> propositions;

    std::map<Axis, std::size_t> axis_counts() const;
    const Proposition* find(std::string_view id) const;

    bool operator==(const SurveyInstrument&) const = default;
};

/// Every invariant violation in `instr`, not just the first. Empty means valid.
std::vector<std::string> validate_instrument(const SurveyInstrument& instr);

/// Parse an instrument document. Unknown fields are rejected; the result is
/// validated and InstrumentError is thrown naming the offending proposition.
SurveyInstrument parse_instrument(const nlohmann::json& doc);
SurveyInstrument load_instrument(const std::filesystem::path& path);

nlohmann::json instrument_to_json(const SurveyInstrument& instr);
void save_instrument(const SurveyInstrument& instr, const std::filesystem::path& path);

/// Whitespace-trimmed copy.
std::string trim(std::string_view s);

}  // namespace overton
