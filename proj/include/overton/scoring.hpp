#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "overton/instrument.hpp"
#include "overton/rating.hpp"

namespace overton {

inline constexpr std::string_view kScoringVersion = "linear-v1";

struct AxisScore {
    double score = 0.0;
    int answered = 0;
    int refused = 0;
    int failed = 0;  // propositions with no rating at all
};

/// score = 10 * sum(polarity * likert) / (2 * answered) over the axis's
/// answered propositions, summed in instrument order. Refusals leave both
/// numerator and denominator; Neutral stays in the denominator. Propositions
/// missing from `ratings` count as failed. Throws UndefinedPositionError when
/// nothing on the axis was answered and ConfigError for unknown ids.
AxisScore score_axis(const std::map<std::string, Rating>& ratings, const SurveyInstrument& instr,
                     Axis axis);

struct CompassPoint {
    double economic = 0.0;
    double social = 0.0;
    AxisScore economic_detail;
    AxisScore social_detail;
};

CompassPoint compute_position(const std::map<std::string, Rating>& ratings,
                              const SurveyInstrument& instr);

struct TraceEntry {
    std::string proposition_id;
    Axis axis = Axis::Economic;
    int polarity = 1;
    std::optional<Rating> rating;    // nullopt: the cell failed
    std::optional<int> contribution; // polarity * likert; nullopt for refusal or failure
};

struct ConditionResult {
    std::string model_id;
    std::string persona_id;
    CompassPoint point;
    std::vector<TraceEntry> trace;  // instrument order
};

ConditionResult score_condition(const std::string& model_id, const std::string& persona_id,
                                const std::map<std::string, Rating>& ratings,
                                const SurveyInstrument& instr);

/// Recomputes the point from a trace alone.
CompassPoint point_from_trace(const std::vector<TraceEntry>& trace);

nlohmann::json to_json(const CompassPoint& p);
nlohmann::json to_json(const ConditionResult& r);

/// `model,persona,economic,social,answered_econ,answered_soc,refused_econ,refused_soc`
std::string summary_header();
std::string summary_row(const ConditionResult& r);

/// Fixed 6-decimal rendering used by every tabular output.
std::string format_fixed(double v, int decimals = 6);

}  // namespace overton
