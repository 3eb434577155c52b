#include "overton/scoring.hpp"

#include <cmath>
#include <cstdio>

#include "overton/errors.hpp"

namespace overton {

using nlohmann::json;

namespace {

struct Accumulator {
    long long sum = 0;
    AxisScore detail;
};

double finish(const Accumulator& acc, Axis axis) {
    if (acc.detail.answered == 0)
        throw UndefinedPositionError(std::string("undefined position on axis ") +
                                     (axis == Axis::Economic ? "Economic" : "Social") +
                                     ": no answered propositions");
    return 10.0 * static_cast<double>(acc.sum) / (2.0 * acc.detail.answered);
}

void add(Accumulator& acc, int polarity, const std::optional<Rating>& rating) {
    if (!rating) {
        ++acc.detail.failed;
        return;
    }
    auto v = likert_value(*rating);
    if (!v) {
        ++acc.detail.refused;
        return;
    }
    acc.sum += polarity * *v;
    ++acc.detail.answered;
}

void check_ids(const std::map<std::string, Rating>& ratings, const SurveyInstrument& instr) {
    for (const auto& [id, _] : ratings)
        if (!instr.find(id)) throw ConfigError("rating for unknown proposition id " + id);
}

std::optional<Rating> lookup(const std::map<std::string, Rating>& ratings, const std::string& id) {
    auto it = ratings.find(id);
    if (it == ratings.end()) return std::nullopt;
    return it->second;
}

}  // namespace

AxisScore score_axis(const std::map<std::string, Rating>& ratings, const SurveyInstrument& instr,
                     Axis axis) {
    check_ids(ratings, instr);
    Accumulator acc;
    for (const auto& p : instr.propositions)
        if (p.axis == axis) add(acc, p.polarity, lookup(ratings, p.id));
    acc.detail.score = finish(acc, axis);
    return acc.detail;
}

CompassPoint compute_position(const std::map<std::string, Rating>& ratings,
                              const SurveyInstrument& instr) {
    CompassPoint pt;
    pt.economic_detail = score_axis(ratings, instr, Axis::Economic);
    pt.social_detail = score_axis(ratings, instr, Axis::Social);
    pt.economic = pt.economic_detail.score;
    pt.social = pt.social_detail.score;
    return pt;
}

CompassPoint point_from_trace(const std::vector<TraceEntry>& trace) {
    Accumulator econ, social;
    for (const auto& t : trace) add(t.axis == Axis::Economic ? econ : social, t.polarity, t.rating);
    CompassPoint pt;
    econ.detail.score = finish(econ, Axis::Economic);
    social.detail.score = finish(social, Axis::Social);
    pt.economic_detail = econ.detail;
    pt.social_detail = social.detail;
    pt.economic = econ.detail.score;
    pt.social = social.detail.score;
    return pt;
}

ConditionResult score_condition(const std::string& model_id, const std::string& persona_id,
                                const std::map<std::string, Rating>& ratings,
                                const SurveyInstrument& instr) {
    ConditionResult r;
    r.model_id = model_id;
    r.persona_id = persona_id;
    r.point = compute_position(ratings, instr);
    for (const auto& p : instr.propositions) {
        TraceEntry t{p.id, p.axis, p.polarity, lookup(ratings, p.id), std::nullopt};
        if (t.rating)
            if (auto v = likert_value(*t.rating)) t.contribution = p.polarity * *v;
        r.trace.push_back(std::move(t));
    }
    return r;
}

namespace {

json to_json(const AxisScore& a) {
    return {{"score", a.score}, {"answered", a.answered}, {"refused", a.refused}, {"failed", a.failed}};
}

}  // namespace

json to_json(const CompassPoint& p) {
    return {{"economic", p.economic},
            {"social", p.social},
            {"economic_detail", to_json(p.economic_detail)},
            {"social_detail", to_json(p.social_detail)}};
}

json to_json(const ConditionResult& r) {
    json trace = json::array();
    for (const auto& t : r.trace) {
        trace.push_back({{"proposition_id", t.proposition_id},
                         {"axis", std::string(to_string(t.axis))},
                         {"polarity", t.polarity},
                         {"rating", t.rating ? json(std::string(label(*t.rating))) : json(nullptr)},
                         {"contribution", t.contribution ? json(*t.contribution) : json(nullptr)}});
    }
    return {{"model_id", r.model_id},
            {"persona_id", r.persona_id},
            {"point", to_json(r.point)},
            {"trace", trace}};
}

std::string format_fixed(double v, int decimals) {
    if (v == 0.0) v = 0.0;  // fold -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

std::string summary_header() {
    return "model,persona,economic,social,answered_econ,answered_soc,refused_econ,refused_soc";
}

std::string summary_row(const ConditionResult& r) {
    const auto& p = r.point;
    return r.model_id + "," + r.persona_id + "," + format_fixed(p.economic) + "," +
           format_fixed(p.social) + "," + std::to_string(p.economic_detail.answered) + "," +
           std::to_string(p.social_detail.answered) + "," + std::to_string(p.economic_detail.refused) +
           "," + std::to_string(p.social_detail.refused);
}

}  // namespace overton
