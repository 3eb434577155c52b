#include "overton/simulation.hpp"

#include <cmath>

#include "overton/assessment.hpp"
#include "overton/errors.hpp"

namespace overton {

void validate_ideology(const SyntheticIdeology& id) {
    if (!(id.compliance >= 0.0 && id.compliance <= 1.0))
        throw ConfigError("synthetic ideology: compliance must be in [0, 1]");
    for (double v : {id.base_economic, id.base_social})
        if (!(v >= kCompassMin && v <= kCompassMax))
            throw ConfigError("synthetic ideology: base point must lie in [-10, 10]^2");
}

Point target_point(const SyntheticIdeology& id, const Persona& persona) {
    if (persona.is_default()) return {id.base_economic, id.base_social};
    auto move = [&](double base, int sign) {
        if (sign == 0) return base;
        const double extreme = 10.0 * sign;
        return std::lerp(base, extreme, id.compliance);
    };
    return {move(id.base_economic, economic_sign(*persona.direction)),
            move(id.base_social, social_sign(*persona.direction))};
}

std::map<std::string, Rating> synthetic_stances(const SurveyInstrument& instr,
                                                const SyntheticIdeology& ideology,
                                                const Persona& persona) {
    const Point target = target_point(ideology, persona);
    std::map<std::string, Rating> out;
    for (Axis axis : {Axis::Economic, Axis::Social}) {
        // Mean contribution per answered proposition needed to reach the target.
        const double wanted = (axis == Axis::Economic ? target.economic : target.social) / 5.0;
        double carry = 0.0;
        for (const auto& p : instr.propositions) {
            if (p.axis != axis) continue;
            if (ideology.refusals.count(p.id)) {
                out[p.id] = Rating::Refusal;
                continue;
            }
            const double want = wanted + carry;
            const int q = static_cast<int>(std::clamp(std::round(want), -2.0, 2.0));
            carry = want - q;
            out[p.id] = *rating_from_value(q * p.polarity);
        }
    }
    return out;
}

namespace {

std::string stance_sentence(Rating r) {
    switch (r) {
        case Rating::StronglyAgree: return "I strongly agree with the proposition.";
        case Rating::Agree: return "On balance I agree with the proposition.";
        case Rating::Neutral: return "I remain neutral on the proposition.";
        case Rating::Disagree: return "On balance I disagree with the proposition.";
        case Rating::StronglyDisagree: return "I strongly disagree with the proposition.";
        case Rating::Refusal: break;
    }
    return {};
}

}  // namespace

std::string synthetic_complete(std::string_view prompt, const SurveyInstrument& instr,
                               const SyntheticIdeology& ideology) {
    auto markers = parse_prompt_markers(prompt);
    if (!markers) throw ConfigError("synthetic respondent: prompt carries no reference markers");
    const auto* prop = instr.find(markers->proposition_id);
    if (!prop) throw ConfigError("synthetic respondent: unknown proposition " + markers->proposition_id);
    const auto* persona = find_persona(markers->persona_id);
    if (!persona) throw ConfigError("synthetic respondent: unknown persona " + markers->persona_id);

    if (ideology.refusals.count(prop->id))
        return "I cannot argue for this position. I'm sorry, but I won't write an essay taking a "
               "side on this topic.\n";

    const Rating stance = synthetic_stances(instr, ideology, *persona).at(prop->id);
    std::string essay = "Essay on proposition " + prop->id + ".\n\n";
    essay +=
        "This question touches on how a society balances competing goods, and thoughtful people "
        "have reached different conclusions about it. The evidence and the values at stake both "
        "deserve careful attention.\n\n";
    essay += "Having weighed these considerations, " + stance_sentence(stance) + "\n";
    return essay;
}

std::string synthetic_assess(std::string_view assessor_prompt) {
    auto essay = extract_essay(assessor_prompt);
    if (!essay) throw MalformedResponseError("synthetic assessor: prompt carries no essay markers");
    if (looks_like_refusal(*essay)) return "refusal";
    try {
        return std::string(label(parse_rating(*essay)));
    } catch (const ParseError&) {
        throw MalformedResponseError("synthetic assessor: essay carries no stance marker");
    }
}

SyntheticRespondent::SyntheticRespondent(SurveyInstrument instr, SyntheticIdeology ideology)
    : instr_(std::move(instr)), ideology_(std::move(ideology)) {
    validate_ideology(ideology_);
}

Completion SyntheticRespondent::complete(std::string_view prompt, double, const std::string&) {
    try {
        return {synthetic_complete(prompt, instr_, ideology_), std::nullopt, std::nullopt, std::nullopt};
    } catch (const ConfigError& e) {
        throw MalformedResponseError(e.what());
    }
}

Completion SyntheticAssessor::complete(std::string_view prompt, double, const std::string&) {
    return {synthetic_assess(prompt), std::nullopt, std::nullopt, std::nullopt};
}

}  // namespace overton
