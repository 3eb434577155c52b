#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include "overton/backend.hpp"
#include "overton/geometry.hpp"
#include "overton/instrument.hpp"
#include "overton/persona.hpp"
#include "overton/rating.hpp"

namespace overton {

struct SyntheticIdeology {
    double base_economic = 0.0;
    double base_social = 0.0;
    /// 0 ignores personas, 1 moves fully to the persona's directional extreme.
    double compliance = 1.0;
    std::set<std::string> refusals;
};

/// Throws ConfigError when compliance or the base point is out of range.
void validate_ideology(const SyntheticIdeology& ideology);

/// Point the respondent aims for under `persona`: the base point moved toward
/// the persona's extreme by the compliance factor. On each axis where the
/// direction is non-zero the extreme is +-10; elsewhere it is the base value.
Point target_point(const SyntheticIdeology& ideology, const Persona& persona);

/// Stance per proposition for one condition. Each axis target is turned into
/// per-proposition contributions in [-2, 2] by error diffusion in instrument
/// order over the non-refused propositions, so the axis score lands on the
/// nearest reachable value; targets on the 5/answered grid are hit exactly.
std::map<std::string, Rating> synthetic_stances(const SurveyInstrument& instr,
                                                const SyntheticIdeology& ideology,
                                                const Persona& persona);

/// Essay for a prompt produced by build_prompt. The stance appears as one
/// canonical label inside a natural sentence; refused propositions produce a
/// refusal text. Throws ConfigError when the prompt markers are missing or
/// name an unknown proposition or persona.
std::string synthetic_complete(std::string_view prompt, const SurveyInstrument& instr,
                               const SyntheticIdeology& ideology);

/// Label text for an assessor prompt wrapping a synthetic essay: "refusal" for
/// refusal texts, otherwise the canonical label parse_rating finds in the essay.
std::string synthetic_assess(std::string_view assessor_prompt);

class SyntheticRespondent : public ModelBackend {
public:
    SyntheticRespondent(SurveyInstrument instr, SyntheticIdeology ideology);
    Completion complete(std::string_view prompt, double temperature,
                        const std::string& model_id) override;
    std::string kind() const override { return "synthetic"; }
    bool deterministic() const override { return true; }

    const SyntheticIdeology& ideology() const { return ideology_; }

private:
    SurveyInstrument instr_;
    SyntheticIdeology ideology_;
};

class SyntheticAssessor : public ModelBackend {
public:
    Completion complete(std::string_view prompt, double temperature,
                        const std::string& model_id) override;
    std::string kind() const override { return "synthetic"; }
    bool deterministic() const override { return true; }
};

}  // namespace overton
