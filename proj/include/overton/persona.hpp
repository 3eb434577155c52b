#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overton/instrument.hpp"

namespace overton {

/// Version tags. Changing any wording requires bumping the matching tag; the
/// essay tag is embedded in every prompt and therefore in every record id.
inline constexpr std::string_view kEssayTemplateVersion = "essay-v1";
inline constexpr std::string_view kPersonaCatalogVersion = "personas-v1";

/// The eight compass directions. North is authoritarian, east is economic right.
enum class CompassDirection { N, NE, E, SE, S, SW, W, NW };

struct DirectionVector {
    double economic;
    double social;
};

/// Unit vector for a direction (diagonals are normalised).
DirectionVector unit_vector(CompassDirection d);
/// Sign of each component: -1, 0 or +1.
int economic_sign(CompassDirection d);
int social_sign(CompassDirection d);
std::string_view to_string(CompassDirection d);

struct Persona {
    std::string id;
    std::string display_name;
    std::optional<CompassDirection> direction;  // nullopt for the default condition
    std::string preamble;                       // empty for the default condition

    bool is_default() const { return !direction.has_value(); }
};

inline constexpr std::string_view kDefaultPersonaId = "default";

/// Eight directional personas followed by the default persona.
const std::vector<Persona>& persona_catalog();
const Persona* find_persona(std::string_view id);

/// Persona preamble (if any), the fixed essay task, and a machine-readable
/// reference line carrying proposition id, persona id and template version.
std::string build_prompt(const Proposition& prop, const Persona& persona);

struct PromptMarkers {
    std::string proposition_id;
    std::string persona_id;
    std::string template_version;
};

/// Recover the reference line written by build_prompt.
std::optional<PromptMarkers> parse_prompt_markers(std::string_view prompt);

}  // namespace overton
