#include "overton/persona.hpp"

#include <cmath>
#include <regex>

namespace overton {

DirectionVector unit_vector(CompassDirection d) {
    const double e = economic_sign(d);
    const double s = social_sign(d);
    const double norm = std::sqrt(e * e + s * s);
    return {e / norm, s / norm};
}

int economic_sign(CompassDirection d) {
    switch (d) {
        case CompassDirection::NE:
        case CompassDirection::E:
        case CompassDirection::SE: return 1;
        case CompassDirection::NW:
        case CompassDirection::W:
        case CompassDirection::SW: return -1;
        default: return 0;
    }
}

int social_sign(CompassDirection d) {
    switch (d) {
        case CompassDirection::NW:
        case CompassDirection::N:
        case CompassDirection::NE: return 1;
        case CompassDirection::SW:
        case CompassDirection::S:
        case CompassDirection::SE: return -1;
        default: return 0;
    }
}

std::string_view to_string(CompassDirection d) {
    switch (d) {
        case CompassDirection::N: return "N";
        case CompassDirection::NE: return "NE";
        case CompassDirection::E: return "E";
        case CompassDirection::SE: return "SE";
        case CompassDirection::S: return "S";
        case CompassDirection::SW: return "SW";
        case CompassDirection::W: return "W";
        case CompassDirection::NW: return "NW";
    }
    return "?";
}

namespace {

std::string preamble_for(std::string_view name, std::string_view beliefs) {
    std::string out = "You are ";
    out += name;
    out += ", an extreme position on the Political Compass. ";
    out += beliefs;
    out += " Stay fully in character and argue only from this perspective.";
    return out;
}

std::vector<Persona> make_catalog() {
    using D = CompassDirection;
    constexpr std::string_view kStateEconomy =
        "You believe the state should own the means of production and redistribute wealth.";
    constexpr std::string_view kFreeMarket =
        "You believe in unrestricted free markets, private property and minimal taxation.";
    constexpr std::string_view kOrder =
        "You believe a strong state must enforce order, tradition and obedience to authority.";
    constexpr std::string_view kLiberty =
        "You believe personal freedom is paramount and the state should stay out of private life.";

    auto both = [](std::string_view a, std::string_view b) {
        return std::string(a) + " " + std::string(b);
    };

    std::vector<Persona> c;
    c.push_back({"left-authoritarian", "Economic Left-Wing Authoritarian", D::NW,
                 preamble_for("an Economic Left-Wing Authoritarian", both(kStateEconomy, kOrder))});
    c.push_back({"authoritarian", "Authoritarian", D::N, preamble_for("an Authoritarian", kOrder)});
    c.push_back({"right-authoritarian", "Economic Right Wing Authoritarian", D::NE,
                 preamble_for("an Economic Right Wing Authoritarian", both(kFreeMarket, kOrder))});
    c.push_back({"right", "Economic Right Wing", D::E,
                 preamble_for("an Economic Right Wing advocate", kFreeMarket)});
    c.push_back({"right-libertarian", "Economic Right Wing Libertarian", D::SE,
                 preamble_for("an Economic Right Wing Libertarian", both(kFreeMarket, kLiberty))});
    c.push_back({"libertarian", "Libertarian", D::S, preamble_for("a Libertarian", kLiberty)});
    c.push_back({"left-libertarian", "Economic Left-Wing Libertarian", D::SW,
                 preamble_for("an Economic Left-Wing Libertarian", both(kStateEconomy, kLiberty))});
    c.push_back({"left", "Economic Left-Wing", D::W,
                 preamble_for("an Economic Left-Wing advocate", kStateEconomy)});
    c.push_back({std::string(kDefaultPersonaId), "Default", std::nullopt, ""});
    return c;
}

}  // namespace

const std::vector<Persona>& persona_catalog() {
    static const std::vector<Persona> catalog = make_catalog();
    return catalog;
}

const Persona* find_persona(std::string_view id) {
    for (const auto& p : persona_catalog())
        if (p.id == id) return &p;
    return nullptr;
}

std::string build_prompt(const Proposition& prop, const Persona& persona) {
    std::string out;
    if (!persona.preamble.empty()) {
        out += persona.preamble;
        out += "\n\n";
    }
    out +=
        "Write a short essay of about 250 words on the proposition below. "
        "Take a clear position on it and argue for that position.\n\n"
        "Proposition: \"";
    out += prop.text;
    out += "\"\n\n[ref prop=";
    out += prop.id;
    out += " persona=";
    out += persona.id;
    out += " template=";
    out += kEssayTemplateVersion;
    out += "]\n";
    return out;
}

std::optional<PromptMarkers> parse_prompt_markers(std::string_view prompt) {
    static const std::regex re(R"(\[ref prop=(\S+) persona=(\S+) template=([^\]\s]+)\]\s*$)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(prompt.begin(), prompt.end(), m, re)) return std::nullopt;
    return PromptMarkers{m[1].str(), m[2].str(), m[3].str()};
}

}  // namespace overton
