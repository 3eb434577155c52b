#include "overton/instrument.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "overton/errors.hpp"

namespace overton {

using nlohmann::json;

std::string_view to_string(Axis axis) {
    return axis == Axis::Economic ? "economic" : "social";
}

std::optional<Axis> axis_from_string(std::string_view s) {
    if (s == "economic") return Axis::Economic;
    if (s == "social") return Axis::Social;
    return std::nullopt;
}

std::string trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::map<Axis, std::size_t> SurveyInstrument::axis_counts() const {
    std::map<Axis, std::size_t> counts{{Axis::Economic, 0}, {Axis::Social, 0}};
    for (const auto& p : propositions) ++counts[p.axis];
    return counts;
}

const Proposition* SurveyInstrument::find(std::string_view id) const {
    for (const auto& p : propositions)
        if (p.id == id) return &p;
    return nullptr;
}

std::vector<std::string> validate_instrument(const SurveyInstrument& instr) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& p : instr.propositions) {
        if (p.id.empty()) out.push_back("proposition with empty id");
        if (!seen.insert(p.id).second) out.push_back("duplicate id " + p.id);
        if (p.polarity != 1 && p.polarity != -1)
            out.push_back("proposition " + p.id + " has polarity " + std::to_string(p.polarity) +
                          " (expected +1 or -1)");
        if (trim(p.text).empty()) out.push_back("proposition " + p.id + " has empty text");
    }
    auto counts = instr.axis_counts();
    if (counts[Axis::Economic] == 0) out.push_back("axis Economic empty");
    if (counts[Axis::Social] == 0) out.push_back("axis Social empty");
    return out;
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) throw InstrumentError(where + ": unknown field '" + it.key() + "'");
    }
}

std::string label_for(const json& rec, std::size_t index) {
    if (rec.is_object() && rec.contains("id") && rec["id"].is_string())
        return "proposition " + rec["id"].get<std::string>();
    return "proposition #" + std::to_string(index + 1);
}

}  // namespace

SurveyInstrument parse_instrument(const json& doc) {
    if (!doc.is_object()) throw InstrumentError("instrument: top level must be an object");
    reject_unknown(doc, {"name", "propositions"}, "instrument");
    if (!doc.contains("name") || !doc["name"].is_string())
        throw InstrumentError("instrument: missing string field 'name'");
    if (!doc.contains("propositions") || !doc["propositions"].is_array())
        throw InstrumentError("instrument: missing array field 'propositions'");

    SurveyInstrument instr;
    instr.name = doc["name"].get<std::string>();
    const auto& props = doc["propositions"];
    std::set<std::string> seen;
    for (std::size_t i = 0; i < props.size(); ++i) {
        const auto& rec = props[i];
        auto where = label_for(rec, i);
        if (!rec.is_object()) throw InstrumentError(where + ": must be an object");
        reject_unknown(rec, {"id", "text", "axis", "polarity"}, where);
        for (auto field : {"id", "text", "axis"})
            if (!rec.contains(field) || !rec[field].is_string())
                throw InstrumentError(where + ": missing string field '" + field + "'");
        if (!rec.contains("polarity") || !rec["polarity"].is_number_integer())
            throw InstrumentError(where + ": missing integer field 'polarity'");

        Proposition p;
        p.id = rec["id"].get<std::string>();
        p.text = rec["text"].get<std::string>();
        auto axis = axis_from_string(rec["axis"].get<std::string>());
        if (!axis) throw InstrumentError(where + ": axis must be \"economic\" or \"social\"");
        p.axis = *axis;
        p.polarity = rec["polarity"].get<int>();
        if (p.polarity != 1 && p.polarity != -1)
            throw InstrumentError(where + ": polarity must be +1 or -1");
        if (trim(p.text).empty()) throw InstrumentError(where + ": text is empty");
        if (!seen.insert(p.id).second) throw InstrumentError("duplicate proposition id " + p.id);
        instr.propositions.push_back(std::move(p));
    }
    auto violations = validate_instrument(instr);
    if (!violations.empty()) throw InstrumentError("instrument: " + violations.front());
    return instr;
}

SurveyInstrument load_instrument(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InstrumentError("cannot open instrument file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InstrumentError("instrument " + path.string() + ": parse error: " + e.what());
    }
    return parse_instrument(doc);
}

json instrument_to_json(const SurveyInstrument& instr) {
    json props = json::array();
    for (const auto& p : instr.propositions) {
        props.push_back({{"id", p.id},
                         {"text", p.text},
                         {"axis", std::string(to_string(p.axis))},
                         {"polarity", p.polarity}});
    }
    return {{"name", instr.name}, {"propositions", props}};
}

void save_instrument(const SurveyInstrument& instr, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << instrument_to_json(instr).dump(2) << '\n';
}

}  // namespace overton
