#include "overton/manifest.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "overton/errors.hpp"
#include "overton/persona.hpp"

namespace overton {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(where + ": unknown field '" + it.key() + "'");
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": field '" + key + "' has the wrong type");
    }
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string() || obj[key].get<std::string>().empty())
        throw ConfigError(where + ": missing string field '" + key + "'");
    return obj[key].get<std::string>();
}

SyntheticSpec parse_synthetic(const json& j, const std::string& where) {
    reject_unknown(j, {"base", "compliance", "refusals", "fault_rate", "fault_seed"}, where);
    SyntheticSpec s;
    if (!j.contains("base") || !j["base"].is_array() || j["base"].size() != 2 ||
        !j["base"][0].is_number() || !j["base"][1].is_number())
        throw ConfigError(where + ": 'base' must be [economic, social]");
    s.ideology.base_economic = j["base"][0].get<double>();
    s.ideology.base_social = j["base"][1].get<double>();
    s.ideology.compliance = get_or(j, "compliance", 1.0, where);
    for (const auto& r : get_or(j, "refusals", std::vector<std::string>{}, where))
        s.ideology.refusals.insert(r);
    s.fault_rate = get_or(j, "fault_rate", 0.0, where);
    s.fault_seed = get_or(j, "fault_seed", std::string("faults"), where);
    if (!(s.fault_rate >= 0.0 && s.fault_rate <= 1.0))
        throw ConfigError(where + ": fault_rate must be in [0, 1]");
    try {
        validate_ideology(s.ideology);
    } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return s;
}

BackendSpec parse_backend(const json& j, const std::string& where, bool need_id) {
    reject_unknown(j, {"id", "backend", "endpoint", "credential_env", "temperature", "synthetic"}, where);
    BackendSpec b;
    b.kind = required_string(j, "backend", where);
    b.id = need_id ? required_string(j, "id", where) : get_or(j, "id", b.kind, where);
    b.endpoint = get_or(j, "endpoint", std::string{}, where);
    b.credential_env = get_or(j, "credential_env", std::string{}, where);
    if (j.contains("temperature")) {
        b.temperature = get_or(j, "temperature", 0.0, where);
        if (*b.temperature < 0) throw ConfigError(where + ": temperature must be >= 0");
    }
    if (b.kind == "synthetic") {
        if (j.contains("synthetic")) b.synthetic = parse_synthetic(j["synthetic"], where + ".synthetic");
        else if (need_id) throw ConfigError(where + ": synthetic backend needs a 'synthetic' block");
    } else if (b.kind == "chat-completions" || b.kind == "local-server") {
        if (b.endpoint.empty()) throw ConfigError(where + ": backend '" + b.kind + "' needs an endpoint");
        split_endpoint(b.endpoint);
        if (j.contains("synthetic")) throw ConfigError(where + ": 'synthetic' only applies to synthetic backends");
    } else {
        throw ConfigError(where + ": unknown backend kind '" + b.kind + "'");
    }
    return b;
}

}  // namespace

AuditManifest parse_manifest(const json& doc, const std::filesystem::path& base_dir) {
    const std::string where = "manifest";
    reject_unknown(doc, {"instrument", "models", "personas", "assessor", "cassette", "record_mode",
                         "output_dir", "concurrency", "max_retries", "retry_delay_ms", "temperature",
                         "heatmap_mode"},
                   where);
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    AuditManifest m;
    m.instrument = resolve(required_string(doc, "instrument", where));
    if (!doc.contains("models") || !doc["models"].is_array() || doc["models"].empty())
        throw ConfigError(where + ": 'models' must be a non-empty array");
    std::set<std::string> model_ids;
    for (std::size_t i = 0; i < doc["models"].size(); ++i) {
        auto spec = parse_backend(doc["models"][i], where + ".models[" + std::to_string(i) + "]", true);
        if (!model_ids.insert(spec.id).second) throw ConfigError(where + ": duplicate model id " + spec.id);
        m.models.push_back(std::move(spec));
    }

    const json personas = doc.value("personas", json("standard"));
    if (personas.is_string() && personas.get<std::string>() == "standard") {
        for (const auto& p : persona_catalog()) m.personas.push_back(p.id);
    } else if (personas.is_array() && !personas.empty()) {
        for (const auto& p : personas) {
            if (!p.is_string() || !find_persona(p.get<std::string>()))
                throw ConfigError(where + ": unknown persona " + p.dump());
            m.personas.push_back(p.get<std::string>());
        }
    } else {
        throw ConfigError(where + ": 'personas' must be \"standard\" or a list of persona ids");
    }

    if (!doc.contains("assessor")) throw ConfigError(where + ": missing 'assessor'");
    m.assessor = parse_backend(doc["assessor"], where + ".assessor", false);
    m.cassette = resolve(required_string(doc, "cassette", where));
    auto mode = record_mode_from_string(get_or(doc, "record_mode", std::string("live-record"), where));
    if (!mode) throw ConfigError(where + ": unknown record_mode");
    m.record_mode = *mode;
    m.output_dir = resolve(get_or(doc, "output_dir", std::string("out"), where));
    m.concurrency = get_or(doc, "concurrency", 1, where);
    m.max_retries = get_or(doc, "max_retries", 2, where);
    m.retry_delay_ms = get_or(doc, "retry_delay_ms", 0, where);
    m.temperature = get_or(doc, "temperature", 0.0, where);
    if (m.concurrency < 1) throw ConfigError(where + ": concurrency must be >= 1");
    if (m.max_retries < 0) throw ConfigError(where + ": max_retries must be >= 0");
    if (m.temperature < 0) throw ConfigError(where + ": temperature must be >= 0");
    auto hm = get_or(doc, "heatmap_mode", std::string("points"), where);
    if (hm == "points") m.heatmap_mode = HeatmapMode::Points;
    else if (hm == "hull") m.heatmap_mode = HeatmapMode::Hull;
    else throw ConfigError(where + ": heatmap_mode must be \"points\" or \"hull\"");
    return m;
}

AuditManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("manifest " + path.string() + ": " + e.what());
    }
    return parse_manifest(doc, path.parent_path().empty() ? "." : path.parent_path());
}

std::shared_ptr<ModelBackend> make_backend(const BackendSpec& spec, const SurveyInstrument& instr,
                                           bool assessor) {
    auto credential = [&]() -> std::string {
        if (spec.credential_env.empty()) return {};
        const char* v = std::getenv(spec.credential_env.c_str());
        if (!v || !*v)
            throw ConfigError("credential environment variable " + spec.credential_env +
                              " is not set (backend " + spec.id + ")");
        return v;
    };
    if (spec.kind == "chat-completions")
        return std::make_shared<ChatCompletionsBackend>(spec.endpoint, credential());
    if (spec.kind == "local-server") return std::make_shared<LocalServerBackend>(spec.endpoint);
    if (spec.kind == "synthetic") {
        if (assessor) return std::make_shared<SyntheticAssessor>();
        if (!spec.synthetic) throw ConfigError("synthetic backend " + spec.id + " has no ideology");
        std::shared_ptr<ModelBackend> b =
            std::make_shared<SyntheticRespondent>(instr, spec.synthetic->ideology);
        if (spec.synthetic->fault_rate > 0)
            b = std::make_shared<FaultInjectingBackend>(b, spec.synthetic->fault_rate,
                                                        spec.synthetic->fault_seed);
        return b;
    }
    throw ConfigError("unknown backend kind " + spec.kind);
}

}  // namespace overton
