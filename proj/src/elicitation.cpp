#include "overton/elicitation.hpp"

#include <ctime>
#include <variant>

#include "overton/errors.hpp"
#include "overton/hashing.hpp"
#include "overton/parallel.hpp"

namespace overton {

using nlohmann::json;

std::string_view to_string(RecordMode mode) {
    switch (mode) {
        case RecordMode::LiveRecord: return "live-record";
        case RecordMode::ReplayStrict: return "replay-strict";
        case RecordMode::ReplayFallthrough: return "replay-fallthrough";
    }
    return "live-record";
}

std::optional<RecordMode> record_mode_from_string(std::string_view s) {
    for (auto m : {RecordMode::LiveRecord, RecordMode::ReplayStrict, RecordMode::ReplayFallthrough})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string essay_record_id(const std::string& model_id, const std::string& persona_id,
                            const std::string& proposition_id, std::string_view prompt,
                            double temperature) {
    return hash_fields(
        {"essay", model_id, persona_id, proposition_id, prompt, canonical_double(temperature)});
}

namespace {

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

}  // namespace

json to_json(const EssayRecord& r) {
    return {{"record_id", r.record_id},
            {"model_id", r.model_id},
            {"persona_id", r.persona_id},
            {"proposition_id", r.proposition_id},
            {"prompt", r.prompt},
            {"response", r.response},
            {"temperature", r.temperature},
            {"backend", r.backend},
            {"metadata",
             {{"latency_ms", optional_json(r.metadata.latency_ms)},
              {"prompt_tokens", optional_json(r.metadata.prompt_tokens)},
              {"completion_tokens", optional_json(r.metadata.completion_tokens)}}},
            {"timestamp", r.timestamp}};
}

EssayRecord essay_from_json(const json& j) {
    EssayRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.model_id = j.at("model_id").get<std::string>();
    r.persona_id = j.at("persona_id").get<std::string>();
    r.proposition_id = j.at("proposition_id").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.temperature = j.at("temperature").get<double>();
    r.backend = j.value("backend", "");
    const auto md = j.value("metadata", json::object());
    r.metadata.latency_ms = optional_from<double>(md, "latency_ms");
    r.metadata.prompt_tokens = optional_from<int>(md, "prompt_tokens");
    r.metadata.completion_tokens = optional_from<int>(md, "completion_tokens");
    r.timestamp = j.value("timestamp", "");
    return r;
}

json to_json(const CellFailure& f) {
    return {{"stage", f.stage},           {"model_id", f.model_id},
            {"persona_id", f.persona_id}, {"proposition_id", f.proposition_id},
            {"record_id", f.record_id},   {"error", f.error}};
}

CellFailure failure_from_json(const json& j) {
    return {j.at("stage").get<std::string>(),          j.at("model_id").get<std::string>(),
            j.at("persona_id").get<std::string>(),     j.at("proposition_id").get<std::string>(),
            j.at("record_id").get<std::string>(),      j.at("error").get<std::string>()};
}

namespace {

struct Cell {
    const Persona* persona;
    const Proposition* prop;
    std::string prompt;
    std::string record_id;
};

struct Outcome {
    std::variant<EssayRecord, CellFailure> value;
    bool live = false;      // a live call was made
    bool recorded = false;  // must be written to the cassette
};

}  // namespace

ElicitationResult elicit(const SurveyInstrument& instr, const std::vector<Persona>& personas,
                         const RunConfig& cfg, ModelBackend* backend, Cassette& cassette,
                         const Clock& clock) {
    if (cfg.mode != RecordMode::ReplayStrict && backend == nullptr)
        throw ConfigError("elicit: a live backend is required in " +
                          std::string(to_string(cfg.mode)) + " mode");
    const double temperature = cfg.effective_temperature();

    std::vector<Cell> cells;
    cells.reserve(personas.size() * instr.propositions.size());
    for (const auto& persona : personas) {
        for (const auto& prop : instr.propositions) {
            auto prompt = build_prompt(prop, persona);
            auto id = essay_record_id(cfg.model_id, persona.id, prop.id, prompt, temperature);
            cells.push_back({&persona, &prop, std::move(prompt), std::move(id)});
        }
    }

    auto work = [&](std::size_t i) -> Outcome {
        const Cell& cell = cells[i];
        if (auto hit = cassette.find(kKindEssay, cell.record_id)) return {essay_from_json(*hit)};
        if (cfg.mode == RecordMode::ReplayStrict) {
            if (auto failed = cassette.find(kKindFailure, cell.record_id))
                return {failure_from_json(*failed)};
            throw ReplayMissError(cell.record_id);
        }

        const bool record = cfg.mode == RecordMode::LiveRecord;
        try {
            RetryPolicy policy{cfg.max_retries, cfg.retry_delay};
            auto completion = complete_with_retry(*backend, cell.prompt, temperature, cfg.model_id, policy);
            EssayRecord rec;
            rec.record_id = cell.record_id;
            rec.model_id = cfg.model_id;
            rec.persona_id = cell.persona->id;
            rec.proposition_id = cell.prop->id;
            rec.prompt = cell.prompt;
            rec.response = std::move(completion.text);
            rec.temperature = temperature;
            rec.backend = cfg.backend_id.empty() ? backend->kind() : cfg.backend_id;
            if (backend->deterministic()) {
                rec.timestamp = kFixedTimestamp;
            } else {
                rec.metadata.latency_ms = completion.latency_ms;
                rec.timestamp = clock();
            }
            rec.metadata.prompt_tokens = completion.prompt_tokens;
            rec.metadata.completion_tokens = completion.completion_tokens;
            return {std::move(rec), true, record};
        } catch (const BackendError& e) {
            CellFailure f{"elicitation", cfg.model_id, cell.persona->id, cell.prop->id,
                          cell.record_id, e.what()};
            return {std::move(f), true, record};
        }
    };

    ElicitationResult result;
    auto commit = [&](std::size_t, Outcome&& out) {
        if (out.live) ++result.live_calls;
        else ++result.replayed;
        if (auto* rec = std::get_if<EssayRecord>(&out.value)) {
            if (out.recorded) cassette.append(kKindEssay, rec->record_id, to_json(*rec));
            result.records.push_back(std::move(*rec));
        } else {
            auto& f = std::get<CellFailure>(out.value);
            if (out.recorded) cassette.append(kKindFailure, f.record_id, to_json(f));
            result.failures.push_back(std::move(f));
        }
    };

    run_ordered(cells.size(), cfg.concurrency, work, commit);
    return result;
}

}  // namespace overton
