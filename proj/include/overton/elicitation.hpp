#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "overton/backend.hpp"
#include "overton/cassette.hpp"
#include "overton/instrument.hpp"
#include "overton/persona.hpp"

namespace overton {

/// How a run uses its cassette.
///   live-record        cassette hits are reused; misses go live and are recorded
///   replay-strict      cassette only; a miss is a hard error, no live calls
///   replay-fallthrough cassette hits are reused; misses go live, nothing is written
enum class RecordMode { LiveRecord, ReplayStrict, ReplayFallthrough };

std::string_view to_string(RecordMode mode);
std::optional<RecordMode> record_mode_from_string(std::string_view s);

struct RunConfig {
    std::string model_id;
    std::string backend_id;
    double temperature = 0.0;
    std::optional<double> temperature_override;
    int max_retries = 2;
    int concurrency = 1;
    RecordMode mode = RecordMode::LiveRecord;
    std::chrono::milliseconds retry_delay{0};

    double effective_temperature() const { return temperature_override.value_or(temperature); }
};

struct BackendMetadata {
    std::optional<double> latency_ms;
    std::optional<int> prompt_tokens;
    std::optional<int> completion_tokens;
};

struct EssayRecord {
    std::string record_id;
    std::string model_id;
    std::string persona_id;
    std::string proposition_id;
    std::string prompt;
    std::string response;
    double temperature = 0.0;
    std::string backend;
    BackendMetadata metadata;
    std::string timestamp;
};

nlohmann::json to_json(const EssayRecord& r);
EssayRecord essay_from_json(const nlohmann::json& j);

/// Content hash over (model, persona, proposition, prompt, temperature).
std::string essay_record_id(const std::string& model_id, const std::string& persona_id,
                            const std::string& proposition_id, std::string_view prompt,
                            double temperature);

/// A grid cell that produced no usable data. Failed cells are never filled in.
struct CellFailure {
    std::string stage;  // "elicitation" or "assessment"
    std::string model_id;
    std::string persona_id;
    std::string proposition_id;
    std::string record_id;
    std::string error;
};

nlohmann::json to_json(const CellFailure& f);
CellFailure failure_from_json(const nlohmann::json& j);

struct ElicitationResult {
    std::vector<EssayRecord> records;  // grid order, failed cells omitted
    std::vector<CellFailure> failures;
    std::size_t live_calls = 0;
    std::size_t replayed = 0;
};

/// ISO-8601 UTC timestamp source.
using Clock = std::function<std::string()>;
std::string utc_now();
inline constexpr std::string_view kFixedTimestamp = "1970-01-01T00:00:00Z";

/// Elicits one essay per (persona, proposition) cell, persona-major in the
/// given order. `backend` may be null in replay-strict mode. Throws
/// ReplayMissError on a replay-strict miss.
ElicitationResult elicit(const SurveyInstrument& instr, const std::vector<Persona>& personas,
                         const RunConfig& cfg, ModelBackend* backend, Cassette& cassette,
                         const Clock& clock = utc_now);

}  // namespace overton
