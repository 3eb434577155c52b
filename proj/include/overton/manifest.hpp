#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "overton/backend.hpp"
#include "overton/elicitation.hpp"
#include "overton/geometry.hpp"
#include "overton/simulation.hpp"

namespace overton {

struct SyntheticSpec {
    SyntheticIdeology ideology;
    double fault_rate = 0.0;
    std::string fault_seed = "faults";
};

/// One backend as configured in a manifest. Credentials are referenced by
/// environment-variable name only and read when the backend is built.
struct BackendSpec {
    std::string id;    // model id sent to the provider
    std::string kind;  // "chat-completions", "local-server" or "synthetic"
    std::string endpoint;
    std::string credential_env;
    std::optional<double> temperature;  // per-model override
    std::optional<SyntheticSpec> synthetic;
};

struct AuditManifest {
    std::filesystem::path instrument;
    std::vector<BackendSpec> models;
    std::vector<std::string> personas;  // persona ids, catalog order when "standard"
    BackendSpec assessor;
    std::filesystem::path cassette;
    RecordMode record_mode = RecordMode::LiveRecord;
    std::filesystem::path output_dir;
    int concurrency = 1;
    int max_retries = 2;
    int retry_delay_ms = 0;
    double temperature = 0.0;
    HeatmapMode heatmap_mode = HeatmapMode::Points;
};

/// Parses a manifest document; relative paths resolve against `base_dir`.
/// Unknown fields are rejected. Throws ConfigError.
AuditManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
AuditManifest load_manifest(const std::filesystem::path& path);

/// Builds the backend for `spec`. Live kinds read their credential from the
/// named environment variable (ConfigError when it is named but unset).
/// Synthetic kinds need the instrument; `assessor` selects the synthetic judge.
std::shared_ptr<ModelBackend> make_backend(const BackendSpec& spec, const SurveyInstrument& instr,
                                           bool assessor);

}  // namespace overton
