#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "overton/assessment.hpp"
#include "overton/cassette.hpp"
#include "overton/elicitation.hpp"
#include "overton/geometry.hpp"
#include "overton/manifest.hpp"
#include "overton/scoring.hpp"

namespace overton {

/// Process exit codes shared by every command.
enum ExitCode : int {
    kExitOk = 0,
    kExitPartialFailure = 1,
    kExitConfigError = 2,
    kExitReplayMiss = 3,
};

/// Everything one model produced in a run.
struct ModelRecords {
    std::string model_id;
    std::vector<EssayRecord> essays;
    std::vector<AssessorRecord> assessments;
    std::vector<CellFailure> failures;
};

struct AuditData {
    SurveyInstrument instrument;
    std::vector<ModelRecords> models;
};

struct ConditionOutcome {
    std::string persona_id;
    std::optional<ConditionResult> result;
    std::string excluded_reason;  // set when result is empty
};

struct ModelReport {
    std::string model_id;
    std::vector<ConditionOutcome> conditions;
    std::optional<OvertonWindow> window;
    std::vector<std::string> annotations;
    std::vector<CellFailure> failures;
};

struct AuditReport {
    std::string instrument_name;
    std::size_t proposition_count = 0;
    std::size_t essays = 0;
    std::size_t assessments = 0;
    std::vector<std::string> assessor_models;
    HeatmapMode heatmap_mode = HeatmapMode::Points;
    std::vector<ModelReport> models;
    HeatmapGrid heatmap;

    /// True when any cell failed, any condition was excluded or a model has no window.
    bool partial() const;
};

/// Scores every condition, builds windows and the heatmap. Records are put in
/// canonical order (persona catalog, then instrument order) first, so the
/// report does not depend on the order records were written in. A failure
/// annotation is dropped when the same cell also has data.
AuditReport build_report(const AuditData& data, HeatmapMode mode);

/// Regroups a cassette into AuditData. `instrument` overrides the cassette's
/// recorded instrument; `assessor_model` picks one judge when several exist.
AuditData audit_data_from_cassette(const Cassette& cassette,
                                   const std::optional<SurveyInstrument>& instrument = std::nullopt,
                                   const std::optional<std::string>& assessor_model = std::nullopt);

nlohmann::json to_json(const AuditReport& report);
std::string summary_csv(const AuditReport& report);

/// Writes report.json, summary.csv, heatmap.csv, conditions/, windows/ and plots/.
void write_report_outputs(const AuditReport& report, const std::filesystem::path& out_dir);

/// Filesystem-safe rendering of an id.
std::string safe_filename(const std::string& id);

struct RunOptions {
    std::optional<RecordMode> mode;
    std::optional<std::filesystem::path> output_dir;
    Clock clock = utc_now;
};

struct RunOutcome {
    int exit_code = kExitOk;
    std::optional<AuditReport> report;
    std::size_t live_calls = 0;
    std::string message;
};

/// elicit -> assess -> score -> windows -> heatmap -> outputs. Configuration
/// problems surface before anything is written; a replay-strict miss also
/// leaves the output directory untouched.
RunOutcome run_audit(const AuditManifest& manifest, const RunOptions& options = {});

}  // namespace overton
