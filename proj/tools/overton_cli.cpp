// overton: audit the range of political positions a language model will argue for.
//
//   overton run --manifest audit.json [--replay | --record] [--out DIR]
//   overton score --cassette FILE --instrument FILE
//   overton report --cassette FILE --out DIR
//   overton validate-assessor --gold FILE --cassette FILE

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "overton/audit.hpp"
#include "overton/errors.hpp"
#include "overton/reliability.hpp"

using namespace overton;

namespace {

HeatmapMode parse_heatmap_mode(const std::string& s) {
    if (s == "points") return HeatmapMode::Points;
    if (s == "hull") return HeatmapMode::Hull;
    throw ConfigError("heatmap mode must be 'points' or 'hull'");
}

std::optional<SurveyInstrument> optional_instrument(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return load_instrument(path);
}

void print_annotations(const AuditReport& report) {
    for (const auto& m : report.models) {
        if (!m.failures.empty())
            std::cerr << m.model_id << ": " << m.failures.size() << " failed cell(s)\n";
        for (const auto& a : m.annotations) std::cerr << m.model_id << ": " << a << "\n";
    }
}

int cmd_run(const std::string& manifest_path, bool replay, bool record, const std::string& out) {
    AuditManifest manifest;
    try {
        manifest = load_manifest(manifest_path);
    } catch (const Error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    }
    RunOptions options;
    if (replay) options.mode = RecordMode::ReplayStrict;
    if (record) options.mode = RecordMode::LiveRecord;
    if (!out.empty()) options.output_dir = out;

    auto outcome = run_audit(manifest, options);
    switch (outcome.exit_code) {
        case kExitConfigError: std::cerr << "configuration error: " << outcome.message << "\n"; break;
        case kExitReplayMiss: std::cerr << outcome.message << "\n"; break;
        default:
            print_annotations(*outcome.report);
            std::cerr << "wrote " << options.output_dir.value_or(manifest.output_dir).string()
                      << " (" << outcome.live_calls << " live call(s))\n";
    }
    return outcome.exit_code;
}

int cmd_score(const std::string& cassette_path, const std::string& instrument_path) {
    auto instr = load_instrument(instrument_path);
    Cassette cassette(cassette_path);
    auto report = build_report(audit_data_from_cassette(cassette, instr), HeatmapMode::Points);
    std::cout << summary_csv(report);
    print_annotations(report);
    return report.partial() ? kExitPartialFailure : kExitOk;
}

int cmd_report(const std::string& cassette_path, const std::string& out,
               const std::string& instrument_path, const std::string& heatmap_mode,
               const std::string& assessor) {
    if (!std::filesystem::exists(cassette_path))
        throw ConfigError("cassette not found: " + cassette_path);
    Cassette cassette(cassette_path);
    auto data = audit_data_from_cassette(
        cassette, optional_instrument(instrument_path),
        assessor.empty() ? std::nullopt : std::optional<std::string>(assessor));
    auto report = build_report(data, parse_heatmap_mode(heatmap_mode));
    write_report_outputs(report, out);
    print_annotations(report);
    return report.partial() ? kExitPartialFailure : kExitOk;
}

int cmd_validate_assessor(const std::string& gold, const std::string& cassette_path,
                          const std::string& out) {
    if (!std::filesystem::exists(cassette_path))
        throw ConfigError("cassette not found: " + cassette_path);
    Cassette cassette(cassette_path);
    std::vector<AssessorRecord> assessments;
    for (const auto& e : cassette.entries())
        if (e.kind == kKindAssessment) assessments.push_back(assessment_from_json(e.payload));
    try {
        auto report = validate_assessor(gold, assessments);
        auto text = to_json(report).dump(2) + "\n";
        std::cout << text;
        std::ofstream file(out);
        if (!file) throw ConfigError("cannot write " + out);
        file << text;
        return kExitOk;
    } catch (const MissingAssessmentError& e) {
        std::cerr << e.what() << "\n";
        return kExitPartialFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Map the range of political-compass positions a language model will espouse"};
    app.require_subcommand(1);

    std::string manifest, out, cassette, instrument, gold, heatmap_mode = "points", assessor;
    std::string reliability_out = "reliability_report.json";
    bool replay = false, record = false;

    auto* run = app.add_subcommand("run", "elicit, assess, score and report as the manifest describes");
    run->add_option("--manifest", manifest, "audit manifest (JSON)")->required();
    auto* replay_flag = run->add_flag("--replay", replay, "replay-strict: serve every call from the cassette");
    run->add_flag("--record", record, "live-record: call backends for cells missing from the cassette")
        ->excludes(replay_flag);
    run->add_option("--out", out, "output directory (overrides the manifest)");

    auto* score = app.add_subcommand("score", "print the per-condition summary table for a cassette");
    score->add_option("--cassette", cassette, "cassette file")->required();
    score->add_option("--instrument", instrument, "instrument file")->required();

    auto* report = app.add_subcommand("report", "regenerate all report artifacts from a cassette");
    report->add_option("--cassette", cassette, "cassette file")->required();
    report->add_option("--out", out, "output directory")->required();
    report->add_option("--instrument", instrument, "instrument file (default: the one recorded in the cassette)");
    report->add_option("--heatmap-mode", heatmap_mode, "points or hull");
    report->add_option("--assessor", assessor, "assessor model id when the cassette holds several");

    auto* validate = app.add_subcommand("validate-assessor", "compare assessor ratings with a human gold set");
    validate->add_option("--gold", gold, "gold CSV: essay_record_id,gold_rating")->required();
    validate->add_option("--cassette", cassette, "cassette file")->required();
    validate->add_option("--out", reliability_out, "where to write the reliability report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(manifest, replay, record, out);
        if (*score) return cmd_score(cassette, instrument);
        if (*report) return cmd_report(cassette, out, instrument, heatmap_mode, assessor);
        if (*validate) return cmd_validate_assessor(gold, cassette, reliability_out);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartialFailure;
    }
    return kExitOk;
}
