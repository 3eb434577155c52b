#include "overton/audit.hpp"

#include <fstream>
#include <map>
#include <set>

#include "overton/errors.hpp"
#include "overton/hashing.hpp"
#include "overton/persona.hpp"
#include "overton/svg.hpp"

namespace overton {

using nlohmann::json;

bool AuditReport::partial() const {
    for (const auto& m : models) {
        if (!m.failures.empty() || !m.window) return true;
        for (const auto& c : m.conditions)
            if (!c.result) return true;
    }
    return false;
}

namespace {

std::size_t persona_rank(const std::string& id) {
    const auto& cat = persona_catalog();
    for (std::size_t i = 0; i < cat.size(); ++i)
        if (cat[i].id == id) return i;
    return cat.size();
}

// Persona ids in catalog order, unknown ids after them in first-seen order.
std::vector<std::string> ordered_personas(const ModelRecords& m) {
    std::vector<std::string> seen;
    auto note = [&](const std::string& id) {
        if (std::find(seen.begin(), seen.end(), id) == seen.end()) seen.push_back(id);
    };
    for (const auto& e : m.essays) note(e.persona_id);
    for (const auto& f : m.failures) note(f.persona_id);
    std::stable_sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) {
        return persona_rank(a) < persona_rank(b);
    });
    return seen;
}

ModelReport report_model(const ModelRecords& m, const SurveyInstrument& instr) {
    ModelReport out;
    out.model_id = m.model_id;

    // cell key: persona id + '\n' + proposition id
    std::map<std::string, const EssayRecord*> essay_by_cell;
    for (const auto& e : m.essays) essay_by_cell.emplace(e.persona_id + "\n" + e.proposition_id, &e);
    std::map<std::string, const AssessorRecord*> assessment_by_essay;
    for (const auto& a : m.assessments) assessment_by_essay.emplace(a.essay_record_id, &a);

    std::map<std::string, std::size_t> prop_rank;
    for (std::size_t i = 0; i < instr.propositions.size(); ++i) prop_rank[instr.propositions[i].id] = i;

    std::vector<CellFailure> failures;
    std::set<std::string> failure_keys;
    for (const auto& f : m.failures) {
        auto cell = f.persona_id + "\n" + f.proposition_id;
        auto essay = essay_by_cell.find(cell);
        if (f.stage == "elicitation" && essay != essay_by_cell.end()) continue;
        if (f.stage == "assessment" && essay != essay_by_cell.end() &&
            assessment_by_essay.count(essay->second->record_id))
            continue;
        if (!failure_keys.insert(f.stage + "\n" + cell).second) continue;
        failures.push_back(f);
    }
    std::stable_sort(failures.begin(), failures.end(), [&](const auto& a, const auto& b) {
        auto ka = std::make_tuple(persona_rank(a.persona_id), a.persona_id, prop_rank[a.proposition_id], a.stage);
        auto kb = std::make_tuple(persona_rank(b.persona_id), b.persona_id, prop_rank[b.proposition_id], b.stage);
        return ka < kb;
    });
    out.failures = std::move(failures);

    std::vector<ConditionResult> valid;
    for (const auto& persona : ordered_personas(m)) {
        std::map<std::string, Rating> ratings;
        for (const auto& p : instr.propositions) {
            auto e = essay_by_cell.find(persona + "\n" + p.id);
            if (e == essay_by_cell.end()) continue;
            auto a = assessment_by_essay.find(e->second->record_id);
            if (a != assessment_by_essay.end()) ratings[p.id] = a->second->rating;
        }
        ConditionOutcome c;
        c.persona_id = persona;
        try {
            c.result = score_condition(m.model_id, persona, ratings, instr);
            valid.push_back(*c.result);
        } catch (const UndefinedPositionError& e) {
            c.excluded_reason = e.what();
            out.annotations.push_back("condition " + persona + " excluded from window: " + e.what());
        }
        out.conditions.push_back(std::move(c));
    }
    if (valid.empty()) {
        out.annotations.push_back("no window: model has no condition with a defined position");
    } else {
        out.window = build_window(m.model_id, std::span<const ConditionResult>(valid));
    }
    return out;
}

}  // namespace

AuditReport build_report(const AuditData& data, HeatmapMode mode) {
    AuditReport r;
    r.instrument_name = data.instrument.name;
    r.proposition_count = data.instrument.propositions.size();
    r.heatmap_mode = mode;
    std::set<std::string> assessors;
    std::vector<OvertonWindow> windows;
    for (const auto& m : data.models) {
        r.essays += m.essays.size();
        r.assessments += m.assessments.size();
        for (const auto& a : m.assessments) assessors.insert(a.assessor_model_id);
        r.models.push_back(report_model(m, data.instrument));
        if (r.models.back().window) windows.push_back(*r.models.back().window);
    }
    r.assessor_models.assign(assessors.begin(), assessors.end());
    r.heatmap = heatmap(windows, mode);
    return r;
}

AuditData audit_data_from_cassette(const Cassette& cassette,
                                   const std::optional<SurveyInstrument>& instrument,
                                   const std::optional<std::string>& assessor_model) {
    AuditData data;
    const auto entries = cassette.entries();
    if (instrument) {
        data.instrument = *instrument;
    } else {
        bool found = false;
        for (const auto& e : entries)
            if (e.kind == kKindInstrument) {
                data.instrument = parse_instrument(e.payload);
                found = true;
                break;
            }
        if (!found) throw ConfigError("cassette records no instrument; pass one explicitly");
    }

    std::set<std::string> assessor_ids;
    for (const auto& e : entries)
        if (e.kind == kKindAssessment) assessor_ids.insert(e.payload.at("assessor_model_id").get<std::string>());
    std::string assessor;
    if (assessor_model) {
        assessor = *assessor_model;
    } else if (assessor_ids.size() > 1) {
        std::string ids;
        for (const auto& a : assessor_ids) ids += " " + a;
        throw ConfigError("cassette holds several assessor models, choose one:" + ids);
    } else if (!assessor_ids.empty()) {
        assessor = *assessor_ids.begin();
    }

    std::map<std::string, std::size_t> model_index;
    auto model = [&](const std::string& id) -> ModelRecords& {
        auto [it, fresh] = model_index.emplace(id, data.models.size());
        if (fresh) data.models.push_back(ModelRecords{id, {}, {}, {}});
        return data.models[it->second];
    };

    // models in order of their first essay or failure entry
    for (const auto& e : entries)
        if (e.kind == kKindEssay || e.kind == kKindFailure) model(e.payload.at("model_id").get<std::string>());

    std::map<std::string, std::string> essay_model;  // essay record id -> model id
    std::map<std::string, std::string> essay_by_cell;  // model/persona/proposition -> essay id
    for (const auto& e : entries) {
        if (e.kind != kKindEssay) continue;
        auto rec = essay_from_json(e.payload);
        if (!data.instrument.find(rec.proposition_id)) continue;
        auto cell = rec.model_id + "\n" + rec.persona_id + "\n" + rec.proposition_id;
        if (!essay_by_cell.emplace(cell, rec.record_id).second) continue;
        essay_model[rec.record_id] = rec.model_id;
        model(rec.model_id).essays.push_back(std::move(rec));
    }
    for (const auto& e : entries) {
        if (e.kind != kKindFailure) continue;
        auto f = failure_from_json(e.payload);
        if (!data.instrument.find(f.proposition_id)) continue;
        if (f.stage == "assessment") {
            // keep only failures of the selected assessor
            auto it = essay_by_cell.find(f.model_id + "\n" + f.persona_id + "\n" + f.proposition_id);
            if (it == essay_by_cell.end() || assessor_record_id(assessor, it->second) != f.record_id)
                continue;
        }
        model(f.model_id).failures.push_back(std::move(f));
    }
    for (const auto& e : entries) {
        if (e.kind != kKindAssessment) continue;
        auto rec = assessment_from_json(e.payload);
        if (rec.assessor_model_id != assessor) continue;
        auto it = essay_model.find(rec.essay_record_id);
        if (it == essay_model.end()) continue;
        model(it->second).assessments.push_back(std::move(rec));
    }
    return data;
}

json to_json(const AuditReport& r) {
    json models = json::array();
    for (const auto& m : r.models) {
        json conditions = json::array();
        json default_point = nullptr;
        for (const auto& c : m.conditions) {
            json cj = {{"persona_id", c.persona_id}};
            if (c.result) {
                cj["point"] = to_json(c.result->point);
                cj["excluded"] = nullptr;
                if (c.persona_id == kDefaultPersonaId) default_point = to_json(c.result->point);
            } else {
                cj["point"] = nullptr;
                cj["excluded"] = c.excluded_reason;
            }
            conditions.push_back(std::move(cj));
        }
        json failures = json::array();
        for (const auto& f : m.failures) failures.push_back(to_json(f));
        models.push_back({{"model_id", m.model_id},
                          {"default_point", default_point},
                          {"conditions", conditions},
                          {"window", m.window ? to_json(*m.window) : json(nullptr)},
                          {"annotations", m.annotations},
                          {"failures", failures}});
    }
    std::size_t failure_count = 0;
    for (const auto& m : r.models) failure_count += m.failures.size();
    return {{"format", "overton-audit-report/1"},
            {"metadata",
             {{"essay_template", std::string(kEssayTemplateVersion)},
              {"assessor_template", std::string(kAssessorTemplateVersion)},
              {"persona_catalog", std::string(kPersonaCatalogVersion)},
              {"scoring", std::string(kScoringVersion)},
              {"heatmap_mode", std::string(to_string(r.heatmap_mode))},
              {"instrument", {{"name", r.instrument_name}, {"propositions", r.proposition_count}}},
              {"assessor_models", r.assessor_models},
              {"counts",
               {{"essays", r.essays}, {"assessments", r.assessments}, {"failures", failure_count}}}}},
            {"models", models},
            {"heatmap", to_json(r.heatmap, r.heatmap_mode)}};
}

std::string summary_csv(const AuditReport& r) {
    std::string out = summary_header() + "\n";
    for (const auto& m : r.models)
        for (const auto& c : m.conditions)
            if (c.result) out += summary_row(*c.result) + "\n";
    return out;
}

std::string safe_filename(const std::string& id) {
    std::string out;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

}  // namespace

void write_report_outputs(const AuditReport& r, const std::filesystem::path& dir) {
    write_file(dir / "report.json", to_json(r).dump(2) + "\n");
    write_file(dir / "summary.csv", summary_csv(r));
    write_file(dir / "heatmap.csv", heatmap_csv(r.heatmap));
    write_file(dir / "plots" / "heatmap.svg", render_heatmap_svg(r.heatmap));
    for (const auto& m : r.models) {
        const auto model_dir = safe_filename(m.model_id);
        for (const auto& c : m.conditions)
            if (c.result)
                write_file(dir / "conditions" / model_dir / (safe_filename(c.persona_id) + ".json"),
                           to_json(*c.result).dump(2) + "\n");
        if (m.window) {
            write_file(dir / "windows" / (model_dir + ".json"), to_json(*m.window).dump(2) + "\n");
            write_file(dir / "plots" / (model_dir + ".svg"), render_compass_svg(*m.window));
        }
    }
}

RunOutcome run_audit(const AuditManifest& manifest, const RunOptions& options) {
    RunOutcome outcome;
    const RecordMode mode = options.mode.value_or(manifest.record_mode);
    const auto out_dir = options.output_dir.value_or(manifest.output_dir);

    // Configuration checks; nothing is written until they pass.
    SurveyInstrument instr;
    std::vector<Persona> personas;
    std::vector<std::shared_ptr<ModelBackend>> backends;
    std::shared_ptr<ModelBackend> assessor;
    try {
        instr = load_instrument(manifest.instrument);
        for (const auto& id : manifest.personas) personas.push_back(*find_persona(id));
        if (mode == RecordMode::ReplayStrict) {
            if (!std::filesystem::exists(manifest.cassette))
                throw ConfigError("replay-strict run needs an existing cassette: " + manifest.cassette.string());
        } else {
            for (const auto& spec : manifest.models) backends.push_back(make_backend(spec, instr, false));
            assessor = make_backend(manifest.assessor, instr, true);
        }
    } catch (const Error& e) {
        outcome.exit_code = kExitConfigError;
        outcome.message = e.what();
        return outcome;
    }

    if (!manifest.cassette.parent_path().empty())
        std::filesystem::create_directories(manifest.cassette.parent_path());
    Cassette cassette(manifest.cassette);

    AuditData data;
    data.instrument = instr;
    try {
        if (mode == RecordMode::LiveRecord) {
            auto doc = instrument_to_json(instr);
            cassette.append(kKindInstrument, sha256_hex(doc.dump()), doc);
        }
        for (std::size_t i = 0; i < manifest.models.size(); ++i) {
            const auto& spec = manifest.models[i];
            RunConfig cfg;
            cfg.model_id = spec.id;
            cfg.backend_id = spec.kind;
            cfg.temperature = manifest.temperature;
            cfg.temperature_override = spec.temperature;
            cfg.max_retries = manifest.max_retries;
            cfg.concurrency = manifest.concurrency;
            cfg.mode = mode;
            cfg.retry_delay = std::chrono::milliseconds(manifest.retry_delay_ms);
            ModelBackend* backend = backends.empty() ? nullptr : backends[i].get();
            auto essays = elicit(instr, personas, cfg, backend, cassette, options.clock);

            AssessorConfig acfg;
            acfg.model_id = manifest.assessor.id;
            acfg.temperature = manifest.assessor.temperature.value_or(0.0);
            acfg.max_retries = manifest.max_retries;
            acfg.concurrency = manifest.concurrency;
            acfg.mode = mode;
            acfg.retry_delay = cfg.retry_delay;
            auto assessed = assess_all(essays.records, instr, assessor.get(), cassette, acfg, options.clock);

            outcome.live_calls += essays.live_calls + assessed.live_calls;
            ModelRecords rec{spec.id, std::move(essays.records), std::move(assessed.records),
                             std::move(essays.failures)};
            for (auto& f : assessed.failures) rec.failures.push_back(std::move(f));
            data.models.push_back(std::move(rec));
        }
    } catch (const ReplayMissError& e) {
        outcome.exit_code = kExitReplayMiss;
        outcome.message = e.what();
        return outcome;
    } catch (const ConfigError& e) {
        outcome.exit_code = kExitConfigError;
        outcome.message = e.what();
        return outcome;
    }

    auto report = build_report(data, manifest.heatmap_mode);
    write_report_outputs(report, out_dir);
    outcome.exit_code = report.partial() ? kExitPartialFailure : kExitOk;
    outcome.report = std::move(report);
    return outcome;
}

}  // namespace overton
