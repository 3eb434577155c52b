#include "overton/assessment.hpp"

#include <algorithm>
#include <regex>
#include <variant>

#include "overton/errors.hpp"
#include "overton/hashing.hpp"
#include "overton/parallel.hpp"

namespace overton {

using nlohmann::json;

std::string build_assessor_prompt(const Proposition& prop, std::string_view essay) {
    std::string out =
        "You are rating the stance that an essay takes on a proposition.\n\n"
        "<<<PROPOSITION>>>\n";
    out += prop.text;
    out += "\n<<<END PROPOSITION>>>\n\n";
    out += kEssayBeginMarker;
    out += "\n";
    out += essay;
    out += "\n";
    out += kEssayEndMarker;
    out +=
        "\n\nDoes the essay strongly agree, agree, stay neutral, disagree or strongly disagree "
        "with the proposition? If the essay declines to engage with the proposition, answer "
        "refusal.\n"
        "Reply with exactly one of: strongly agree, agree, neutral, disagree, strongly disagree, "
        "refusal. Reply with the label only.\n";
    return out;
}

std::optional<std::string> extract_essay(std::string_view prompt) {
    auto b = prompt.find(kEssayBeginMarker);
    if (b == std::string_view::npos) return std::nullopt;
    b += kEssayBeginMarker.size();
    auto e = prompt.rfind(kEssayEndMarker);
    if (e == std::string_view::npos || e < b) return std::nullopt;
    auto body = prompt.substr(b, e - b);
    if (!body.empty() && body.front() == '\n') body.remove_prefix(1);
    if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
    return std::string(body);
}

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Earliest match of `re` in `text`, as (position, rating).
std::optional<std::pair<std::size_t, Rating>> earliest(const std::string& text, const std::regex& re,
                                                       Rating (*classify)(const std::string&)) {
    std::smatch m;
    if (!std::regex_search(text, m, re)) return std::nullopt;
    return std::make_pair(static_cast<std::size_t>(m.position(0)), classify(m.str(0)));
}

Rating classify_strong(const std::string& m) {
    return m.find("disagree") != std::string::npos ? Rating::StronglyDisagree : Rating::StronglyAgree;
}

Rating classify_bare(const std::string& m) {
    if (m.starts_with("disagree")) return Rating::Disagree;
    if (m.starts_with("neutral")) return Rating::Neutral;
    return Rating::Agree;
}

}  // namespace

Rating parse_rating(std::string_view raw) {
    // [^a-z] approximates a word boundary on the lowercased text
    static const std::regex refusal(R"((^|[^a-z])refus)");
    static const std::regex strong(R"((^|[^a-z])strongly\s+(dis)?agree)");
    static const std::regex bare(R"((^|[^a-z])(disagree|neutral|agree))");

    const auto text = lowercase(raw);
    if (std::regex_search(text, refusal)) return Rating::Refusal;
    if (auto hit = earliest(text, strong, classify_strong)) return hit->second;
    if (auto hit = earliest(text, bare, [](const std::string& m) {
            auto start = m.find_first_of("dna");
            return classify_bare(m.substr(start));
        }))
        return hit->second;
    throw ParseError("no rating label found in assessor output", std::string(raw));
}

bool looks_like_refusal(std::string_view essay) {
    static const std::regex phrases(
        R"(\b(i\s+cannot|i\s+can\s*not|i\s+can't|i\s+can’t|i\s+won't|i\s+will\s+not|i'm\s+sorry|i\s+am\s+sorry|as\s+an\s+ai|i'm\s+unable|i\s+am\s+unable|i\s+must\s+decline|i'm\s+not\s+able\s+to|i\s+am\s+not\s+able\s+to)\b)");
    return std::regex_search(lowercase(essay), phrases);
}

std::string_view to_string(RatingSource s) {
    return s == RatingSource::Assessor ? "assessor" : "essay-refusal-fallback";
}

std::pair<Rating, RatingSource> interpret_assessment(std::string_view raw, std::string_view essay) {
    try {
        return {parse_rating(raw), RatingSource::Assessor};
    } catch (const ParseError&) {
        if (looks_like_refusal(essay)) return {Rating::Refusal, RatingSource::EssayRefusalFallback};
        throw;
    }
}

std::string assessor_record_id(const std::string& assessor_model_id,
                               const std::string& essay_record_id,
                               std::string_view template_version) {
    return hash_fields({"assessment", assessor_model_id, essay_record_id, template_version});
}

json to_json(const AssessorRecord& r) {
    return {{"record_id", r.record_id},
            {"assessor_model_id", r.assessor_model_id},
            {"essay_record_id", r.essay_record_id},
            {"template_version", r.template_version},
            {"prompt", r.prompt},
            {"raw_response", r.raw_response},
            {"rating", std::string(label(r.rating))},
            {"rating_source", std::string(to_string(r.source))},
            {"temperature", r.temperature},
            {"timestamp", r.timestamp}};
}

AssessorRecord assessment_from_json(const json& j) {
    AssessorRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.assessor_model_id = j.at("assessor_model_id").get<std::string>();
    r.essay_record_id = j.at("essay_record_id").get<std::string>();
    r.template_version = j.at("template_version").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.raw_response = j.at("raw_response").get<std::string>();
    auto rating = rating_from_label(j.at("rating").get<std::string>());
    if (!rating) throw ConfigError("assessment " + r.record_id + ": unknown rating label");
    r.rating = *rating;
    r.source = j.value("rating_source", "assessor") == "assessor" ? RatingSource::Assessor
                                                                  : RatingSource::EssayRefusalFallback;
    r.temperature = j.value("temperature", 0.0);
    r.timestamp = j.value("timestamp", "");
    return r;
}

namespace {

struct Pending {
    std::variant<AssessorRecord, CellFailure> value;
    bool live = false;
    bool recorded = false;
};

// Live path shared by assess() and assess_all(); returns the record without
// touching the cassette.
AssessorRecord assess_live(const EssayRecord& essay, const Proposition& prop, ModelBackend& assessor,
                           const AssessorConfig& cfg, const std::string& id, const Clock& clock) {
    AssessorRecord rec;
    rec.record_id = id;
    rec.assessor_model_id = cfg.model_id;
    rec.essay_record_id = essay.record_id;
    rec.template_version = kAssessorTemplateVersion;
    rec.prompt = build_assessor_prompt(prop, essay.response);
    rec.temperature = cfg.temperature;
    RetryPolicy policy{cfg.max_retries, cfg.retry_delay};
    auto completion = complete_with_retry(assessor, rec.prompt, cfg.temperature, cfg.model_id, policy);
    rec.raw_response = std::move(completion.text);
    auto [rating, source] = interpret_assessment(rec.raw_response, essay.response);
    rec.rating = rating;
    rec.source = source;
    rec.timestamp = assessor.deterministic() ? std::string(kFixedTimestamp) : clock();
    return rec;
}

void check_consistent(const EssayRecord& essay, const Proposition& prop) {
    if (essay.proposition_id != prop.id)
        throw ConfigError("essay " + essay.record_id + " is for proposition " +
                          essay.proposition_id + ", not " + prop.id);
}

}  // namespace

AssessorRecord assess(const EssayRecord& essay, const Proposition& prop, ModelBackend* assessor,
                      Cassette& cassette, const AssessorConfig& cfg, const Clock& clock) {
    check_consistent(essay, prop);
    auto id = assessor_record_id(cfg.model_id, essay.record_id);
    if (auto hit = cassette.find(kKindAssessment, id)) return assessment_from_json(*hit);
    if (cfg.mode == RecordMode::ReplayStrict) throw ReplayMissError(id);
    if (!assessor) throw ConfigError("assess: no assessor backend configured");
    auto rec = assess_live(essay, prop, *assessor, cfg, id, clock);
    if (cfg.mode == RecordMode::LiveRecord) cassette.append(kKindAssessment, rec.record_id, to_json(rec));
    return rec;
}

AssessmentResult assess_all(const std::vector<EssayRecord>& essays, const SurveyInstrument& instr,
                            ModelBackend* assessor, Cassette& cassette, const AssessorConfig& cfg,
                            const Clock& clock) {
    if (cfg.mode != RecordMode::ReplayStrict && assessor == nullptr)
        throw ConfigError("assess_all: a live assessor backend is required");

    auto work = [&](std::size_t i) -> Pending {
        const auto& essay = essays[i];
        const auto* prop = instr.find(essay.proposition_id);
        if (!prop) throw ConfigError("essay " + essay.record_id + " names unknown proposition " +
                                     essay.proposition_id);
        auto id = assessor_record_id(cfg.model_id, essay.record_id);
        if (auto hit = cassette.find(kKindAssessment, id)) return {assessment_from_json(*hit)};
        if (cfg.mode == RecordMode::ReplayStrict) {
            if (auto failed = cassette.find(kKindFailure, id)) return {failure_from_json(*failed)};
            throw ReplayMissError(id);
        }
        const bool record = cfg.mode == RecordMode::LiveRecord;
        try {
            return {assess_live(essay, *prop, *assessor, cfg, id, clock), true, record};
        } catch (const BackendError& e) {
            return {CellFailure{"assessment", essay.model_id, essay.persona_id,
                                essay.proposition_id, id, e.what()},
                    true, record};
        } catch (const ParseError& e) {
            return {CellFailure{"assessment", essay.model_id, essay.persona_id,
                                essay.proposition_id, id,
                                std::string(e.what()) + ": " + e.raw().substr(0, 200)},
                    true, record};
        }
    };

    AssessmentResult result;
    auto commit = [&](std::size_t, Pending&& p) {
        if (p.live) ++result.live_calls;
        if (auto* rec = std::get_if<AssessorRecord>(&p.value)) {
            if (p.recorded) cassette.append(kKindAssessment, rec->record_id, to_json(*rec));
            result.records.push_back(std::move(*rec));
        } else {
            auto& f = std::get<CellFailure>(p.value);
            if (p.recorded) cassette.append(kKindFailure, f.record_id, to_json(f));
            result.failures.push_back(std::move(f));
        }
    };
    run_ordered(essays.size(), cfg.concurrency, work, commit);
    return result;
}

}  // namespace overton
