#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "overton/backend.hpp"
#include "overton/cassette.hpp"
#include "overton/elicitation.hpp"
#include "overton/instrument.hpp"
#include "overton/rating.hpp"

namespace overton {

inline constexpr std::string_view kAssessorTemplateVersion = "assessor-v1";
inline constexpr std::string_view kEssayBeginMarker = "<<<ESSAY>>>";
inline constexpr std::string_view kEssayEndMarker = "<<<END ESSAY>>>";

/// Judge prompt presenting the proposition and essay between explicit markers
/// and asking for exactly one of the six canonical labels.
std::string build_assessor_prompt(const Proposition& prop, std::string_view essay);

/// The essay section of an assessor prompt, or nullopt if the markers are absent.
std::optional<std::string> extract_essay(std::string_view assessor_prompt);

/// Parsing rule, applied to the lowercased text:
///   1. any refusal marker ("refus...") yields Refusal;
///   2. otherwise the earliest "strongly agree" / "strongly disagree";
///   3. otherwise the earliest word-initial "disagree" / "neutral" / "agree".
/// Strongly-qualified labels therefore win over bare ones regardless of
/// position. Throws ParseError carrying `raw` when nothing matches.
Rating parse_rating(std::string_view raw);

/// True when the essay matches one of the common refusal phrasings.
bool looks_like_refusal(std::string_view essay);

enum class RatingSource { Assessor, EssayRefusalFallback };
std::string_view to_string(RatingSource s);

/// parse_rating on the assessor output; when that fails and the essay reads
/// as a refusal, Refusal from the fallback. Otherwise ParseError.
std::pair<Rating, RatingSource> interpret_assessment(std::string_view raw, std::string_view essay);

struct AssessorRecord {
    std::string record_id;
    std::string assessor_model_id;
    std::string essay_record_id;
    std::string template_version;
    std::string prompt;
    std::string raw_response;
    Rating rating = Rating::Neutral;
    RatingSource source = RatingSource::Assessor;
    double temperature = 0.0;
    std::string timestamp;
};

nlohmann::json to_json(const AssessorRecord& r);
AssessorRecord assessment_from_json(const nlohmann::json& j);

std::string assessor_record_id(const std::string& assessor_model_id,
                               const std::string& essay_record_id,
                               std::string_view template_version = kAssessorTemplateVersion);

struct AssessorConfig {
    std::string model_id;
    double temperature = 0.0;
    int max_retries = 2;
    int concurrency = 1;
    RecordMode mode = RecordMode::LiveRecord;
    std::chrono::milliseconds retry_delay{0};
};

/// Rates one essay. Throws ParseError for an unusable judge output,
/// ReplayMissError on a replay-strict miss and BackendError after retries.
AssessorRecord assess(const EssayRecord& essay, const Proposition& prop, ModelBackend* assessor,
                      Cassette& cassette, const AssessorConfig& cfg, const Clock& clock = utc_now);

struct AssessmentResult {
    std::vector<AssessorRecord> records;  // same order as the input essays
    std::vector<CellFailure> failures;
    std::size_t live_calls = 0;
};

/// Rates every essay with bounded concurrency; cassette writes happen in input
/// order. Failed assessments become CellFailures; a replay-strict miss throws.
AssessmentResult assess_all(const std::vector<EssayRecord>& essays, const SurveyInstrument& instr,
                            ModelBackend* assessor, Cassette& cassette, const AssessorConfig& cfg,
                            const Clock& clock = utc_now);

}  // namespace overton
