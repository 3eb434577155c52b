#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "overton/assessment.hpp"
#include "overton/rating.hpp"

namespace overton {

/// 6x6 counts, gold on rows, prediction on columns, indexed by rating_index().
using ConfusionMatrix = std::array<std::array<std::size_t, 6>, 6>;

ConfusionMatrix confusion_matrix(std::span<const Rating> gold, std::span<const Rating> pred);

/// Stance classes used by binary agreement: agree-side (SA, A),
/// disagree-side (D, SD), neutral, refusal.
int stance_class(Rating r);

/// Fraction of items whose gold and predicted stance classes match.
double binary_agreement(std::span<const Rating> gold, std::span<const Rating> pred);

/// Cohen's kappa over the six labels. When chance agreement is 1 (both raters
/// constant and equal) kappa is defined as 1.
double cohen_kappa(std::span<const Rating> gold, std::span<const Rating> pred);

double kappa_from_matrix(const ConfusionMatrix& m);
double binary_agreement_from_matrix(const ConfusionMatrix& m);
double exact_agreement_from_matrix(const ConfusionMatrix& m);

struct ReliabilityReport {
    std::size_t n_items = 0;
    double binary_agreement = 0.0;
    double cohen_kappa = 0.0;
    ConfusionMatrix confusion{};
    // Variants reported alongside the headline numbers.
    double exact_agreement = 0.0;
    std::optional<double> kappa_five_label;  // items where neither side is a refusal
    double kappa_stance_classes = 0.0;       // kappa over the four stance classes
};

ReliabilityReport reliability_from_matrix(const ConfusionMatrix& m);
ReliabilityReport reliability_report(std::span<const Rating> gold, std::span<const Rating> pred);

nlohmann::json to_json(const ReliabilityReport& r);

/// Gold set: CSV with header `essay_record_id,gold_rating`.
std::vector<std::pair<std::string, Rating>> load_gold_set(const std::filesystem::path& path);

/// Joins the gold set with assessments by essay record id. Throws
/// MissingAssessmentError listing every gold id without an assessment.
ReliabilityReport validate_assessor(const std::filesystem::path& gold_path,
                                    const std::vector<AssessorRecord>& assessments);

}  // namespace overton
