#include "overton/reliability.hpp"

#include <fstream>
#include <map>

#include "overton/errors.hpp"
#include "overton/instrument.hpp"

namespace overton {

using nlohmann::json;

MissingAssessmentError::MissingAssessmentError(std::vector<std::string> ids)
    : Error([&] {
          std::string msg = "no assessment for gold id(s):";
          for (const auto& id : ids) msg += " " + id;
          return msg;
      }()),
      ids_(std::move(ids)) {}

namespace {

void check_inputs(std::span<const Rating> gold, std::span<const Rating> pred) {
    if (gold.size() != pred.size())
        throw std::invalid_argument("rating sequences differ in length (" +
                                    std::to_string(gold.size()) + " vs " +
                                    std::to_string(pred.size()) + ")");
    if (gold.empty()) throw std::invalid_argument("rating sequences are empty");
}

template <std::size_t K>
double kappa_square(const std::array<std::array<double, K>, K>& m) {
    double n = 0, diag = 0;
    std::array<double, K> rows{}, cols{};
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) {
            n += m[i][j];
            rows[i] += m[i][j];
            cols[j] += m[i][j];
            if (i == j) diag += m[i][j];
        }
    if (n == 0) throw std::invalid_argument("kappa over zero items");
    const double po = diag / n;
    double pe = 0;
    for (std::size_t k = 0; k < K; ++k) pe += (rows[k] / n) * (cols[k] / n);
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const Rating> gold, std::span<const Rating> pred) {
    check_inputs(gold, pred);
    ConfusionMatrix m{};
    for (std::size_t i = 0; i < gold.size(); ++i) ++m[rating_index(gold[i])][rating_index(pred[i])];
    return m;
}

int stance_class(Rating r) {
    switch (r) {
        case Rating::StronglyAgree:
        case Rating::Agree: return 0;
        case Rating::Disagree:
        case Rating::StronglyDisagree: return 1;
        case Rating::Neutral: return 2;
        case Rating::Refusal: return 3;
    }
    return 3;
}

double kappa_from_matrix(const ConfusionMatrix& m) {
    std::array<std::array<double, 6>, 6> d{};
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) d[i][j] = static_cast<double>(m[i][j]);
    return kappa_square(d);
}

double binary_agreement_from_matrix(const ConfusionMatrix& m) {
    double n = 0, agree = 0;
    for (auto g : kAllRatings)
        for (auto p : kAllRatings) {
            auto c = static_cast<double>(m[rating_index(g)][rating_index(p)]);
            n += c;
            if (stance_class(g) == stance_class(p)) agree += c;
        }
    if (n == 0) throw std::invalid_argument("agreement over zero items");
    return agree / n;
}

double exact_agreement_from_matrix(const ConfusionMatrix& m) {
    double n = 0, diag = 0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            n += static_cast<double>(m[i][j]);
            if (i == j) diag += static_cast<double>(m[i][j]);
        }
    if (n == 0) throw std::invalid_argument("agreement over zero items");
    return diag / n;
}

double binary_agreement(std::span<const Rating> gold, std::span<const Rating> pred) {
    return binary_agreement_from_matrix(confusion_matrix(gold, pred));
}

double cohen_kappa(std::span<const Rating> gold, std::span<const Rating> pred) {
    return kappa_from_matrix(confusion_matrix(gold, pred));
}

ReliabilityReport reliability_from_matrix(const ConfusionMatrix& m) {
    ReliabilityReport r;
    r.confusion = m;
    for (const auto& row : m)
        for (auto c : row) r.n_items += c;
    r.binary_agreement = binary_agreement_from_matrix(m);
    r.cohen_kappa = kappa_from_matrix(m);
    r.exact_agreement = exact_agreement_from_matrix(m);

    std::array<std::array<double, 5>, 5> five{};
    double five_n = 0;
    std::array<std::array<double, 4>, 4> classes{};
    for (auto g : kAllRatings)
        for (auto p : kAllRatings) {
            auto c = static_cast<double>(m[rating_index(g)][rating_index(p)]);
            classes[stance_class(g)][stance_class(p)] += c;
            if (g != Rating::Refusal && p != Rating::Refusal) {
                five[rating_index(g)][rating_index(p)] += c;
                five_n += c;
            }
        }
    if (five_n > 0) r.kappa_five_label = kappa_square(five);
    r.kappa_stance_classes = kappa_square(classes);
    return r;
}

ReliabilityReport reliability_report(std::span<const Rating> gold, std::span<const Rating> pred) {
    return reliability_from_matrix(confusion_matrix(gold, pred));
}

json to_json(const ReliabilityReport& r) {
    json labels = json::array();
    for (auto rt : kAllRatings) labels.push_back(std::string(label(rt)));
    json matrix = json::array();
    for (const auto& row : r.confusion) matrix.push_back(json(std::vector<std::size_t>(row.begin(), row.end())));
    return {{"n_items", r.n_items},
            {"binary_agreement", r.binary_agreement},
            {"cohen_kappa", r.cohen_kappa},
            {"exact_agreement", r.exact_agreement},
            {"kappa_five_label", r.kappa_five_label ? json(*r.kappa_five_label) : json(nullptr)},
            {"kappa_stance_classes", r.kappa_stance_classes},
            {"labels", labels},
            {"confusion_matrix", matrix},
            {"confusion_layout", "row-major, gold on rows, prediction on columns"}};
}

std::vector<std::pair<std::string, Rating>> load_gold_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open gold file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("gold file " + path.string() + " is empty");
    if (trim(line) != "essay_record_id,gold_rating")
        throw ConfigError("gold file header must be 'essay_record_id,gold_rating'");
    std::vector<std::pair<std::string, Rating>> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("gold file line " + std::to_string(line_no) + ": expected two columns");
        auto id = trim(std::string_view(line).substr(0, comma));
        auto lbl = trim(std::string_view(line).substr(comma + 1));
        auto rating = rating_from_label(lbl);
        if (!rating)
            throw ConfigError("gold file line " + std::to_string(line_no) + ": unknown rating '" +
                              lbl + "'");
        out.emplace_back(id, *rating);
    }
    if (out.empty()) throw ConfigError("gold file " + path.string() + " has no rows");
    return out;
}

ReliabilityReport validate_assessor(const std::filesystem::path& gold_path,
                                    const std::vector<AssessorRecord>& assessments) {
    auto gold = load_gold_set(gold_path);
    std::map<std::string, Rating> predicted;
    for (const auto& a : assessments) predicted.emplace(a.essay_record_id, a.rating);

    std::vector<Rating> g, p;
    std::vector<std::string> missing;
    for (const auto& [id, rating] : gold) {
        auto it = predicted.find(id);
        if (it == predicted.end()) {
            missing.push_back(id);
            continue;
        }
        g.push_back(rating);
        p.push_back(it->second);
    }
    if (!missing.empty()) throw MissingAssessmentError(std::move(missing));
    return reliability_report(g, p);
}

}  // namespace overton
