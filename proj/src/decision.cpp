#include "uncertain_dx/decision.hpp"

#include "format.hpp"
#include "json_util.hpp"
#include "uncertain_dx/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace udx::decision {

namespace {

constexpr double kMicromort = 1e-6;

std::size_t square(std::size_t n)
{
    return n * n;
}

}  // namespace

UtilityMatrix::UtilityMatrix(std::vector<std::string> classes,
                             std::vector<double> disutility,
                             std::map<std::string, std::string> expansion)
    : classes_(std::move(classes))
    , disutility_(std::move(disutility))
    , expansion_(std::move(expansion))
{
    if (disutility_.size() != square(classes_.size())) {
        throw Error(ErrorCode::InvalidArgument,
                    "utility matrix needs " + std::to_string(square(classes_.size())) + " entries, got " +
                        std::to_string(disutility_.size()));
    }
}

std::optional<std::size_t> UtilityMatrix::class_index(std::string_view cls) const noexcept
{
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i] == cls) {
            return i;
        }
    }
    return std::nullopt;
}

double UtilityMatrix::class_disutility(std::size_t true_class, std::size_t diagnosed_class) const
{
    return disutility_.at(true_class * classes_.size() + diagnosed_class);
}

double UtilityMatrix::class_disutility(std::string_view true_class, std::string_view diagnosed_class) const
{
    const auto i = class_index(true_class);
    const auto j = class_index(diagnosed_class);
    if (!i || !j) {
        throw Error(ErrorCode::InvalidArgument,
                    "unknown class " + std::string(!i ? true_class : diagnosed_class));
    }
    return class_disutility(*i, *j);
}

const std::string& UtilityMatrix::class_of(std::string_view disease) const
{
    const auto it = expansion_.find(std::string(disease));
    if (it == expansion_.end()) {
        throw Error(ErrorCode::UnmappedDisease, "disease " + std::string(disease) + " has no utility class");
    }
    return it->second;
}

std::vector<kb::Violation> validate_utilities(const UtilityMatrix& utilities, const kb::KnowledgeBase* kb)
{
    std::vector<kb::Violation> out;
    const auto& classes = utilities.classes();
    if (classes.empty()) {
        out.push_back({"utilities", "at least one class is required"});
    }
    std::set<std::string, std::less<>> seen;
    for (const auto& c : classes) {
        if (!seen.insert(c).second) {
            out.push_back({"class " + c, "duplicate id"});
        }
    }
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t j = 0; j < classes.size(); ++j) {
            const double u = utilities.class_disutility(i, j);
            if (std::isnan(u)) {
                out.push_back({"disutility (" + classes[i] + ", " + classes[j] + ")", "missing entry"});
            }
            else if (!std::isfinite(u) || u < 0.0) {
                out.push_back({"disutility (" + classes[i] + ", " + classes[j] + ")",
                               "micromorts must be finite and nonnegative"});
            }
        }
    }
    for (const auto& [disease, cls] : utilities.expansion()) {
        if (!utilities.class_index(cls)) {
            out.push_back({"expansion " + disease, "unknown class " + cls});
        }
    }
    if (kb != nullptr) {
        for (const auto& d : kb->diseases) {
            const auto it = utilities.expansion().find(d.id);
            if (it == utilities.expansion().end()) {
                out.push_back({"disease " + d.id, "not mapped to a utility class"});
            }
            else if (it->second != d.equivalence_class) {
                out.push_back({"disease " + d.id, "utility class " + it->second +
                                                      " disagrees with knowledge-base class " +
                                                      d.equivalence_class});
            }
        }
        for (const auto& [disease, cls] : utilities.expansion()) {
            if (kb->find_disease(disease) == nullptr) {
                out.push_back({"expansion " + disease, "unknown disease"});
            }
        }
    }
    return out;
}

UtilityMatrix load_utilities(std::istream& source)
{
    using detail::as_array;
    using detail::as_number;
    using detail::as_object;
    using detail::as_string;
    using detail::require;

    const auto doc = detail::parse_document(source, "utilities");

    std::vector<std::string> classes;
    const auto& class_list = as_array(require(doc, "classes", ""), "/classes");
    for (std::size_t i = 0; i < class_list.size(); ++i) {
        classes.push_back(as_string(class_list[i], "/classes/" + std::to_string(i)));
    }

    std::map<std::string, std::string> expansion;
    for (const auto& [disease, cls] : as_object(require(doc, "expansion", ""), "/expansion").items()) {
        expansion[disease] = as_string(cls, "/expansion/" + disease);
    }

    const std::size_t n = classes.size();
    std::vector<double> matrix(square(n), std::numeric_limits<double>::quiet_NaN());
    auto index_of = [&](const std::string& cls, const std::string& path) {
        for (std::size_t i = 0; i < n; ++i) {
            if (classes[i] == cls) {
                return i;
            }
        }
        detail::field_error(path, "unknown class " + cls);
    };

    const auto& entries = as_array(require(doc, "disutility", ""), "/disutility");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const std::string path = "/disutility/" + std::to_string(k);
        const auto i = index_of(as_string(require(entries[k], "true", path), path + "/true"), path + "/true");
        const auto j = index_of(as_string(require(entries[k], "diagnosed", path), path + "/diagnosed"),
                                path + "/diagnosed");
        if (!std::isnan(matrix[i * n + j])) {
            detail::field_error(path, "duplicate entry for (" + classes[i] + ", " + classes[j] + ")");
        }
        matrix[i * n + j] = as_number(require(entries[k], "micromorts", path), path + "/micromorts");
    }

    UtilityMatrix utilities(std::move(classes), std::move(matrix), std::move(expansion));
    const auto violations = validate_utilities(utilities);
    if (!violations.empty()) {
        throw Error(ErrorCode::ValidationError, kb::describe(violations));
    }
    return utilities;
}

UtilityMatrix load_utilities_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open " + path);
    }
    return load_utilities(in);
}

std::string serialize_utilities(const UtilityMatrix& utilities)
{
    detail::Json doc;
    doc["classes"] = utilities.classes();
    doc["expansion"] = detail::Json::object();
    for (const auto& [disease, cls] : utilities.expansion()) {
        doc["expansion"][disease] = cls;
    }
    doc["disutility"] = detail::Json::array();
    const auto& classes = utilities.classes();
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t j = 0; j < classes.size(); ++j) {
            doc["disutility"].push_back({{"true", classes[i]},
                                         {"diagnosed", classes[j]},
                                         {"micromorts", utilities.class_disutility(i, j)}});
        }
    }
    return doc.dump(2) + "\n";
}

Diagnosis max_belief_diagnosis(const BeliefDistribution& p)
{
    if (p.empty()) {
        throw Error(ErrorCode::InvalidArgument, "cannot diagnose from an empty distribution");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p.beliefs[i] > p.beliefs[best] ||
            (p.beliefs[i] == p.beliefs[best] && p.diseases[i] < p.diseases[best])) {
            best = i;
        }
    }
    return {p.diseases[best], Rule::max_belief};
}

double expected_disutility(const BeliefDistribution& p, const UtilityMatrix& utilities, std::string_view diagnosed)
{
    const auto dx_class = utilities.class_index(utilities.class_of(diagnosed));
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto true_class = utilities.class_index(utilities.class_of(p.diseases[i]));
        total += p.beliefs[i] * utilities.class_disutility(*true_class, *dx_class);
    }
    return total;
}

Diagnosis meu_diagnosis(const BeliefDistribution& p, const UtilityMatrix& utilities, const kb::KnowledgeBase& kb)
{
    if (kb.diseases.empty()) {
        throw Error(ErrorCode::InvalidArgument, "knowledge base has no diseases");
    }
    if (std::abs(p.total() - 1.0) > kb::kGoldTolerance) {
        throw Error(ErrorCode::InvalidArgument,
                    "expected-utility diagnosis needs a probability distribution (sum " +
                        detail::general(p.total()) + ")");
    }
    const std::string* best = nullptr;
    double best_value = 0.0;
    for (const auto& d : kb.diseases) {
        const double value = expected_disutility(p, utilities, d.id);
        if (best == nullptr || value < best_value || (value == best_value && d.id < *best)) {
            best = &d.id;
            best_value = value;
        }
    }
    return {*best, Rule::meu};
}

ExpandedUtilities expand_utilities(const UtilityMatrix& utilities, const kb::KnowledgeBase& kb)
{
    ExpandedUtilities out;
    out.diseases = kb.disease_ids();
    std::vector<std::size_t> cls;
    cls.reserve(out.diseases.size());
    for (const auto& d : out.diseases) {
        cls.push_back(*utilities.class_index(utilities.class_of(d)));
    }
    out.values.reserve(square(cls.size()));
    for (std::size_t i : cls) {
        for (std::size_t j : cls) {
            out.values.push_back(utilities.class_disutility(i, j));
        }
    }
    return out;
}

MicromortQuote wtp_to_micromorts(double dollars, double small_risk_value_of_life)
{
    if (!(small_risk_value_of_life > 0.0) || !std::isfinite(small_risk_value_of_life)) {
        throw Error(ErrorCode::NonpositiveValueOfLife, "small-risk value of life must be positive");
    }
    if (!(dollars >= 0.0) || !std::isfinite(dollars)) {
        throw Error(ErrorCode::InvalidArgument, "willingness to pay must be nonnegative");
    }
    const double dollars_per_micromort = small_risk_value_of_life * kMicromort;
    MicromortQuote quote;
    quote.amount = dollars / dollars_per_micromort;
    quote.beyond_linear_range = quote.amount * kMicromort > kLinearityBound;
    return quote;
}

double offdiagonal_adjust(double base, const MicromortQuote& delta)
{
    if (!(base >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "base disutility must be nonnegative");
    }
    return base + delta.amount;
}

}  // namespace udx::decision
