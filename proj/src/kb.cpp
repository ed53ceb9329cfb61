#include "uncertain_dx/kb.hpp"

#include "format.hpp"
#include "uncertain_dx/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace udx::kb {

std::optional<std::size_t> Feature::value_index(std::string_view value) const noexcept
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == value) {
            return i;
        }
    }
    return std::nullopt;
}

void ConditionalTable::set(std::string feature, std::string value, std::string disease, double probability)
{
    entries_[ConditionalKey{std::move(feature), std::move(value), std::move(disease)}] = probability;
}

std::optional<double> ConditionalTable::find(std::string_view feature,
                                             std::string_view value,
                                             std::string_view disease) const
{
    const auto it = entries_.find(
        ConditionalKey{std::string(feature), std::string(value), std::string(disease)});
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool ConditionalTable::contains(std::string_view feature,
                                std::string_view value,
                                std::string_view disease) const
{
    return find(feature, value, disease).has_value();
}

const Disease* KnowledgeBase::find_disease(std::string_view id) const noexcept
{
    const auto it = std::ranges::find(diseases, id, &Disease::id);
    return it == diseases.end() ? nullptr : &*it;
}

const Feature* KnowledgeBase::find_feature(std::string_view id) const noexcept
{
    const auto it = std::ranges::find(features, id, &Feature::id);
    return it == features.end() ? nullptr : &*it;
}

std::optional<std::size_t> KnowledgeBase::disease_index(std::string_view id) const noexcept
{
    const auto it = std::ranges::find(diseases, id, &Disease::id);
    if (it == diseases.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - diseases.begin());
}

std::vector<std::string> KnowledgeBase::disease_ids() const
{
    std::vector<std::string> ids;
    ids.reserve(diseases.size());
    for (const auto& d : diseases) {
        ids.push_back(d.id);
    }
    return ids;
}

std::string describe(std::span<const Violation> violations)
{
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) {
            out += "; ";
        }
        out += v.entity + ": " + v.rule;
    }
    return out;
}

namespace {

bool is_probability(double p)
{
    return std::isfinite(p) && p >= 0.0 && p <= 1.0;
}

// Violations for one conditional row: missing entries, or a bad sum.
void check_row(const Feature& feature,
               std::string_view disease,
               const ConditionalTable& table,
               std::string_view entity_feature,
               std::vector<Violation>& out)
{
    double sum = 0.0;
    bool complete = true;
    for (const auto& value : feature.values) {
        const auto p = table.find(entity_feature, value, disease);
        if (!p) {
            out.push_back({"feature " + std::string(entity_feature) + " value " + value + " disease " +
                               std::string(disease),
                           "missing conditional probability"});
            complete = false;
            continue;
        }
        if (!is_probability(*p)) {
            out.push_back({"feature " + std::string(entity_feature) + " value " + value + " disease " +
                               std::string(disease),
                           "conditional probability must be in [0, 1]"});
            complete = false;
            continue;
        }
        sum += *p;
    }
    if (complete && std::abs(sum - 1.0) > kProbabilityTolerance) {
        out.push_back({"feature " + std::string(entity_feature) + " disease " + std::string(disease),
                       "conditional probabilities must sum to 1 (got " + detail::general(sum) + ")"});
    }
}

}  // namespace

std::vector<Violation> validate_kb(const KnowledgeBase& kb)
{
    std::vector<Violation> out;

    if (kb.diseases.empty()) {
        out.push_back({"knowledge base", "at least one disease is required"});
    }

    std::set<std::string, std::less<>> disease_ids;
    double prior_sum = 0.0;
    for (const auto& d : kb.diseases) {
        if (d.id.empty()) {
            out.push_back({"disease", "id must be nonempty"});
        }
        else if (!disease_ids.insert(d.id).second) {
            out.push_back({"disease " + d.id, "duplicate id"});
        }
        if (!std::isfinite(d.prior) || d.prior <= 0.0 || d.prior > 1.0) {
            out.push_back({"disease " + d.id, "prior must be in (0, 1]"});
        }
        if (d.equivalence_class.empty()) {
            out.push_back({"disease " + d.id, "equivalence class must be nonempty"});
        }
        prior_sum += d.prior;
    }
    if (!kb.diseases.empty() && std::abs(prior_sum - 1.0) > kProbabilityTolerance) {
        out.push_back({"knowledge base", "priors must sum to 1 (got " + detail::general(prior_sum) + ")"});
    }

    std::set<std::string, std::less<>> feature_ids;
    for (const auto& f : kb.features) {
        if (f.id.empty()) {
            out.push_back({"feature", "id must be nonempty"});
        }
        else if (!feature_ids.insert(f.id).second) {
            out.push_back({"feature " + f.id, "duplicate id"});
        }
        if (f.values.size() < 2) {
            out.push_back({"feature " + f.id, "at least two values are required"});
        }
        std::set<std::string, std::less<>> value_ids;
        for (const auto& v : f.values) {
            if (!value_ids.insert(v).second) {
                out.push_back({"feature " + f.id + " value " + v, "duplicate value id"});
            }
        }
    }

    for (const auto& [key, p] : kb.conditionals.entries()) {
        const Feature* f = kb.find_feature(key.feature);
        if (f == nullptr || !f->value_index(key.value) || !disease_ids.contains(key.disease)) {
            out.push_back({"conditional (" + key.feature + ", " + key.value + ", " + key.disease + ")",
                           "references an unknown feature, value, or disease"});
        }
    }

    for (const auto& f : kb.features) {
        for (const auto& d : kb.diseases) {
            check_row(f, d.id, kb.conditionals, f.id, out);
        }
    }
    return out;
}

std::vector<Violation> validate_cases(std::span<const CaseRecord> cases, const KnowledgeBase& kb)
{
    std::vector<Violation> out;
    std::set<std::string, std::less<>> case_ids;

    auto check_gold = [&](const CaseRecord& c, const BeliefDistribution& gold, std::string_view label) {
        const std::string entity = "case " + c.id + " " + std::string(label);
        std::set<std::string, std::less<>> seen;
        double sum = 0.0;
        for (std::size_t i = 0; i < gold.diseases.size(); ++i) {
            if (kb.find_disease(gold.diseases[i]) == nullptr) {
                out.push_back({entity, "unknown disease " + gold.diseases[i]});
            }
            if (!seen.insert(gold.diseases[i]).second) {
                out.push_back({entity, "duplicate disease " + gold.diseases[i]});
            }
            if (!is_probability(gold.beliefs[i])) {
                out.push_back({entity, "probability for " + gold.diseases[i] + " must be in [0, 1]"});
            }
            sum += gold.beliefs[i];
        }
        if (std::abs(sum - 1.0) > kGoldTolerance) {
            out.push_back({entity, "probabilities must sum to 1 (got " + detail::general(sum) + ")"});
        }
    };

    for (const auto& c : cases) {
        if (c.id.empty()) {
            out.push_back({"case", "id must be nonempty"});
        }
        else if (!case_ids.insert(c.id).second) {
            out.push_back({"case " + c.id, "duplicate id"});
        }

        std::set<std::string, std::less<>> observed;
        for (const auto& obs : c.observations) {
            const Feature* f = kb.find_feature(obs.feature);
            if (f == nullptr) {
                out.push_back({"case " + c.id, "unknown feature " + obs.feature});
                continue;
            }
            if (!f->value_index(obs.value)) {
                out.push_back({"case " + c.id, "unknown value " + obs.value + " for feature " + obs.feature});
            }
            if (!observed.insert(obs.feature).second) {
                out.push_back({"case " + c.id, "feature " + obs.feature + " observed more than once"});
            }
        }

        if (c.true_diagnosis && kb.find_disease(*c.true_diagnosis) == nullptr) {
            out.push_back({"case " + c.id, "unknown true diagnosis " + *c.true_diagnosis});
        }
        if (c.gold_descriptive) {
            check_gold(c, *c.gold_descriptive, "gold_descriptive");
        }
        if (c.gold_informed) {
            check_gold(c, *c.gold_informed, "gold_informed");
        }
        if (c.expert_ratings) {
            for (const auto& [method, rating] : *c.expert_ratings) {
                if (!parse_method(method)) {
                    out.push_back({"case " + c.id, "rating for unknown method " + method});
                }
                if (!std::isfinite(rating) || rating < 0.0 || rating > 10.0) {
                    out.push_back({"case " + c.id, "rating for " + method + " must be in [0, 10]"});
                }
            }
        }
    }
    return out;
}

std::pair<Feature, ConditionalTable> cross_product_feature(const Feature& a,
                                                           const Feature& b,
                                                           const ConditionalTable& joint,
                                                           std::span<const std::string> diseases)
{
    if (a.id == b.id) {
        throw Error(ErrorCode::InvalidArgument, "cannot merge feature " + a.id + " with itself");
    }

    Feature merged;
    merged.id = a.id + "+" + b.id;
    merged.name = a.name + " and " + b.name;
    merged.values.reserve(a.values.size() * b.values.size());
    for (const auto& av : a.values) {
        for (const auto& bv : b.values) {
            merged.values.push_back(av + "+" + bv);
        }
    }

    ConditionalTable table;
    std::vector<Violation> violations;
    for (const auto& disease : diseases) {
        for (const auto& value : merged.values) {
            if (const auto p = joint.find(merged.id, value, disease)) {
                table.set(merged.id, value, disease, *p);
            }
        }
        check_row(merged, disease, joint, merged.id, violations);
    }
    if (!violations.empty()) {
        throw Error(ErrorCode::ValidationError, describe(violations));
    }
    return {std::move(merged), std::move(table)};
}

}  // namespace udx::kb
