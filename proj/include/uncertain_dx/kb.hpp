#pragma once

#include "uncertain_dx/belief.hpp"

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace udx::kb {

/// Probability sums (priors, conditional rows) must match one within this.
inline constexpr double kProbabilityTolerance = 1e-9;
/// Gold-standard distributions are hand-assessed; they get a looser check.
inline constexpr double kGoldTolerance = 1e-6;

struct Disease
{
    std::string id;
    std::string name;
    double prior = 0.0;
    std::string equivalence_class;
};

/// A feature with mutually exclusive and exhaustive values.
struct Feature
{
    std::string id;
    std::string name;
    std::vector<std::string> values;

    [[nodiscard]] std::optional<std::size_t> value_index(std::string_view value) const noexcept;
};

struct ConditionalKey
{
    std::string feature;
    std::string value;
    std::string disease;

    auto operator<=>(const ConditionalKey&) const = default;
};

/// p(feature = value | disease) for every (feature, value, disease) triple.
class ConditionalTable
{
public:
    using Entries = std::map<ConditionalKey, double>;

    void set(std::string feature, std::string value, std::string disease, double probability);
    [[nodiscard]] std::optional<double> find(std::string_view feature,
                                             std::string_view value,
                                             std::string_view disease) const;
    [[nodiscard]] bool contains(std::string_view feature,
                                std::string_view value,
                                std::string_view disease) const;

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] const Entries& entries() const noexcept { return entries_; }

private:
    Entries entries_;
};

struct KnowledgeBase
{
    std::vector<Disease> diseases;
    std::vector<Feature> features;
    ConditionalTable conditionals;

    [[nodiscard]] const Disease* find_disease(std::string_view id) const noexcept;
    [[nodiscard]] const Feature* find_feature(std::string_view id) const noexcept;
    [[nodiscard]] std::optional<std::size_t> disease_index(std::string_view id) const noexcept;
    [[nodiscard]] std::vector<std::string> disease_ids() const;
};

struct Observation
{
    std::string feature;
    std::string value;

    bool operator==(const Observation&) const = default;
};

struct CaseRecord
{
    std::string id;
    std::vector<Observation> observations;
    std::optional<std::string> true_diagnosis;
    std::optional<BeliefDistribution> gold_descriptive;
    std::optional<BeliefDistribution> gold_informed;
    /// Keyed by method name (simple_bayes, odds_likelihood, naive_dempster_shafer).
    std::optional<std::map<std::string, double>> expert_ratings;
};

/// One broken rule; `entity` names what is wrong, `rule` says which check failed.
struct Violation
{
    std::string entity;
    std::string rule;

    bool operator==(const Violation&) const = default;
};

[[nodiscard]] std::string describe(std::span<const Violation> violations);

[[nodiscard]] std::vector<Violation> validate_kb(const KnowledgeBase& kb);

/// Checks case data against a valid knowledge base: references, one observation
/// per feature, gold distributions summing to one, ratings on the 0-10 scale.
[[nodiscard]] std::vector<Violation> validate_cases(std::span<const CaseRecord> cases,
                                                    const KnowledgeBase& kb);

/// Parses a knowledge-base JSON document without checking its invariants.
[[nodiscard]] KnowledgeBase parse_kb(std::istream& source);
[[nodiscard]] KnowledgeBase parse_kb_file(const std::string& path);

/// Parses and validates a knowledge-base JSON document. Throws
/// Error(ParseError) with a line or field location, or Error(ValidationError).
[[nodiscard]] KnowledgeBase load_kb(std::istream& source);
[[nodiscard]] KnowledgeBase load_kb_file(const std::string& path);
[[nodiscard]] std::string serialize_kb(const KnowledgeBase& kb);

/// Parses a cases JSON array. References are not checked here; see validate_cases.
[[nodiscard]] std::vector<CaseRecord> load_cases(std::istream& source);
[[nodiscard]] std::vector<CaseRecord> load_cases_file(const std::string& path);
[[nodiscard]] std::string serialize_cases(std::span<const CaseRecord> cases);

/// Joins two dependent features into one whose values are the ordered pairs
/// "aValue+bValue". The joint rows p(aValue+bValue | d) are supplied by the
/// caller under feature id "aId+bId"; they are validated, never derived from
/// the marginals.
[[nodiscard]] std::pair<Feature, ConditionalTable>
cross_product_feature(const Feature& a,
                      const Feature& b,
                      const ConditionalTable& joint,
                      std::span<const std::string> diseases);

}  // namespace udx::kb
