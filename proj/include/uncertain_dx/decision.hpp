#pragma once

#include "uncertain_dx/belief.hpp"
#include "uncertain_dx/kb.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace udx::decision {

/// Implied death probabilities above this fall outside the small-risk range
/// where willingness to pay is linear in risk.
inline constexpr double kLinearityBound = 0.001;

/// Diagnostic disutilities in micromorts, assessed once per pair of
/// equivalence classes (diseases with the same treatment and prognosis).
/// Stored as nonnegative disutility: smaller is better.
class UtilityMatrix
{
public:
    UtilityMatrix() = default;

    /// `disutility` is row-major over classes x classes: entry (i, j) is having
    /// a disease of class i while being diagnosed with class j.
    UtilityMatrix(std::vector<std::string> classes,
                  std::vector<double> disutility,
                  std::map<std::string, std::string> expansion);

    [[nodiscard]] const std::vector<std::string>& classes() const noexcept { return classes_; }
    [[nodiscard]] const std::map<std::string, std::string>& expansion() const noexcept { return expansion_; }

    [[nodiscard]] std::optional<std::size_t> class_index(std::string_view cls) const noexcept;
    [[nodiscard]] double class_disutility(std::string_view true_class, std::string_view diagnosed_class) const;
    [[nodiscard]] double class_disutility(std::size_t true_class, std::size_t diagnosed_class) const;

    /// Class of `disease`; throws Error(UnmappedDisease).
    [[nodiscard]] const std::string& class_of(std::string_view disease) const;

private:
    std::vector<std::string> classes_;
    std::vector<double> disutility_;
    std::map<std::string, std::string> expansion_;
};

/// Checks structure (dense, nonnegative, known classes) and, when given a
/// knowledge base, that every disease is mapped consistently with its class.
[[nodiscard]] std::vector<kb::Violation> validate_utilities(const UtilityMatrix& utilities,
                                                            const kb::KnowledgeBase* kb = nullptr);

/// Parses the utilities JSON document; throws Error(ParseError / ValidationError).
[[nodiscard]] UtilityMatrix load_utilities(std::istream& source);
[[nodiscard]] UtilityMatrix load_utilities_file(const std::string& path);
[[nodiscard]] std::string serialize_utilities(const UtilityMatrix& utilities);

enum class Rule {
    max_belief,
    meu,
};

struct Diagnosis
{
    std::string disease;
    Rule rule = Rule::max_belief;

    bool operator==(const Diagnosis&) const = default;
};

struct MicromortQuote
{
    double amount = 0.0;
    /// Set when the implied death probability exceeds kLinearityBound.
    bool beyond_linear_range = false;
};

/// Disease-by-disease disutilities expanded from the class matrix.
struct ExpandedUtilities
{
    std::vector<std::string> diseases;
    std::vector<double> values;  // row-major, diseases x diseases

    [[nodiscard]] double at(std::size_t true_disease, std::size_t diagnosed) const
    {
        return values[true_disease * diseases.size() + diagnosed];
    }
};

/// Disease with the highest belief; exact ties go to the smallest id.
[[nodiscard]] Diagnosis max_belief_diagnosis(const BeliefDistribution& p);

/// Expected disutility of diagnosing `diagnosed` when diseases follow `p`.
[[nodiscard]] double expected_disutility(const BeliefDistribution& p,
                                         const UtilityMatrix& utilities,
                                         std::string_view diagnosed);

/// Diagnosis minimizing expected disutility over the knowledge base's
/// diseases; exact ties go to the smallest id.
[[nodiscard]] Diagnosis meu_diagnosis(const BeliefDistribution& p,
                                      const UtilityMatrix& utilities,
                                      const kb::KnowledgeBase& kb);

[[nodiscard]] ExpandedUtilities expand_utilities(const UtilityMatrix& utilities, const kb::KnowledgeBase& kb);

/// Converts a willingness-to-pay answer to micromorts at a linear small-risk
/// value of life.
[[nodiscard]] MicromortQuote wtp_to_micromorts(double dollars, double small_risk_value_of_life);

/// Adds the disutility of an extra consequence to a preexisting assessment.
[[nodiscard]] double offdiagonal_adjust(double base, const MicromortQuote& delta);

}  // namespace udx::decision
