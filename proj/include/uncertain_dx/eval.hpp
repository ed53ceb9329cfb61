#pragma once

#include "uncertain_dx/belief.hpp"
#include "uncertain_dx/decision.hpp"
#include "uncertain_dx/kb.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace udx::eval {

enum class GoldSource {
    descriptive,
    informed,
};

[[nodiscard]] std::string_view gold_source_name(GoldSource source) noexcept;
[[nodiscard]] std::optional<GoldSource> parse_gold_source(std::string_view name) noexcept;

/// A diagnostic procedure: an inference method plus a decision rule.
/// simple_bayes_meu applies the expected-utility rule to the simple Bayes
/// distribution; the others take the most believed disease.
enum class Procedure {
    simple_bayes_meu,
    simple_bayes,
    odds_likelihood,
    naive_dempster_shafer,
};

[[nodiscard]] std::string_view procedure_name(Procedure p) noexcept;
/// Row label used in decision-theoretic reports, e.g. "Simple Bayes-MEU".
[[nodiscard]] std::string_view procedure_label(Procedure p) noexcept;
[[nodiscard]] std::optional<Procedure> parse_procedure(std::string_view name) noexcept;
[[nodiscard]] Method inference_method(Procedure p) noexcept;
/// Report label for an inference method's distribution ("Simple Bayes", ...).
[[nodiscard]] std::string_view method_label(Method m) noexcept;

struct CaseWeight
{
    std::string case_id;
    double weight = 0.0;
};

struct RatingPair
{
    double r_method = 0.0;
    double r_gold = 0.0;
    double diff = 0.0;
};

struct MeanSd
{
    double mean = 0.0;
    double sd = 0.0;
};

/// sum_i p_gold(d_i) U(d_i, dx), in micromorts.
[[nodiscard]] double expected_disutility(const BeliefDistribution& p_gold,
                                         const decision::UtilityMatrix& utilities,
                                         const decision::Diagnosis& dx,
                                         const kb::KnowledgeBase& kb);

/// Relative likelihood of each case: the prior of its true diagnosis,
/// normalized over the evaluation set.
[[nodiscard]] std::vector<CaseWeight> case_weights(std::span<const kb::CaseRecord> cases,
                                                   const kb::KnowledgeBase& kb);

/// Weighted mean and weighted population standard deviation.
[[nodiscard]] MeanSd weighted_mean_sd(std::span<const double> values, std::span<const CaseWeight> weights);
[[nodiscard]] MeanSd weighted_mean_sd(std::span<const double> values, std::span<const double> weights);

/// One-sided Monte Carlo sign-flip test on paired differences. The statistic
/// is the weighted mean difference; each iteration flips every sign with
/// probability one half. Returns (1 + #{flipped >= observed}) / (1 + iterations).
/// Inputs are sorted before sampling, so the result depends only on the
/// multiset of (diff, weight) pairs and the seed.
[[nodiscard]] double permutation_test(std::span<const double> diffs,
                                      std::span<const CaseWeight> weights,
                                      std::size_t iterations,
                                      std::uint64_t seed);
[[nodiscard]] double permutation_test(std::span<const double> diffs,
                                      std::span<const double> weights,
                                      std::size_t iterations,
                                      std::uint64_t seed);

inline constexpr std::size_t kMinPermutationIterations = 1000;

/// Wilcoxon two-sample rank-sum test, midranks for ties, normal approximation
/// with tie correction. One-sided: small values mean `a` tends to exceed `b`.
[[nodiscard]] double wilcoxon_rank_test(std::span<const double> a, std::span<const double> b);

struct RatingSummary
{
    Method method = Method::simple_bayes;
    double mean = 0.0;
    double sd = 0.0;
};

/// Weighted mean and sd of the 0-10 expert ratings per method. Throws
/// Error(MissingRatings) naming the first case and method without a rating.
[[nodiscard]] std::vector<RatingSummary> expert_rating_summary(std::span<const kb::CaseRecord> cases,
                                                               std::span<const CaseWeight> weights,
                                                               std::span<const Method> methods);

struct DecisionRow
{
    std::string label;
    double absolute_mean = 0.0;
    std::optional<double> diff_mean;
    std::optional<double> diff_sd;
    std::size_t agreement = 0;
    std::size_t cases = 0;
};

struct SignificanceRow
{
    std::string comparison;
    std::string test;
    double asl = 1.0;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> iterations;
};

struct Exclusion
{
    std::string case_id;
    std::string reason;
};

struct ProcedureOutcome
{
    Procedure procedure = Procedure::simple_bayes;
    decision::Diagnosis diagnosis;
    RatingPair rating;
};

struct CaseOutcome
{
    std::string case_id;
    double weight = 0.0;
    decision::Diagnosis gold_diagnosis;
    double r_gold = 0.0;
    std::vector<ProcedureOutcome> procedures;
    /// Present when both gold standards exist: the other standard's diagnosis
    /// rated under the selected one.
    std::optional<ProcedureOutcome> other_gold;
};

struct EvaluationOptions
{
    std::vector<Procedure> procedures{Procedure::simple_bayes_meu, Procedure::simple_bayes,
                                      Procedure::odds_likelihood, Procedure::naive_dempster_shafer};
    GoldSource gold = GoldSource::informed;
    std::uint64_t seed = 0;
    std::size_t iterations = 10000;
};

struct EvaluationReport
{
    GoldSource gold = GoldSource::informed;
    std::vector<DecisionRow> decision_theoretic;
    std::vector<DecisionRow> gold_standards;
    std::vector<RatingSummary> expert_ratings;
    std::vector<SignificanceRow> significance;
    std::vector<Exclusion> exclusions;
    std::vector<CaseOutcome> cases;
};

/// Runs every procedure on every case, rates its diagnosis against the
/// expected-utility diagnosis under the selected gold standard, and
/// aggregates with case weights. Cases on which inference fails are excluded
/// and listed; missing case fields raise errors.
[[nodiscard]] EvaluationReport evaluate_methods(const kb::KnowledgeBase& kb,
                                                std::span<const kb::CaseRecord> cases,
                                                const decision::UtilityMatrix& utilities,
                                                const EvaluationOptions& options);

[[nodiscard]] std::string report_tsv(const EvaluationReport& report);
[[nodiscard]] std::string report_json(const EvaluationReport& report);

}  // namespace udx::eval
