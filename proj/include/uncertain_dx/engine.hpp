#pragma once

#include "uncertain_dx/belief.hpp"
#include "uncertain_dx/kb.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace udx::engine {

using kb::KnowledgeBase;
using kb::Observation;

/// Singleton masses m({d_j}) for one observation; the remainder 1 - m sits on
/// the frame {d_j, not d_j}. Ordered like the knowledge base's diseases.
struct MassAssignment
{
    std::vector<std::string> diseases;
    std::vector<double> singleton_mass;

    [[nodiscard]] double mass(std::string_view disease) const noexcept;
};

/// p(obs | d_j) for every disease, in knowledge-base order.
/// Throws Error(UnknownObservation) for an unknown feature or value.
[[nodiscard]] std::vector<double> likelihoods(const KnowledgeBase& kb, const Observation& obs);

/// Rejects unknown features/values (UnknownObservation) and repeated
/// features (DuplicateObservation).
void check_observations(const KnowledgeBase& kb, std::span<const Observation> evidence);

/// p(d_j | evidence) under conditional independence given each disease.
/// Empty evidence returns the priors.
[[nodiscard]] BeliefDistribution simple_bayes(const KnowledgeBase& kb,
                                              std::span<const Observation> evidence);

/// p(obs) = sum_j p(obs | d_j) p(d_j).
[[nodiscard]] double marginal(const KnowledgeBase& kb, const Observation& obs);

/// p(obs | not d) = (p(obs) - p(obs | d) p(d)) / (1 - p(d)).
[[nodiscard]] double negation_conditional(const KnowledgeBase& kb,
                                          const Observation& obs,
                                          std::string_view disease);

/// Per-disease probabilities O/(1+O) from the posterior odds, before
/// renormalization. These do not sum to one once a disease is updated by
/// more than one observation.
[[nodiscard]] std::vector<double> odds_likelihood_scores(const KnowledgeBase& kb,
                                                         std::span<const Observation> evidence);

/// Odds-likelihood updating assuming independence given each disease and
/// given its negation, renormalized.
[[nodiscard]] BeliefDistribution odds_likelihood(const KnowledgeBase& kb,
                                                 std::span<const Observation> evidence);

/// ES(d_j, obs) = p(d_j | obs), the single-observation posterior.
[[nodiscard]] MassAssignment evoking_strength(const KnowledgeBase& kb, const Observation& obs);

/// Bel(d_j) = 1 - prod_k (1 - ES(d_j, obs_k)), before renormalization.
[[nodiscard]] std::vector<double> dempster_shafer_scores(const KnowledgeBase& kb,
                                                         std::span<const Observation> evidence);

/// Combines evoking strengths as simple support functions per disease frame,
/// then renormalizes. Rejects empty evidence.
[[nodiscard]] BeliefDistribution naive_dempster_shafer(const KnowledgeBase& kb,
                                                       std::span<const Observation> evidence);

/// Certainty-factor parallel combination for confirming evidence: x + y(1 - x).
[[nodiscard]] double cf_parallel_combine(double x, double y) noexcept;

/// Dispatches on `method`; Method::external is rejected.
[[nodiscard]] BeliefDistribution infer(Method method,
                                       const KnowledgeBase& kb,
                                       std::span<const Observation> evidence);

}  // namespace udx::engine
