#pragma once

#include "uncertain_dx/belief.hpp"
#include "uncertain_dx/kb.hpp"

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace udx::synth {

/// n independent pieces of evidence that share one likelihood per hypothesis.
struct ReplicatedEvidenceSpec
{
    std::vector<double> likelihoods;  // p(E | H_i)
    std::vector<double> priors;       // p(H_i)
    std::size_t n = 1;
};

[[nodiscard]] std::vector<double> uniform_priors(std::size_t m);

/// Throws Error(InvalidArgument) describing the first problem.
void check_spec(const ReplicatedEvidenceSpec& spec);

/// Diseases H1..Hm and binary features E1..En (values "present"/"absent")
/// with p(present | H_i) = likelihoods[i]; the evidence is every feature present.
[[nodiscard]] std::pair<kb::KnowledgeBase, std::vector<kb::Observation>>
replicate_evidence_kb(const ReplicatedEvidenceSpec& spec);

inline constexpr std::size_t kOracleMaxDiseases = 64;

/// Reference posterior: p(d) * prod p(obs | d) in long double, normalized with
/// compensated summation. Shares no code with the inference engine.
[[nodiscard]] BeliefDistribution brute_force_posterior(const kb::KnowledgeBase& kb,
                                                       std::span<const kb::Observation> evidence);

struct ProbeStep
{
    std::size_t n = 0;
    BeliefDistribution simple_bayes;
    BeliefDistribution odds_likelihood;
    BeliefDistribution naive_dempster_shafer;
};

/// Runs all three methods on the replicated-evidence knowledge base for
/// n = 1..n_max (the spec's own n is ignored).
[[nodiscard]] std::vector<ProbeStep> convergence_probe(const ReplicatedEvidenceSpec& base, std::size_t n_max);

/// Columns: n, method, disease, belief (six decimals).
[[nodiscard]] std::string probe_tsv(std::span<const ProbeStep> steps);

struct RandomKbShape
{
    std::size_t min_diseases = 2;
    std::size_t max_diseases = 6;
    std::size_t min_features = 1;
    std::size_t max_features = 5;
    std::size_t min_values = 2;
    std::size_t max_values = 4;
    double dirichlet_alpha = 1.0;
};

/// Random valid knowledge base with Dirichlet-distributed priors and rows.
[[nodiscard]] kb::KnowledgeBase random_kb(std::mt19937_64& rng, const RandomKbShape& shape = {});

/// `count` observations on distinct random features (count <= feature count).
[[nodiscard]] std::vector<kb::Observation> random_evidence(const kb::KnowledgeBase& kb,
                                                           std::mt19937_64& rng,
                                                           std::size_t count);

}  // namespace udx::synth
