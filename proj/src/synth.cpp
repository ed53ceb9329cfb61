#include "uncertain_dx/synth.hpp"

#include "format.hpp"
#include "uncertain_dx/engine.hpp"
#include "uncertain_dx/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace udx::synth {

std::vector<double> uniform_priors(std::size_t m)
{
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

void check_spec(const ReplicatedEvidenceSpec& spec)
{
    if (spec.likelihoods.empty()) {
        throw Error(ErrorCode::InvalidArgument, "at least one hypothesis is required");
    }
    if (spec.priors.size() != spec.likelihoods.size()) {
        throw Error(ErrorCode::InvalidArgument, "priors and likelihoods differ in length");
    }
    for (double l : spec.likelihoods) {
        if (!std::isfinite(l) || l < 0.0 || l > 1.0) {
            throw Error(ErrorCode::InvalidArgument, "likelihoods must be in [0, 1]");
        }
    }
    for (double p : spec.priors) {
        if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
            throw Error(ErrorCode::InvalidArgument, "priors must be in (0, 1]");
        }
    }
    const double total = std::accumulate(spec.priors.begin(), spec.priors.end(), 0.0);
    if (std::abs(total - 1.0) > kb::kProbabilityTolerance) {
        throw Error(ErrorCode::InvalidArgument, "priors must sum to 1");
    }
    if (spec.n < 1) {
        throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
    }
}

std::pair<kb::KnowledgeBase, std::vector<kb::Observation>>
replicate_evidence_kb(const ReplicatedEvidenceSpec& spec)
{
    check_spec(spec);
    kb::KnowledgeBase kb;
    for (std::size_t i = 0; i < spec.likelihoods.size(); ++i) {
        const std::string id = "H" + std::to_string(i + 1);
        kb.diseases.push_back({id, id, spec.priors[i], id});
    }
    std::vector<kb::Observation> evidence;
    for (std::size_t k = 0; k < spec.n; ++k) {
        const std::string id = "E" + std::to_string(k + 1);
        kb.features.push_back({id, id, {"present", "absent"}});
        for (std::size_t i = 0; i < spec.likelihoods.size(); ++i) {
            kb.conditionals.set(id, "present", kb.diseases[i].id, spec.likelihoods[i]);
            kb.conditionals.set(id, "absent", kb.diseases[i].id, 1.0 - spec.likelihoods[i]);
        }
        evidence.push_back({id, "present"});
    }
    return {std::move(kb), std::move(evidence)};
}

BeliefDistribution brute_force_posterior(const kb::KnowledgeBase& kb, std::span<const kb::Observation> evidence)
{
    if (kb.diseases.size() > kOracleMaxDiseases) {
        throw Error(ErrorCode::InvalidArgument, "oracle is limited to " + std::to_string(kOracleMaxDiseases) +
                                                    " diseases");
    }

    std::vector<long double> joint;
    joint.reserve(kb.diseases.size());
    for (const auto& d : kb.diseases) {
        long double w = d.prior;
        for (const auto& obs : evidence) {
            const auto p = kb.conditionals.find(obs.feature, obs.value, d.id);
            if (!p) {
                throw Error(ErrorCode::UnknownObservation,
                            "no conditional for " + obs.feature + "=" + obs.value + " under " + d.id);
            }
            w *= static_cast<long double>(*p);
        }
        joint.push_back(w);
    }

    // Neumaier compensated sum.
    long double sum = 0.0L;
    long double carry = 0.0L;
    for (long double w : joint) {
        const long double t = sum + w;
        if (std::fabs(sum) >= std::fabs(w)) {
            carry += (sum - t) + w;
        }
        else {
            carry += (w - t) + sum;
        }
        sum = t;
    }
    sum += carry;
    if (!(sum > 0.0L)) {
        throw Error(ErrorCode::AllHypothesesRuledOut, "every disease has zero joint probability");
    }

    BeliefDistribution out;
    out.method = Method::simple_bayes;
    out.pre_norm_sum = 1.0;
    for (std::size_t j = 0; j < joint.size(); ++j) {
        out.diseases.push_back(kb.diseases[j].id);
        out.beliefs.push_back(static_cast<double>(joint[j] / sum));
    }
    return out;
}

std::vector<ProbeStep> convergence_probe(const ReplicatedEvidenceSpec& base, std::size_t n_max)
{
    if (n_max < 1) {
        throw Error(ErrorCode::InvalidArgument, "n_max must be at least 1");
    }
    ReplicatedEvidenceSpec spec = base;
    spec.n = n_max;
    const auto [kb, all_evidence] = replicate_evidence_kb(spec);

    std::vector<ProbeStep> steps;
    steps.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const std::span<const kb::Observation> evidence(all_evidence.data(), n);
        steps.push_back({n, engine::simple_bayes(kb, evidence), engine::odds_likelihood(kb, evidence),
                         engine::naive_dempster_shafer(kb, evidence)});
    }
    return steps;
}

std::string probe_tsv(std::span<const ProbeStep> steps)
{
    std::string out = "n\tmethod\tdisease\tbelief\n";
    for (const auto& step : steps) {
        for (const auto* dist : {&step.simple_bayes, &step.odds_likelihood, &step.naive_dempster_shafer}) {
            for (std::size_t j = 0; j < dist->size(); ++j) {
                out += std::to_string(step.n) + "\t" + std::string(method_name(dist->method)) + "\t" +
                       dist->diseases[j] + "\t" + detail::fixed(dist->beliefs[j], 6) + "\n";
            }
        }
    }
    return out;
}

namespace {

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t k, double alpha)
{
    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> out(k);
    double total = 0.0;
    do {
        total = 0.0;
        for (auto& x : out) {
            x = gamma(rng);
            total += x;
        }
    } while (!(total > 0.0));
    for (auto& x : out) {
        x /= total;
    }
    return out;
}

}  // namespace

kb::KnowledgeBase random_kb(std::mt19937_64& rng, const RandomKbShape& shape)
{
    kb::KnowledgeBase kb;
    const std::size_t m = uniform_size(rng, shape.min_diseases, shape.max_diseases);
    const std::size_t f = uniform_size(rng, shape.min_features, shape.max_features);

    std::vector<double> prior;
    // Priors must be strictly positive; redraw the rare underflowed component.
    do {
        prior = dirichlet(rng, m, shape.dirichlet_alpha);
    } while (std::ranges::any_of(prior, [](double p) { return !(p > 0.0); }));

    for (std::size_t i = 0; i < m; ++i) {
        const std::string id = "d" + std::to_string(i);
        kb.diseases.push_back({id, id, prior[i], "c" + std::to_string(i)});
    }
    for (std::size_t k = 0; k < f; ++k) {
        kb::Feature feature;
        feature.id = "f" + std::to_string(k);
        feature.name = feature.id;
        const std::size_t nv = uniform_size(rng, shape.min_values, shape.max_values);
        for (std::size_t v = 0; v < nv; ++v) {
            feature.values.push_back("v" + std::to_string(v));
        }
        for (const auto& d : kb.diseases) {
            const auto row = dirichlet(rng, nv, shape.dirichlet_alpha);
            for (std::size_t v = 0; v < nv; ++v) {
                kb.conditionals.set(feature.id, feature.values[v], d.id, row[v]);
            }
        }
        kb.features.push_back(std::move(feature));
    }
    return kb;
}

std::vector<kb::Observation> random_evidence(const kb::KnowledgeBase& kb, std::mt19937_64& rng, std::size_t count)
{
    if (count > kb.features.size()) {
        throw Error(ErrorCode::InvalidArgument, "more observations requested than features");
    }
    std::vector<std::size_t> order(kb.features.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<kb::Observation> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& feature = kb.features[order[i]];
        const std::size_t v = uniform_size(rng, 0, feature.values.size() - 1);
        out.push_back({feature.id, feature.values[v]});
    }
    return out;
}

}  // namespace udx::synth
