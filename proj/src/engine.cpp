#include "uncertain_dx/engine.hpp"

#include "uncertain_dx/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace udx::engine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// A prior this close to one leaves no mass for the negation.
constexpr double kDegeneratePrior = 1e-12;
// Rounding can push p(obs) - p(obs|d)p(d) slightly below zero; anything
// further below means the inputs are inconsistent.
constexpr double kNegativeSlack = 1e-12;

std::vector<double> priors(const KnowledgeBase& kb)
{
    std::vector<double> out;
    out.reserve(kb.diseases.size());
    for (const auto& d : kb.diseases) {
        out.push_back(d.prior);
    }
    return out;
}

BeliefDistribution make_distribution(const KnowledgeBase& kb,
                                     std::vector<double> beliefs,
                                     double pre_norm_sum,
                                     Method method)
{
    BeliefDistribution dist;
    dist.diseases = kb.disease_ids();
    dist.beliefs = std::move(beliefs);
    dist.pre_norm_sum = pre_norm_sum;
    dist.method = method;
    return dist;
}

// Divides by the total; an all-zero vector means every hypothesis was ruled out.
std::vector<double> renormalize(std::vector<double> scores, double total, Method method)
{
    if (!(total > 0.0)) {
        throw Error(ErrorCode::AllHypothesesRuledOut,
                    std::string(method_name(method)) + " assigned zero belief to every disease");
    }
    for (auto& s : scores) {
        s /= total;
    }
    return scores;
}

double sum_of(const std::vector<double>& v)
{
    double total = 0.0;
    for (double x : v) {
        total += x;
    }
    return total;
}

double negation_conditional_at(double marginal_p, double likelihood, double prior)
{
    double numerator = marginal_p - likelihood * prior;
    if (numerator < 0.0) {
        if (numerator < -kNegativeSlack) {
            throw Error(ErrorCode::InternalConsistency,
                        "p(obs) - p(obs|d)p(d) is negative beyond rounding slack");
        }
        numerator = 0.0;
    }
    return std::min(1.0, numerator / (1.0 - prior));
}

double marginal_of(const std::vector<double>& like, const std::vector<double>& prior)
{
    double total = 0.0;
    for (std::size_t j = 0; j < like.size(); ++j) {
        total += like[j] * prior[j];
    }
    return total;
}

struct OddsScores
{
    std::vector<double> probability;
    std::vector<bool> infinite;
};

OddsScores compute_odds_scores(const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    check_observations(kb, evidence);
    const auto prior = priors(kb);
    const std::size_t m = prior.size();

    OddsScores out{prior, std::vector<bool>(m, false)};
    if (evidence.empty()) {
        return out;
    }

    std::vector<std::vector<double>> like;
    std::vector<double> marg;
    like.reserve(evidence.size());
    for (const auto& obs : evidence) {
        like.push_back(likelihoods(kb, obs));
        marg.push_back(marginal_of(like.back(), prior));
    }

    for (std::size_t j = 0; j < m; ++j) {
        const bool degenerate = 1.0 - prior[j] <= kDegeneratePrior;
        double log_odds = degenerate ? kInf : std::log(prior[j]) - std::log1p(-prior[j]);
        bool infinite = degenerate;
        bool ruled_out = false;
        for (std::size_t k = 0; k < evidence.size(); ++k) {
            const double l = like[k][j];
            if (l == 0.0) {
                ruled_out = true;
                continue;
            }
            if (degenerate) {
                continue;
            }
            const double neg = negation_conditional_at(marg[k], l, prior[j]);
            if (neg == 0.0) {
                infinite = true;
                continue;
            }
            log_odds += std::log(l) - std::log(neg);
        }

        // A zero likelihood rules the disease out even against infinite odds.
        if (ruled_out) {
            out.probability[j] = 0.0;
        }
        else if (infinite) {
            out.probability[j] = 1.0;
            out.infinite[j] = true;
        }
        else {
            out.probability[j] = 1.0 / (1.0 + std::exp(-log_odds));
        }
    }
    return out;
}

}  // namespace

double MassAssignment::mass(std::string_view disease) const noexcept
{
    for (std::size_t i = 0; i < diseases.size(); ++i) {
        if (diseases[i] == disease) {
            return singleton_mass[i];
        }
    }
    return 0.0;
}

std::vector<double> likelihoods(const KnowledgeBase& kb, const Observation& obs)
{
    const kb::Feature* feature = kb.find_feature(obs.feature);
    if (feature == nullptr) {
        throw Error(ErrorCode::UnknownObservation, "unknown feature " + obs.feature);
    }
    if (!feature->value_index(obs.value)) {
        throw Error(ErrorCode::UnknownObservation,
                    "unknown value " + obs.value + " for feature " + obs.feature);
    }
    std::vector<double> out;
    out.reserve(kb.diseases.size());
    for (const auto& d : kb.diseases) {
        const auto p = kb.conditionals.find(obs.feature, obs.value, d.id);
        if (!p) {
            throw Error(ErrorCode::InternalConsistency,
                        "no conditional for (" + obs.feature + ", " + obs.value + ", " + d.id + ")");
        }
        out.push_back(*p);
    }
    return out;
}

void check_observations(const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    std::set<std::string_view> seen;
    for (const auto& obs : evidence) {
        const kb::Feature* feature = kb.find_feature(obs.feature);
        if (feature == nullptr) {
            throw Error(ErrorCode::UnknownObservation, "unknown feature " + obs.feature);
        }
        if (!feature->value_index(obs.value)) {
            throw Error(ErrorCode::UnknownObservation,
                        "unknown value " + obs.value + " for feature " + obs.feature);
        }
        if (!seen.insert(obs.feature).second) {
            throw Error(ErrorCode::DuplicateObservation,
                        "feature " + obs.feature + " observed more than once");
        }
    }
}

BeliefDistribution simple_bayes(const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    check_observations(kb, evidence);
    const std::size_t m = kb.diseases.size();

    std::vector<double> log_weight(m);
    for (std::size_t j = 0; j < m; ++j) {
        log_weight[j] = std::log(kb.diseases[j].prior);
    }
    for (const auto& obs : evidence) {
        const auto like = likelihoods(kb, obs);
        for (std::size_t j = 0; j < m; ++j) {
            log_weight[j] += like[j] > 0.0 ? std::log(like[j]) : -kInf;
        }
    }

    const double top = m == 0 ? -kInf : *std::ranges::max_element(log_weight);
    if (top == -kInf) {
        throw Error(ErrorCode::AllHypothesesRuledOut,
                    "simple_bayes assigned zero belief to every disease");
    }
    std::vector<double> weight(m);
    for (std::size_t j = 0; j < m; ++j) {
        weight[j] = std::exp(log_weight[j] - top);
    }
    const double total = sum_of(weight);
    return make_distribution(kb, renormalize(std::move(weight), total, Method::simple_bayes), 1.0,
                             Method::simple_bayes);
}

double marginal(const KnowledgeBase& kb, const Observation& obs)
{
    return marginal_of(likelihoods(kb, obs), priors(kb));
}

double negation_conditional(const KnowledgeBase& kb, const Observation& obs, std::string_view disease)
{
    const auto j = kb.disease_index(disease);
    if (!j) {
        throw Error(ErrorCode::InvalidArgument, "unknown disease " + std::string(disease));
    }
    const double prior = kb.diseases[*j].prior;
    if (1.0 - prior <= kDegeneratePrior) {
        throw Error(ErrorCode::DegeneratePrior,
                    "disease " + std::string(disease) + " has prior 1; its negation is empty");
    }
    const auto like = likelihoods(kb, obs);
    return negation_conditional_at(marginal_of(like, priors(kb)), like[*j], prior);
}

std::vector<double> odds_likelihood_scores(const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    return compute_odds_scores(kb, evidence).probability;
}

BeliefDistribution odds_likelihood(const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    auto scores = compute_odds_scores(kb, evidence);
    const double pre_norm = sum_of(scores.probability);

    const auto n_infinite = std::ranges::count(scores.infinite, true);
    if (n_infinite > 0) {
        // Infinite odds dominate: they share the mass, finite-odds diseases get none.
        std::vector<double> beliefs(scores.probability.size(), 0.0);
        for (std::size_t j = 0; j < beliefs.size(); ++j) {
            if (scores.infinite[j]) {
                beliefs[j] = 1.0 / static_cast<double>(n_infinite);
            }
        }
        return make_distribution(kb, std::move(beliefs), pre_norm, Method::odds_likelihood);
    }
    return make_distribution(kb,
                             renormalize(std::move(scores.probability), pre_norm, Method::odds_likelihood),
                             pre_norm, Method::odds_likelihood);
}

MassAssignment evoking_strength(const KnowledgeBase& kb, const Observation& obs)
{
    const auto like = likelihoods(kb, obs);
    const auto prior = priors(kb);
    const double marg = marginal_of(like, prior);
    if (!(marg > 0.0)) {
        throw Error(ErrorCode::ZeroMarginal,
                    "observation " + obs.feature + "=" + obs.value + " has probability zero");
    }
    MassAssignment out;
    out.diseases = kb.disease_ids();
    out.singleton_mass.resize(like.size());
    for (std::size_t j = 0; j < like.size(); ++j) {
        out.singleton_mass[j] = prior[j] * like[j] / marg;
    }
    return out;
}

std::vector<double> dempster_shafer_scores(const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    check_observations(kb, evidence);
    if (evidence.empty()) {
        throw Error(ErrorCode::EmptyEvidence, "naive_dempster_shafer needs at least one observation");
    }
    // Accumulate log prod (1 - ES) so long evidence lists stay accurate.
    std::vector<double> log_remainder(kb.diseases.size(), 0.0);
    for (const auto& obs : evidence) {
        const auto es = evoking_strength(kb, obs);
        for (std::size_t j = 0; j < log_remainder.size(); ++j) {
            log_remainder[j] += std::log1p(-es.singleton_mass[j]);
        }
    }
    std::vector<double> belief(log_remainder.size());
    for (std::size_t j = 0; j < belief.size(); ++j) {
        belief[j] = -std::expm1(log_remainder[j]);
    }
    return belief;
}

BeliefDistribution naive_dempster_shafer(const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    auto scores = dempster_shafer_scores(kb, evidence);
    const double pre_norm = sum_of(scores);
    return make_distribution(kb, renormalize(std::move(scores), pre_norm, Method::naive_dempster_shafer),
                             pre_norm, Method::naive_dempster_shafer);
}

double cf_parallel_combine(double x, double y) noexcept
{
    return x + y * (1.0 - x);
}

BeliefDistribution infer(Method method, const KnowledgeBase& kb, std::span<const Observation> evidence)
{
    switch (method) {
        case Method::simple_bayes: return simple_bayes(kb, evidence);
        case Method::odds_likelihood: return odds_likelihood(kb, evidence);
        case Method::naive_dempster_shafer: return naive_dempster_shafer(kb, evidence);
        case Method::external: break;
    }
    throw Error(ErrorCode::InvalidArgument, "no inference procedure for external distributions");
}

}  // namespace udx::engine
