#include "uncertain_dx/eval.hpp"

#include "uncertain_dx/engine.hpp"
#include "uncertain_dx/error.hpp"

#include <algorithm>
#include <map>

namespace udx::eval {

std::string_view gold_source_name(GoldSource source) noexcept
{
    return source == GoldSource::informed ? "informed" : "descriptive";
}

std::optional<GoldSource> parse_gold_source(std::string_view name) noexcept
{
    if (name == "informed") {
        return GoldSource::informed;
    }
    if (name == "descriptive") {
        return GoldSource::descriptive;
    }
    return std::nullopt;
}

std::string_view procedure_name(Procedure p) noexcept
{
    switch (p) {
        case Procedure::simple_bayes_meu: return "simple_bayes_meu";
        case Procedure::simple_bayes: return "simple_bayes";
        case Procedure::odds_likelihood: return "odds_likelihood";
        case Procedure::naive_dempster_shafer: return "naive_dempster_shafer";
    }
    return "";
}

std::string_view procedure_label(Procedure p) noexcept
{
    switch (p) {
        case Procedure::simple_bayes_meu: return "Simple Bayes-MEU";
        case Procedure::simple_bayes: return "Simple Bayes";
        case Procedure::odds_likelihood: return "Odds-likelihood";
        case Procedure::naive_dempster_shafer: return "Naive Dempster-Shafer";
    }
    return "";
}

std::optional<Procedure> parse_procedure(std::string_view name) noexcept
{
    for (auto p : {Procedure::simple_bayes_meu, Procedure::simple_bayes, Procedure::odds_likelihood,
                   Procedure::naive_dempster_shafer}) {
        if (procedure_name(p) == name) {
            return p;
        }
    }
    return std::nullopt;
}

Method inference_method(Procedure p) noexcept
{
    switch (p) {
        case Procedure::simple_bayes_meu:
        case Procedure::simple_bayes: return Method::simple_bayes;
        case Procedure::odds_likelihood: return Method::odds_likelihood;
        case Procedure::naive_dempster_shafer: return Method::naive_dempster_shafer;
    }
    return Method::simple_bayes;
}

std::string_view method_label(Method m) noexcept
{
    switch (m) {
        case Method::simple_bayes: return "Simple Bayes";
        case Method::odds_likelihood: return "Odds-likelihood";
        case Method::naive_dempster_shafer: return "Naive Dempster-Shafer";
        case Method::external: return "External";
    }
    return "";
}

double expected_disutility(const BeliefDistribution& p_gold,
                           const decision::UtilityMatrix& utilities,
                           const decision::Diagnosis& dx,
                           const kb::KnowledgeBase& kb)
{
    if (kb.find_disease(dx.disease) == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "diagnosis " + dx.disease + " is not in the knowledge base");
    }
    return decision::expected_disutility(p_gold, utilities, dx.disease);
}

std::vector<CaseWeight> case_weights(std::span<const kb::CaseRecord> cases, const kb::KnowledgeBase& kb)
{
    std::vector<CaseWeight> out;
    out.reserve(cases.size());
    double total = 0.0;
    for (const auto& c : cases) {
        if (!c.true_diagnosis) {
            throw Error(ErrorCode::MissingTrueDiagnosis, "case " + c.id + " has no true diagnosis");
        }
        const kb::Disease* d = kb.find_disease(*c.true_diagnosis);
        if (d == nullptr) {
            throw Error(ErrorCode::ValidationError,
                        "case " + c.id + " names unknown true diagnosis " + *c.true_diagnosis);
        }
        out.push_back({c.id, d->prior});
        total += d->prior;
    }
    for (auto& w : out) {
        w.weight /= total;
    }
    return out;
}

std::vector<RatingSummary> expert_rating_summary(std::span<const kb::CaseRecord> cases,
                                                 std::span<const CaseWeight> weights,
                                                 std::span<const Method> methods)
{
    std::vector<RatingSummary> out;
    for (Method m : methods) {
        const std::string key(method_name(m));
        std::vector<double> ratings;
        ratings.reserve(cases.size());
        for (const auto& c : cases) {
            if (!c.expert_ratings || !c.expert_ratings->contains(key)) {
                throw Error(ErrorCode::MissingRatings, "case " + c.id + " has no rating for " + key);
            }
            ratings.push_back(c.expert_ratings->at(key));
        }
        const auto summary = weighted_mean_sd(ratings, weights);
        out.push_back({m, summary.mean, summary.sd});
    }
    return out;
}

namespace {

const BeliefDistribution* gold_of(const kb::CaseRecord& c, GoldSource source)
{
    const auto& gold = source == GoldSource::informed ? c.gold_informed : c.gold_descriptive;
    return gold ? &*gold : nullptr;
}

std::string gold_row_label(GoldSource source)
{
    return source == GoldSource::informed ? "Informed gold standard" : "Descriptive gold standard";
}

std::string expert_row_label(GoldSource source)
{
    return source == GoldSource::informed ? "Informed Gold Standard" : "Descriptive Gold Standard";
}

GoldSource other_source(GoldSource source)
{
    return source == GoldSource::informed ? GoldSource::descriptive : GoldSource::informed;
}

std::vector<Procedure> canonical(std::vector<Procedure> procedures)
{
    std::ranges::sort(procedures);
    const auto [first, last] = std::ranges::unique(procedures);
    procedures.erase(first, last);
    return procedures;
}

DecisionRow summarize(std::string label,
                      const std::vector<double>& absolute,
                      const std::vector<double>& diffs,
                      std::size_t agreement,
                      std::span<const CaseWeight> weights)
{
    DecisionRow row;
    row.label = std::move(label);
    row.absolute_mean = weighted_mean_sd(absolute, weights).mean;
    const auto d = weighted_mean_sd(diffs, weights);
    row.diff_mean = d.mean;
    row.diff_sd = d.sd;
    row.agreement = agreement;
    row.cases = absolute.size();
    return row;
}

}  // namespace

EvaluationReport evaluate_methods(const kb::KnowledgeBase& kb,
                                  std::span<const kb::CaseRecord> cases,
                                  const decision::UtilityMatrix& utilities,
                                  const EvaluationOptions& options)
{
    const auto procedures = canonical(options.procedures);
    if (procedures.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no procedures to evaluate");
    }
    if (auto v = validate_utilities(utilities, &kb); !v.empty()) {
        throw Error(ErrorCode::ValidationError, kb::describe(v));
    }
    if (auto v = kb::validate_cases(cases, kb); !v.empty()) {
        throw Error(ErrorCode::ValidationError, kb::describe(v));
    }
    for (const auto& c : cases) {
        if (!c.true_diagnosis) {
            throw Error(ErrorCode::MissingTrueDiagnosis, "case " + c.id + " has no true diagnosis");
        }
        if (gold_of(c, options.gold) == nullptr) {
            throw Error(ErrorCode::MissingGoldStandard,
                        "case " + c.id + " has no " + std::string(gold_source_name(options.gold)) +
                            " gold standard");
        }
    }

    std::vector<Method> methods;
    for (Procedure p : procedures) {
        if (std::ranges::find(methods, inference_method(p)) == methods.end()) {
            methods.push_back(inference_method(p));
        }
    }

    // Aggregation runs over cases in id order.
    std::vector<const kb::CaseRecord*> ordered;
    for (const auto& c : cases) {
        ordered.push_back(&c);
    }
    std::ranges::sort(ordered, {}, [](const kb::CaseRecord* c) { return c->id; });

    EvaluationReport report;
    report.gold = options.gold;

    std::vector<kb::CaseRecord> retained;
    std::vector<std::map<Method, BeliefDistribution>> inferred;
    for (const kb::CaseRecord* c : ordered) {
        std::map<Method, BeliefDistribution> dists;
        try {
            for (Method m : methods) {
                dists.emplace(m, engine::infer(m, kb, c->observations));
            }
        }
        catch (const Error& e) {
            if (!is_inference_error(e.code())) {
                throw;
            }
            report.exclusions.push_back({c->id, e.what()});
            continue;
        }
        retained.push_back(*c);
        inferred.push_back(std::move(dists));
    }
    if (retained.empty()) {
        throw Error(ErrorCode::InvalidArgument, "every case was excluded; nothing to evaluate");
    }

    const auto weights = case_weights(retained, kb);
    const bool both_golds = std::ranges::all_of(
        retained, [](const kb::CaseRecord& c) { return c.gold_informed && c.gold_descriptive; });

    for (std::size_t i = 0; i < retained.size(); ++i) {
        const auto& c = retained[i];
        const BeliefDistribution& gold = *gold_of(c, options.gold);

        CaseOutcome outcome;
        outcome.case_id = c.id;
        outcome.weight = weights[i].weight;
        outcome.gold_diagnosis = decision::meu_diagnosis(gold, utilities, kb);
        outcome.r_gold = expected_disutility(gold, utilities, outcome.gold_diagnosis, kb);

        for (Procedure p : procedures) {
            const auto& dist = inferred[i].at(inference_method(p));
            ProcedureOutcome po;
            po.procedure = p;
            po.diagnosis = p == Procedure::simple_bayes_meu ? decision::meu_diagnosis(dist, utilities, kb)
                                                            : decision::max_belief_diagnosis(dist);
            po.rating.r_gold = outcome.r_gold;
            po.rating.r_method = expected_disutility(gold, utilities, po.diagnosis, kb);
            po.rating.diff = po.rating.r_method - po.rating.r_gold;
            outcome.procedures.push_back(po);
        }

        if (both_golds) {
            const BeliefDistribution& other = *gold_of(c, other_source(options.gold));
            ProcedureOutcome po;
            po.diagnosis = decision::meu_diagnosis(other, utilities, kb);
            po.rating.r_gold = outcome.r_gold;
            po.rating.r_method = expected_disutility(gold, utilities, po.diagnosis, kb);
            po.rating.diff = po.rating.r_method - po.rating.r_gold;
            outcome.other_gold = po;
        }
        report.cases.push_back(std::move(outcome));
    }

    const std::size_t n = report.cases.size();
    std::vector<double> r_gold;
    for (const auto& c : report.cases) {
        r_gold.push_back(c.r_gold);
    }

    DecisionRow gold_row;
    gold_row.label = gold_row_label(options.gold);
    gold_row.absolute_mean = weighted_mean_sd(r_gold, weights).mean;
    gold_row.agreement = n;
    gold_row.cases = n;
    report.decision_theoretic.push_back(gold_row);

    std::vector<std::vector<double>> r_by_procedure(procedures.size());
    for (std::size_t k = 0; k < procedures.size(); ++k) {
        std::vector<double> diffs;
        std::size_t agreement = 0;
        for (const auto& c : report.cases) {
            const auto& po = c.procedures[k];
            r_by_procedure[k].push_back(po.rating.r_method);
            diffs.push_back(po.rating.diff);
            if (po.diagnosis.disease == c.gold_diagnosis.disease) {
                ++agreement;
            }
        }
        report.decision_theoretic.push_back(summarize(std::string(procedure_label(procedures[k])),
                                                      r_by_procedure[k], diffs, agreement, weights));
    }

    std::vector<double> other_diffs;
    if (both_golds) {
        std::vector<double> absolute;
        std::size_t agreement = 0;
        for (const auto& c : report.cases) {
            absolute.push_back(c.other_gold->rating.r_method);
            other_diffs.push_back(c.other_gold->rating.diff);
            if (c.other_gold->diagnosis.disease == c.gold_diagnosis.disease) {
                ++agreement;
            }
        }
        DecisionRow base = gold_row;
        base.label = expert_row_label(options.gold);
        report.gold_standards.push_back(base);
        report.gold_standards.push_back(
            summarize(expert_row_label(other_source(options.gold)), absolute, other_diffs, agreement, weights));
    }

    const bool any_ratings =
        std::ranges::any_of(retained, [](const kb::CaseRecord& c) { return c.expert_ratings.has_value(); });
    if (any_ratings) {
        report.expert_ratings = expert_rating_summary(retained, weights, methods);
    }

    // Later procedures in canonical order are the less principled ones; each
    // is tested for doing worse than every earlier one.
    for (std::size_t i = 0; i < procedures.size(); ++i) {
        for (std::size_t j = i + 1; j < procedures.size(); ++j) {
            std::vector<double> d(n);
            for (std::size_t c = 0; c < n; ++c) {
                d[c] = r_by_procedure[j][c] - r_by_procedure[i][c];
            }
            report.significance.push_back(
                {std::string(procedure_label(procedures[j])) + " vs " + std::string(procedure_label(procedures[i])),
                 "monte_carlo_permutation", permutation_test(d, weights, options.iterations, options.seed),
                 options.seed, options.iterations});
        }
    }
    if (both_golds) {
        report.significance.push_back({expert_row_label(other_source(options.gold)) + " vs " +
                                           expert_row_label(options.gold),
                                       "monte_carlo_permutation",
                                       permutation_test(other_diffs, weights, options.iterations, options.seed),
                                       options.seed, options.iterations});
    }
    if (any_ratings) {
        for (std::size_t i = 0; i < methods.size(); ++i) {
            for (std::size_t j = i + 1; j < methods.size(); ++j) {
                std::vector<double> a;
                std::vector<double> b;
                for (const auto& c : retained) {
                    a.push_back(c.expert_ratings->at(std::string(method_name(methods[i]))));
                    b.push_back(c.expert_ratings->at(std::string(method_name(methods[j]))));
                }
                report.significance.push_back({std::string(method_label(methods[i])) + " vs " +
                                                   std::string(method_label(methods[j])),
                                               "wilcoxon_rank_sum", wilcoxon_rank_test(a, b), std::nullopt,
                                               std::nullopt});
            }
        }
    }
    return report;
}

}  // namespace udx::eval
