#include "uncertain_dx/cli.hpp"

#include "format.hpp"
#include "json_util.hpp"
#include "uncertain_dx/decision.hpp"
#include "uncertain_dx/engine.hpp"
#include "uncertain_dx/error.hpp"
#include "uncertain_dx/eval.hpp"
#include "uncertain_dx/kb.hpp"
#include "uncertain_dx/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <ostream>
#include <vector>

namespace udx::cli {

namespace {

constexpr const char* kFooter = R"(Output columns (TSV):
  infer     one section per method: "# <method>", "pre_norm_sum<TAB>x",
            then "disease<TAB>belief" rows by descending belief
  evaluate  sections decision_theoretic and gold_standards
            (label, absolute_mean_micromorts, diff_mean, diff_sd, gold_agreement),
            expert_ratings (method, mean, sd),
            significance (comparison, test, asl, seed, iterations),
            exclusions (case_id, reason)
  probe     n, method, disease, belief
Probabilities print with 6 decimals, micromorts as integers.
Exit codes: 0 success, 2 input or validation error, 3 inference error.)";

struct InferOptions
{
    std::string kb_path;
    std::string cases_path;
    std::string case_id;
    std::vector<std::string> observations;
    std::vector<std::string> methods{"simple_bayes", "odds_likelihood", "naive_dempster_shafer"};
    std::string format = "tsv";
    std::string out_path;
};

struct EvaluateOptions
{
    std::string kb_path;
    std::string cases_path;
    std::string utilities_path;
    std::vector<std::string> methods{"simple_bayes_meu", "simple_bayes", "odds_likelihood",
                                     "naive_dempster_shafer"};
    std::string gold = "informed";
    std::uint64_t seed = 0;
    std::size_t iterations = 10000;
    std::string format = "tsv";
    std::string out_path;
};

struct ProbeOptions
{
    std::vector<double> likelihoods;
    std::vector<double> priors;
    std::size_t n_max = 50;
    std::string out_path;
};

struct ValidateOptions
{
    std::string kb_path;
    std::string cases_path;
    std::string utilities_path;
};

[[noreturn]] void input_error(const std::string& message)
{
    throw Error(ErrorCode::InvalidArgument, message);
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out)
{
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file || !(file << text)) {
        input_error("cannot write " + out_path);
    }
}

void check_format(const std::string& format)
{
    if (format != "tsv" && format != "json") {
        input_error("--format must be tsv or json");
    }
}

kb::Observation parse_inline_observation(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        input_error("observation '" + text + "' must look like feature=value");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

std::vector<std::size_t> by_descending_belief(const BeliefDistribution& dist)
{
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
        if (dist.beliefs[a] != dist.beliefs[b]) {
            return dist.beliefs[a] > dist.beliefs[b];
        }
        return dist.diseases[a] < dist.diseases[b];
    });
    return order;
}

double round6(double x)
{
    const double r = std::round(x * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;
}

int cmd_infer(const InferOptions& opt, std::ostream& out)
{
    check_format(opt.format);
    const auto kb = kb::load_kb_file(opt.kb_path);

    std::vector<kb::Observation> evidence;
    if (!opt.case_id.empty()) {
        if (opt.cases_path.empty()) {
            input_error("--case needs --cases");
        }
        const auto cases = kb::load_cases_file(opt.cases_path);
        const auto it = std::ranges::find(cases, opt.case_id, &kb::CaseRecord::id);
        if (it == cases.end()) {
            input_error("no case " + opt.case_id + " in " + opt.cases_path);
        }
        evidence = it->observations;
    }
    for (const auto& text : opt.observations) {
        evidence.push_back(parse_inline_observation(text));
    }

    std::vector<Method> methods;
    for (const auto& name : opt.methods) {
        const auto m = parse_method(name);
        if (!m) {
            input_error("unknown method " + name);
        }
        methods.push_back(*m);
    }
    if (methods.empty()) {
        input_error("--methods must name at least one method");
    }

    engine::check_observations(kb, evidence);
    std::vector<BeliefDistribution> results;
    for (Method m : methods) {
        results.push_back(engine::infer(m, kb, evidence));
    }

    std::string text;
    if (opt.format == "json") {
        detail::Json doc;
        doc["results"] = detail::Json::array();
        for (const auto& dist : results) {
            detail::Json beliefs = detail::Json::array();
            for (std::size_t j : by_descending_belief(dist)) {
                beliefs.push_back({{"disease", dist.diseases[j]}, {"belief", round6(dist.beliefs[j])}});
            }
            doc["results"].push_back({{"method", method_name(dist.method)},
                                      {"pre_norm_sum", round6(dist.pre_norm_sum)},
                                      {"beliefs", beliefs}});
        }
        text = doc.dump(2) + "\n";
    }
    else {
        for (std::size_t r = 0; r < results.size(); ++r) {
            const auto& dist = results[r];
            if (r > 0) {
                text += "\n";
            }
            text += "# " + std::string(method_name(dist.method)) + "\n";
            text += "pre_norm_sum\t" + detail::fixed(dist.pre_norm_sum, 6) + "\n";
            text += "disease\tbelief\n";
            for (std::size_t j : by_descending_belief(dist)) {
                text += dist.diseases[j] + "\t" + detail::fixed(dist.beliefs[j], 6) + "\n";
            }
        }
    }
    emit(text, opt.out_path, out);
    return kExitOk;
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out)
{
    check_format(opt.format);
    const auto gold = eval::parse_gold_source(opt.gold);
    if (!gold) {
        input_error("--gold must be descriptive or informed");
    }
    eval::EvaluationOptions options;
    options.procedures.clear();
    for (const auto& name : opt.methods) {
        const auto p = eval::parse_procedure(name);
        if (!p) {
            input_error("unknown method " + name);
        }
        options.procedures.push_back(*p);
    }
    if (options.procedures.empty()) {
        input_error("--methods must name at least one method");
    }
    options.gold = *gold;
    options.seed = opt.seed;
    options.iterations = opt.iterations;
    if (options.iterations < eval::kMinPermutationIterations) {
        input_error("--iterations must be at least " + std::to_string(eval::kMinPermutationIterations));
    }

    const auto kb = kb::load_kb_file(opt.kb_path);
    const auto cases = kb::load_cases_file(opt.cases_path);
    const auto utilities = decision::load_utilities_file(opt.utilities_path);
    const auto report = eval::evaluate_methods(kb, cases, utilities, options);
    emit(opt.format == "json" ? eval::report_json(report) : eval::report_tsv(report), opt.out_path, out);
    return kExitOk;
}

int cmd_probe(const ProbeOptions& opt, std::ostream& out)
{
    if (opt.n_max < 1) {
        input_error("--n-max must be at least 1");
    }
    synth::ReplicatedEvidenceSpec spec;
    spec.likelihoods = opt.likelihoods;
    spec.priors = opt.priors.empty() ? synth::uniform_priors(opt.likelihoods.size()) : opt.priors;
    spec.n = opt.n_max;
    synth::check_spec(spec);
    const auto steps = synth::convergence_probe(spec, opt.n_max);
    emit(synth::probe_tsv(steps), opt.out_path, out);
    return kExitOk;
}

int cmd_validate(const ValidateOptions& opt, std::ostream& out)
{
    std::vector<std::string> problems;
    auto record = [&](std::string_view what, const std::vector<kb::Violation>& violations) {
        for (const auto& v : violations) {
            problems.push_back(std::string(what) + "\t" + v.entity + "\t" + v.rule);
        }
    };

    const auto kb = kb::parse_kb_file(opt.kb_path);
    const auto kb_violations = kb::validate_kb(kb);
    record("kb", kb_violations);
    if (kb_violations.empty()) {
        if (!opt.cases_path.empty()) {
            record("cases", kb::validate_cases(kb::load_cases_file(opt.cases_path), kb));
        }
        if (!opt.utilities_path.empty()) {
            try {
                record("utilities", decision::validate_utilities(decision::load_utilities_file(opt.utilities_path), &kb));
            }
            catch (const Error& e) {
                if (e.code() != ErrorCode::ValidationError) {
                    throw;
                }
                problems.push_back(std::string("utilities\t") + opt.utilities_path + "\t" + e.what());
            }
        }
    }

    if (problems.empty()) {
        out << "ok\n";
        return kExitOk;
    }
    out << "file\tentity\trule\n";
    for (const auto& p : problems) {
        out << p << "\n";
    }
    return kExitInput;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Diagnostic inference with three uncertainty calculi and decision-theoretic evaluation",
                 "uncertain_dx"};
    app.footer(kFooter);
    app.require_subcommand(1);

    InferOptions infer_opt;
    auto* infer = app.add_subcommand("infer", "Print belief distributions for one case");
    infer->add_option("--kb", infer_opt.kb_path, "Knowledge-base JSON")->required();
    infer->add_option("--cases", infer_opt.cases_path, "Cases JSON (with --case)");
    infer->add_option("--case", infer_opt.case_id, "Case id to run");
    infer->add_option("--obs", infer_opt.observations, "Inline observation feature=value (repeatable)");
    infer->add_option("--methods", infer_opt.methods, "simple_bayes,odds_likelihood,naive_dempster_shafer")
        ->delimiter(',');
    infer->add_option("--format", infer_opt.format, "tsv or json");
    infer->add_option("--out", infer_opt.out_path, "Write output here instead of stdout");

    EvaluateOptions eval_opt;
    auto* evaluate = app.add_subcommand("evaluate", "Rate every method against the gold standards");
    evaluate->add_option("--kb", eval_opt.kb_path, "Knowledge-base JSON")->required();
    evaluate->add_option("--cases", eval_opt.cases_path, "Cases JSON")->required();
    evaluate->add_option("--utilities", eval_opt.utilities_path, "Utilities JSON")->required();
    evaluate->add_option("--methods", eval_opt.methods,
                         "simple_bayes_meu,simple_bayes,odds_likelihood,naive_dempster_shafer")
        ->delimiter(',');
    evaluate->add_option("--gold", eval_opt.gold, "descriptive or informed");
    evaluate->add_option("--seed", eval_opt.seed, "Permutation-test seed")->envname("UNCERTAIN_DX_SEED");
    evaluate->add_option("--iterations", eval_opt.iterations, "Permutation-test iterations (>= 1000)");
    evaluate->add_option("--format", eval_opt.format, "tsv or json");
    evaluate->add_option("--out", eval_opt.out_path, "Write output here instead of stdout");

    ProbeOptions probe_opt;
    auto* probe = app.add_subcommand("probe", "Trace all methods on n copies of one piece of evidence");
    probe->add_option("--likelihoods", probe_opt.likelihoods, "p(E|H_i), comma separated")
        ->required()
        ->delimiter(',');
    probe->add_option("--priors", probe_opt.priors, "p(H_i), comma separated (default uniform)")->delimiter(',');
    probe->add_option("--n-max", probe_opt.n_max, "Largest number of copies");
    probe->add_option("--out", probe_opt.out_path, "Write output here instead of stdout");

    ValidateOptions validate_opt;
    auto* validate = app.add_subcommand("validate", "Check input files and list every violation");
    validate->add_option("--kb", validate_opt.kb_path, "Knowledge-base JSON")->required();
    validate->add_option("--cases", validate_opt.cases_path, "Cases JSON");
    validate->add_option("--utilities", validate_opt.utilities_path, "Utilities JSON");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("uncertain_dx");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (infer->parsed()) {
            return cmd_infer(infer_opt, out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(eval_opt, out);
        }
        if (probe->parsed()) {
            return cmd_probe(probe_opt, out);
        }
        return cmd_validate(validate_opt, out);
    }
    catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_inference_error(e.code()) ? kExitInference : kExitInput;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

}  // namespace udx::cli
