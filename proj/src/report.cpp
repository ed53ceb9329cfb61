#include "format.hpp"
#include "json_util.hpp"
#include "uncertain_dx/eval.hpp"

#include <cmath>
#include <cstdint>

namespace udx::eval {

namespace {

using detail::Json;

// Every printed number is rounded once here so TSV and JSON agree.
double rounded(double value, int decimals)
{
    const double scale = std::pow(10.0, decimals);
    const double r = std::round(value * scale) / scale;
    return r == 0.0 ? 0.0 : r;
}

constexpr int kMicromortDecimals = 0;
constexpr int kRatingDecimals = 2;
constexpr int kProbabilityDecimals = 6;

std::string micromorts(double value)
{
    return detail::fixed(rounded(value, kMicromortDecimals), kMicromortDecimals);
}

std::string agreement(const DecisionRow& row)
{
    return std::to_string(row.agreement) + " of " + std::to_string(row.cases);
}

void decision_rows_tsv(std::string& out, const std::vector<DecisionRow>& rows)
{
    out += "label\tabsolute_mean_micromorts\tdiff_mean\tdiff_sd\tgold_agreement\n";
    for (const auto& row : rows) {
        out += row.label + "\t" + micromorts(row.absolute_mean) + "\t" +
               (row.diff_mean ? micromorts(*row.diff_mean) : "-") + "\t" +
               (row.diff_sd ? micromorts(*row.diff_sd) : "-") + "\t" + agreement(row) + "\n";
    }
}

Json micromort_json(double value)
{
    return static_cast<std::int64_t>(rounded(value, kMicromortDecimals));
}

Json decision_rows_json(const std::vector<DecisionRow>& rows)
{
    Json out = Json::array();
    for (const auto& row : rows) {
        Json r;
        r["label"] = row.label;
        r["absolute_mean_micromorts"] = micromort_json(row.absolute_mean);
        r["diff_mean"] = row.diff_mean ? micromort_json(*row.diff_mean) : Json(nullptr);
        r["diff_sd"] = row.diff_sd ? micromort_json(*row.diff_sd) : Json(nullptr);
        r["gold_agreement"] = agreement(row);
        r["agreement_count"] = row.agreement;
        r["case_count"] = row.cases;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::string report_tsv(const EvaluationReport& report)
{
    std::string out;
    out += "# gold_source\t" + std::string(gold_source_name(report.gold)) + "\n\n";

    out += "# decision_theoretic\n";
    decision_rows_tsv(out, report.decision_theoretic);

    out += "\n# gold_standards\n";
    decision_rows_tsv(out, report.gold_standards);

    out += "\n# expert_ratings\nmethod\tmean\tsd\n";
    for (const auto& r : report.expert_ratings) {
        out += std::string(method_label(r.method)) + "\t" + detail::fixed(rounded(r.mean, kRatingDecimals), kRatingDecimals) +
               "\t" + detail::fixed(rounded(r.sd, kRatingDecimals), kRatingDecimals) + "\n";
    }

    out += "\n# significance\ncomparison\ttest\tasl\tseed\titerations\n";
    for (const auto& s : report.significance) {
        out += s.comparison + "\t" + s.test + "\t" +
               detail::fixed(rounded(s.asl, kProbabilityDecimals), kProbabilityDecimals) + "\t" +
               (s.seed ? std::to_string(*s.seed) : "-") + "\t" +
               (s.iterations ? std::to_string(*s.iterations) : "-") + "\n";
    }

    out += "\n# exclusions\ncase_id\treason\n";
    for (const auto& e : report.exclusions) {
        out += e.case_id + "\t" + e.reason + "\n";
    }
    return out;
}

std::string report_json(const EvaluationReport& report)
{
    Json doc;
    doc["gold_source"] = gold_source_name(report.gold);
    doc["cases_evaluated"] = report.cases.size();
    doc["decision_theoretic"] = decision_rows_json(report.decision_theoretic);
    doc["gold_standards"] = decision_rows_json(report.gold_standards);

    doc["expert_ratings"] = Json::array();
    for (const auto& r : report.expert_ratings) {
        doc["expert_ratings"].push_back({{"method", method_label(r.method)},
                                         {"mean", rounded(r.mean, kRatingDecimals)},
                                         {"sd", rounded(r.sd, kRatingDecimals)}});
    }

    doc["significance"] = Json::array();
    for (const auto& s : report.significance) {
        Json row;
        row["comparison"] = s.comparison;
        row["test"] = s.test;
        row["asl"] = rounded(s.asl, kProbabilityDecimals);
        row["seed"] = s.seed ? Json(*s.seed) : Json(nullptr);
        row["iterations"] = s.iterations ? Json(*s.iterations) : Json(nullptr);
        doc["significance"].push_back(std::move(row));
    }

    doc["exclusions"] = Json::array();
    for (const auto& e : report.exclusions) {
        doc["exclusions"].push_back({{"case_id", e.case_id}, {"reason", e.reason}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace udx::eval
