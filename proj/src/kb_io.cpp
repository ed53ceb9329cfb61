#include "json_util.hpp"
#include "uncertain_dx/error.hpp"
#include "uncertain_dx/kb.hpp"

#include <fstream>
#include <sstream>

namespace udx::kb {

namespace {

using detail::as_array;
using detail::as_number;
using detail::as_object;
using detail::as_string;
using detail::field_error;
using detail::Json;
using detail::require;

std::ifstream open_input(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open " + path);
    }
    return in;
}

BeliefDistribution parse_distribution(const Json& value, const std::string& path)
{
    BeliefDistribution dist;
    dist.method = Method::external;
    for (const auto& [disease, p] : as_object(value, path).items()) {
        dist.diseases.push_back(disease);
        dist.beliefs.push_back(as_number(p, path + "/" + disease));
    }
    dist.pre_norm_sum = dist.total();
    return dist;
}

Json distribution_to_json(const BeliefDistribution& dist)
{
    Json out = Json::object();
    for (std::size_t i = 0; i < dist.size(); ++i) {
        out[dist.diseases[i]] = dist.beliefs[i];
    }
    return out;
}

}  // namespace

KnowledgeBase parse_kb(std::istream& source)
{
    const Json doc = detail::parse_document(source, "knowledge base");
    KnowledgeBase kb;

    const auto& diseases = as_array(require(doc, "diseases", ""), "/diseases");
    for (std::size_t i = 0; i < diseases.size(); ++i) {
        const std::string path = "/diseases/" + std::to_string(i);
        const auto& d = diseases[i];
        Disease disease;
        disease.id = as_string(require(d, "id", path), path + "/id");
        disease.name = d.contains("name") ? as_string(d["name"], path + "/name") : disease.id;
        disease.prior = as_number(require(d, "prior", path), path + "/prior");
        disease.equivalence_class = as_string(require(d, "class", path), path + "/class");
        kb.diseases.push_back(std::move(disease));
    }

    const auto& features = as_array(require(doc, "features", ""), "/features");
    for (std::size_t i = 0; i < features.size(); ++i) {
        const std::string path = "/features/" + std::to_string(i);
        const auto& f = features[i];
        Feature feature;
        feature.id = as_string(require(f, "id", path), path + "/id");
        feature.name = f.contains("name") ? as_string(f["name"], path + "/name") : feature.id;
        const auto& values = as_array(require(f, "values", path), path + "/values");
        for (std::size_t v = 0; v < values.size(); ++v) {
            feature.values.push_back(as_string(values[v], path + "/values/" + std::to_string(v)));
        }
        kb.features.push_back(std::move(feature));
    }

    const auto& rows = as_array(require(doc, "conditionals", ""), "/conditionals");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string path = "/conditionals/" + std::to_string(i);
        const auto& row = rows[i];
        const std::string feature = as_string(require(row, "feature", path), path + "/feature");
        const std::string disease = as_string(require(row, "disease", path), path + "/disease");
        const auto& probs = as_object(require(row, "probs", path), path + "/probs");
        for (const auto& [value, p] : probs.items()) {
            if (kb.conditionals.contains(feature, value, disease)) {
                field_error(path + "/probs/" + value, "duplicate conditional entry");
            }
            kb.conditionals.set(feature, value, disease, as_number(p, path + "/probs/" + value));
        }
    }

    return kb;
}

KnowledgeBase load_kb(std::istream& source)
{
    KnowledgeBase kb = parse_kb(source);
    const auto violations = validate_kb(kb);
    if (!violations.empty()) {
        throw Error(ErrorCode::ValidationError, describe(violations));
    }
    return kb;
}

KnowledgeBase parse_kb_file(const std::string& path)
{
    auto in = open_input(path);
    return parse_kb(in);
}

KnowledgeBase load_kb_file(const std::string& path)
{
    auto in = open_input(path);
    return load_kb(in);
}

std::string serialize_kb(const KnowledgeBase& kb)
{
    Json doc;
    doc["diseases"] = Json::array();
    for (const auto& d : kb.diseases) {
        doc["diseases"].push_back(
            {{"id", d.id}, {"name", d.name}, {"prior", d.prior}, {"class", d.equivalence_class}});
    }
    doc["features"] = Json::array();
    for (const auto& f : kb.features) {
        doc["features"].push_back({{"id", f.id}, {"name", f.name}, {"values", f.values}});
    }
    doc["conditionals"] = Json::array();
    for (const auto& f : kb.features) {
        for (const auto& d : kb.diseases) {
            Json probs = Json::object();
            for (const auto& v : f.values) {
                if (const auto p = kb.conditionals.find(f.id, v, d.id)) {
                    probs[v] = *p;
                }
            }
            doc["conditionals"].push_back({{"feature", f.id}, {"disease", d.id}, {"probs", probs}});
        }
    }
    return doc.dump(2) + "\n";
}

std::vector<CaseRecord> load_cases(std::istream& source)
{
    const Json doc = detail::parse_document(source, "cases");
    std::vector<CaseRecord> cases;
    as_array(doc, "");
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string path = "/" + std::to_string(i);
        const auto& c = doc[i];
        CaseRecord record;
        record.id = as_string(require(c, "id", path), path + "/id");
        const auto& observations = as_array(require(c, "observations", path), path + "/observations");
        for (std::size_t k = 0; k < observations.size(); ++k) {
            const std::string opath = path + "/observations/" + std::to_string(k);
            record.observations.push_back(
                {as_string(require(observations[k], "feature", opath), opath + "/feature"),
                 as_string(require(observations[k], "value", opath), opath + "/value")});
        }
        if (c.contains("true_diagnosis")) {
            record.true_diagnosis = as_string(c["true_diagnosis"], path + "/true_diagnosis");
        }
        if (c.contains("gold_descriptive")) {
            record.gold_descriptive = parse_distribution(c["gold_descriptive"], path + "/gold_descriptive");
        }
        if (c.contains("gold_informed")) {
            record.gold_informed = parse_distribution(c["gold_informed"], path + "/gold_informed");
        }
        if (c.contains("expert_ratings")) {
            std::map<std::string, double> ratings;
            for (const auto& [method, r] : as_object(c["expert_ratings"], path + "/expert_ratings").items()) {
                ratings[method] = as_number(r, path + "/expert_ratings/" + method);
            }
            record.expert_ratings = std::move(ratings);
        }
        cases.push_back(std::move(record));
    }
    return cases;
}

std::vector<CaseRecord> load_cases_file(const std::string& path)
{
    auto in = open_input(path);
    return load_cases(in);
}

std::string serialize_cases(std::span<const CaseRecord> cases)
{
    Json doc = Json::array();
    for (const auto& c : cases) {
        Json record;
        record["id"] = c.id;
        record["observations"] = Json::array();
        for (const auto& obs : c.observations) {
            record["observations"].push_back({{"feature", obs.feature}, {"value", obs.value}});
        }
        if (c.true_diagnosis) {
            record["true_diagnosis"] = *c.true_diagnosis;
        }
        if (c.gold_descriptive) {
            record["gold_descriptive"] = distribution_to_json(*c.gold_descriptive);
        }
        if (c.gold_informed) {
            record["gold_informed"] = distribution_to_json(*c.gold_informed);
        }
        if (c.expert_ratings) {
            Json ratings = Json::object();
            for (const auto& [method, r] : *c.expert_ratings) {
                ratings[method] = r;
            }
            record["expert_ratings"] = ratings;
        }
        doc.push_back(std::move(record));
    }
    return doc.dump(2) + "\n";
}

}  // namespace udx::kb
