#include "uncertain_dx/belief.hpp"

#include <numeric>

namespace udx {

std::string_view method_name(Method method) noexcept
{
    switch (method) {
        case Method::simple_bayes: return "simple_bayes";
        case Method::odds_likelihood: return "odds_likelihood";
        case Method::naive_dempster_shafer: return "naive_dempster_shafer";
        case Method::external: return "external";
    }
    return "external";
}

std::optional<Method> parse_method(std::string_view name) noexcept
{
    if (name == "simple_bayes") {
        return Method::simple_bayes;
    }
    if (name == "odds_likelihood") {
        return Method::odds_likelihood;
    }
    if (name == "naive_dempster_shafer") {
        return Method::naive_dempster_shafer;
    }
    return std::nullopt;
}

double BeliefDistribution::belief(std::string_view disease) const noexcept
{
    for (std::size_t i = 0; i < diseases.size(); ++i) {
        if (diseases[i] == disease) {
            return beliefs[i];
        }
    }
    return 0.0;
}

double BeliefDistribution::total() const noexcept
{
    return std::accumulate(beliefs.begin(), beliefs.end(), 0.0);
}

}  // namespace udx
