#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace udx {

/// Which procedure produced a belief distribution. `external` covers
/// distributions read from files, such as expert gold standards.
enum class Method {
    simple_bayes,
    odds_likelihood,
    naive_dempster_shafer,
    external,
};

[[nodiscard]] std::string_view method_name(Method method) noexcept;
[[nodiscard]] std::optional<Method> parse_method(std::string_view name) noexcept;

/// Per-disease degrees of belief, renormalized to sum to one. The total
/// before renormalization is kept in `pre_norm_sum`; it equals one exactly
/// when the producing method's independence assumptions are consistent.
struct BeliefDistribution
{
    std::vector<std::string> diseases;
    std::vector<double> beliefs;
    double pre_norm_sum = 1.0;
    Method method = Method::external;

    [[nodiscard]] std::size_t size() const noexcept { return beliefs.size(); }
    [[nodiscard]] bool empty() const noexcept { return beliefs.empty(); }

    /// Belief for `disease`, or zero when the distribution does not mention it.
    [[nodiscard]] double belief(std::string_view disease) const noexcept;

    [[nodiscard]] double total() const noexcept;
};

}  // namespace udx
