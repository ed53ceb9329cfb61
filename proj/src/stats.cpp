#include "uncertain_dx/error.hpp"
#include "uncertain_dx/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace udx::eval {

namespace {

std::vector<double> weight_values(std::span<const CaseWeight> weights)
{
    std::vector<double> out;
    out.reserve(weights.size());
    for (const auto& w : weights) {
        out.push_back(w.weight);
    }
    return out;
}

// SplitMix64 step. Each permutation iteration gets its own stream keyed by
// (seed, iteration), so iterations could run in any order.
std::uint64_t next_word(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_state(std::uint64_t seed, std::uint64_t iteration) noexcept
{
    std::uint64_t state = seed;
    const std::uint64_t mixed = next_word(state);
    state = mixed ^ (0xd1b54a32d192ed03ULL * (iteration + 1));
    return state;
}

}  // namespace

MeanSd weighted_mean_sd(std::span<const double> values, std::span<const double> weights)
{
    if (values.size() != weights.size()) {
        throw Error(ErrorCode::InvalidArgument, "values and weights differ in length");
    }
    if (values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no values to summarize");
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::abs(total - 1.0) > kb::kProbabilityTolerance) {
        throw Error(ErrorCode::InvalidArgument, "weights must sum to 1");
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        mean += weights[i] * values[i];
    }
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        var += weights[i] * d * d;
    }
    return {mean, std::sqrt(var)};
}

MeanSd weighted_mean_sd(std::span<const double> values, std::span<const CaseWeight> weights)
{
    const auto w = weight_values(weights);
    return weighted_mean_sd(values, std::span<const double>(w));
}

double permutation_test(std::span<const double> diffs,
                        std::span<const double> weights,
                        std::size_t iterations,
                        std::uint64_t seed)
{
    if (diffs.empty()) {
        throw Error(ErrorCode::InvalidArgument, "permutation test needs at least one difference");
    }
    if (diffs.size() != weights.size()) {
        throw Error(ErrorCode::InvalidArgument, "differences and weights differ in length");
    }
    if (iterations < kMinPermutationIterations) {
        throw Error(ErrorCode::InvalidArgument,
                    "permutation test needs at least " + std::to_string(kMinPermutationIterations) +
                        " iterations");
    }

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        pairs.emplace_back(diffs[i], weights[i]);
    }
    std::ranges::sort(pairs);

    std::vector<double> terms;
    terms.reserve(pairs.size());
    double observed = 0.0;
    double scale = 0.0;
    for (const auto& [d, w] : pairs) {
        terms.push_back(w * d);
        observed += w * d;
        scale += std::abs(w * d);
    }
    // Sign patterns that tie the observed statistic in exact arithmetic must
    // count as ties despite rounding.
    const double slack = 1e-12 * scale;

    std::size_t at_least = 0;
    for (std::size_t it = 0; it < iterations; ++it) {
        std::uint64_t state = stream_state(seed, it);
        std::uint64_t bits = 0;
        double flipped = 0.0;
        for (std::size_t c = 0; c < terms.size(); ++c) {
            if (c % 64 == 0) {
                bits = next_word(state);
            }
            flipped += (bits & 1U) ? -terms[c] : terms[c];
            bits >>= 1U;
        }
        if (flipped >= observed - slack) {
            ++at_least;
        }
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(1 + iterations);
}

double permutation_test(std::span<const double> diffs,
                        std::span<const CaseWeight> weights,
                        std::size_t iterations,
                        std::uint64_t seed)
{
    const auto w = weight_values(weights);
    return permutation_test(diffs, std::span<const double>(w), iterations, seed);
}

double wilcoxon_rank_test(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) {
        throw Error(ErrorCode::InvalidArgument, "rank test needs two nonempty samples");
    }
    const std::size_t na = a.size();
    const std::size_t n = a.size() + b.size();

    // (value, belongs to a)
    std::vector<std::pair<double, bool>> pooled;
    pooled.reserve(n);
    for (double x : a) {
        pooled.emplace_back(x, true);
    }
    for (double x : b) {
        pooled.emplace_back(x, false);
    }
    std::ranges::sort(pooled, {}, &std::pair<double, bool>::first);

    double rank_sum = 0.0;
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) {
            ++j;
        }
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].second) {
                rank_sum += midrank;
            }
        }
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }

    const auto dna = static_cast<double>(na);
    const auto dnb = static_cast<double>(n - na);
    const auto dn = static_cast<double>(n);
    const double expected = dna * (dn + 1.0) / 2.0;
    const double variance = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (!(variance > 0.0)) {
        // Every observation tied: no evidence either way.
        return 0.5;
    }
    const double z = (rank_sum - expected) / std::sqrt(variance);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace udx::eval
