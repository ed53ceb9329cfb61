#include "uncertain_dx/error.hpp"
#include "uncertain_dx/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

using namespace udx;
using eval::permutation_test;
using eval::weighted_mean_sd;
using eval::wilcoxon_rank_test;

namespace {

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    }
    catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected udx::Error";
    return ErrorCode::InternalConsistency;
}

std::vector<double> uniform(std::size_t n)
{
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

// Exact one-sided rank-sum p-value: fraction of all splits of the pooled
// sample whose rank sum for the first group is at least the observed one.
double exact_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const std::size_t n = pooled.size();
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            below += pooled[j] < pooled[i];
            equal += pooled[j] == pooled[i];
        }
        ranks[i] = below + (equal + 1.0) / 2.0;
    }
    const double observed = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(a.size()), 0.0);
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(a.size()), true);
    std::size_t total = 0, extreme = 0;
    std::sort(pick.begin(), pick.end());
    do {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pick[i]) {
                s += ranks[i];
            }
        }
        ++total;
        extreme += s >= observed - 1e-9;
    } while (std::next_permutation(pick.begin(), pick.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

TEST(WeightedMeanSd, Examples)
{
    const std::vector<double> v{0.0, 10.0};
    const auto r = weighted_mean_sd(v, std::vector<double>{0.5, 0.5});
    EXPECT_DOUBLE_EQ(r.mean, 5.0);
    EXPECT_DOUBLE_EQ(r.sd, 5.0);

    const auto c = weighted_mean_sd(std::vector<double>{3.0, 3.0, 3.0}, uniform(3));
    EXPECT_DOUBLE_EQ(c.mean, 3.0);
    EXPECT_EQ(c.sd, 0.0);

    const auto s = weighted_mean_sd(std::vector<double>{7.5}, std::vector<double>{1.0});
    EXPECT_EQ(s.mean, 7.5);
    EXPECT_EQ(s.sd, 0.0);

    // Population form: weights (0.25, 0.75) over (0, 4) -> mean 3, var 0.25*9 + 0.75*1 = 3.
    const auto p = weighted_mean_sd(std::vector<double>{0.0, 4.0}, std::vector<double>{0.25, 0.75});
    EXPECT_DOUBLE_EQ(p.mean, 3.0);
    EXPECT_NEAR(p.sd, std::sqrt(3.0), 1e-15);
}

TEST(WeightedMeanSd, Errors)
{
    EXPECT_EQ(code_of([] { (void)weighted_mean_sd(std::vector<double>{1, 2}, std::vector<double>{1.0}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)weighted_mean_sd(std::vector<double>{1, 2}, std::vector<double>{0.5, 0.4}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)weighted_mean_sd(std::vector<double>{}, std::vector<double>{}); }),
              ErrorCode::InvalidArgument);
}

TEST(PermutationTest, AllZeroDiffs)
{
    const std::vector<double> d(12, 0.0);
    EXPECT_EQ(permutation_test(d, uniform(12), 2000, 1), 1.0);
}

TEST(PermutationTest, ConstantPositiveDiffs)
{
    const std::vector<double> d(20, 1.0);
    const double asl = permutation_test(d, uniform(20), 10000, 42);
    EXPECT_LE(asl, 0.001);
    EXPECT_GE(asl, 1.0 / 10001.0);
}

TEST(PermutationTest, DeterministicAndOrderFree)
{
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.3, 1.0);
    std::vector<double> d(15);
    for (auto& x : d) {
        x = g(rng);
    }
    std::vector<double> w(15);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (auto& x : w) {
        x = u(rng);
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) {
        x /= total;
    }
    const double a = permutation_test(d, w, 5000, 77);
    EXPECT_EQ(a, permutation_test(d, w, 5000, 77));

    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> d2, w2;
    for (std::size_t i : order) {
        d2.push_back(d[i]);
        w2.push_back(w[i]);
    }
    EXPECT_EQ(a, permutation_test(d2, w2, 5000, 77));
    EXPECT_NE(a, permutation_test(d, w, 5000, 78));
}

TEST(PermutationTest, ExactSignFlipDistribution)
{
    // Four unit-weight diffs (1, 2, 3, 4): of the 16 sign patterns, only the
    // identity reaches the observed sum 10, so ASL tends to 1/16.
    const std::vector<double> d{1, 2, 3, 4};
    const double asl = permutation_test(d, uniform(4), 200000, 5);
    EXPECT_NEAR(asl, 1.0 / 16.0, 0.003);
    // Patterns with sum >= 8: flipping nothing (10) or only the 1 (8) -> 2/16.
    const std::vector<double> d2{-1, 2, 3, 4};
    EXPECT_NEAR(permutation_test(d2, uniform(4), 200000, 5), 2.0 / 16.0, 0.004);
}

TEST(PermutationTest, NullIsRoughlyUniform)
{
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g(0.0, 1.0);
    int small = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> d(20);
        for (auto& x : d) {
            x = g(rng);
        }
        if (permutation_test(d, uniform(20), 1000, static_cast<std::uint64_t>(t)) <= 0.1) {
            ++small;
        }
    }
    const double fraction = small / 200.0;
    EXPECT_GE(fraction, 0.04);
    EXPECT_LE(fraction, 0.18);
}

TEST(PermutationTest, Errors)
{
    EXPECT_EQ(code_of([] { (void)permutation_test(std::vector<double>{}, std::vector<double>{}, 1000, 0); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)permutation_test(std::vector<double>{1.0}, std::vector<double>{1.0}, 999, 0); }),
              ErrorCode::InvalidArgument);
}

TEST(Wilcoxon, IdenticalSamples)
{
    const std::vector<double> a{3, 1, 4, 1, 5};
    EXPECT_NEAR(wilcoxon_rank_test(a, a), 0.5, 1e-12);
    EXPECT_EQ(wilcoxon_rank_test(std::vector<double>{2, 2}, std::vector<double>{2, 2, 2}), 0.5);
}

TEST(Wilcoxon, SeparatedSamples)
{
    const std::vector<double> a{8, 9, 10, 9};
    const std::vector<double> b{1, 0, 2, 1};
    EXPECT_NEAR(exact_rank_sum_p(a, b), 1.0 / 70.0, 1e-15);
    const double asl = wilcoxon_rank_test(a, b);
    EXPECT_LT(asl, 0.05);
    // Normal approximation: W = 26, E = 18, tie-corrected var = 16/12 * (9 - 12/56).
    const double z = 8.0 / std::sqrt(16.0 / 12.0 * (9.0 - 12.0 / 56.0));
    EXPECT_NEAR(asl, 0.5 * std::erfc(z / std::sqrt(2.0)), 1e-15);
    // The reverse direction is not significant.
    EXPECT_GT(wilcoxon_rank_test(b, a), 0.95);
}

TEST(Wilcoxon, SingleElements)
{
    const std::vector<double> a{1};
    const std::vector<double> b{0};
    EXPECT_EQ(exact_rank_sum_p(a, b), 0.5);
    const double asl = wilcoxon_rank_test(a, b);
    EXPECT_GT(asl, 0.05);
    EXPECT_NEAR(asl, 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 1e-15);
}

TEST(Wilcoxon, ApproximatesExactTest)
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> v(0, 10);
    for (int t = 0; t < 30; ++t) {
        std::vector<double> a(6), b(6);
        for (auto& x : a) {
            x = v(rng) + 2;
        }
        for (auto& x : b) {
            x = v(rng);
        }
        EXPECT_NEAR(wilcoxon_rank_test(a, b), exact_rank_sum_p(a, b), 0.06);
    }
}

TEST(Wilcoxon, EmptySample)
{
    EXPECT_EQ(code_of([] { (void)wilcoxon_rank_test(std::vector<double>{}, std::vector<double>{1.0}); }),
              ErrorCode::InvalidArgument);
}
