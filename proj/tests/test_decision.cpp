#include "test_support.hpp"

#include "uncertain_dx/decision.hpp"
#include "uncertain_dx/error.hpp"
#include "uncertain_dx/kb.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

using namespace udx;
using decision::UtilityMatrix;

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

BeliefDistribution dist(std::vector<std::string> ids, std::vector<double> beliefs)
{
    BeliefDistribution d;
    d.diseases = std::move(ids);
    d.beliefs = std::move(beliefs);
    return d;
}

kb::KnowledgeBase kb_with(const std::vector<std::pair<std::string, std::string>>& disease_classes)
{
    kb::KnowledgeBase k;
    for (const auto& [id, cls] : disease_classes) {
        k.diseases.push_back({id, id, 1.0 / static_cast<double>(disease_classes.size()), cls});
    }
    k.features.push_back({"f", "f", {"a", "b"}});
    for (const auto& d : k.diseases) {
        k.conditionals.set("f", "a", d.id, 0.5);
        k.conditionals.set("f", "b", d.id, 0.5);
    }
    return k;
}

// benign/lethal, zero diagonal, missing "lethal" is very costly.
UtilityMatrix benign_lethal()
{
    return UtilityMatrix({"benign", "lethal"}, {0, 1000, 800000, 0}, {{"benign", "benign"}, {"lethal", "lethal"}});
}

}  // namespace

TEST(MaxBelief, Argmax)
{
    EXPECT_EQ(decision::max_belief_diagnosis(dist({"H1", "H2", "H3"}, {0.5, 0.375, 0.125})).disease, "H1");
    EXPECT_EQ(decision::max_belief_diagnosis(dist({"H1", "H2", "H3"}, {0.5, 0.375, 0.125})).rule,
              decision::Rule::max_belief);
    EXPECT_EQ(decision::max_belief_diagnosis(dist({"only"}, {1.0})).disease, "only");
}

TEST(MaxBelief, TieGoesToSmallestId)
{
    EXPECT_EQ(decision::max_belief_diagnosis(dist({"a", "b", "c"}, {0.5, 0.5, 0.0})).disease, "a");
    EXPECT_EQ(decision::max_belief_diagnosis(dist({"c", "b", "a"}, {0.0, 0.5, 0.5})).disease, "a");
}

TEST(MaxBelief, EmptyRejected)
{
    EXPECT_EQ(code_of([] { (void)decision::max_belief_diagnosis({}); }), ErrorCode::InvalidArgument);
}

TEST(Meu, LethalWinsWhenMissingItIsCostly)
{
    const auto k = kb_with({{"benign", "benign"}, {"lethal", "lethal"}});
    const auto U = benign_lethal();
    const auto p = dist({"benign", "lethal"}, {0.6, 0.4});
    EXPECT_NEAR(decision::expected_disutility(p, U, "lethal"), 600.0, 1e-9);
    EXPECT_NEAR(decision::expected_disutility(p, U, "benign"), 320000.0, 1e-9);
    const auto dx = decision::meu_diagnosis(p, U, k);
    EXPECT_EQ(dx.disease, "lethal");
    EXPECT_EQ(dx.rule, decision::Rule::meu);
}

TEST(Meu, PointMassPicksOwnClass)
{
    const auto k = kb_with({{"a1", "A"}, {"a2", "A"}, {"b1", "B"}});
    const UtilityMatrix U({"A", "B"}, {0, 50, 70, 0}, {{"a1", "A"}, {"a2", "A"}, {"b1", "B"}});
    EXPECT_EQ(decision::meu_diagnosis(dist({"a2"}, {1.0}), U, k).disease, "a1");
    EXPECT_EQ(decision::meu_diagnosis(dist({"b1"}, {1.0}), U, k).disease, "b1");
}

TEST(Meu, UniformUtilitiesFallBackToSmallestId)
{
    const auto k = kb_with({{"z", "A"}, {"m", "B"}, {"c", "C"}});
    const UtilityMatrix U({"A", "B", "C"}, std::vector<double>(9, 42.0), {{"z", "A"}, {"m", "B"}, {"c", "C"}});
    EXPECT_EQ(decision::meu_diagnosis(dist({"z", "m", "c"}, {0.2, 0.7, 0.1}), U, k).disease, "c");
}

TEST(Meu, Errors)
{
    const auto k = kb_with({{"benign", "benign"}, {"lethal", "lethal"}, {"odd", "benign"}});
    const auto U = benign_lethal();
    EXPECT_EQ(code_of([&] { (void)decision::meu_diagnosis(dist({"benign", "lethal"}, {0.6, 0.4}), U, k); }),
              ErrorCode::UnmappedDisease);
    const auto k2 = kb_with({{"benign", "benign"}, {"lethal", "lethal"}});
    EXPECT_EQ(code_of([&] { (void)decision::meu_diagnosis(dist({"benign", "lethal"}, {0.6, 0.3}), U, k2); }),
              ErrorCode::InvalidArgument);
}

TEST(UtilityMatrix, WrongSizeRejected)
{
    EXPECT_EQ(code_of([] { UtilityMatrix({"a", "b"}, {1, 2, 3}, {}); }), ErrorCode::InvalidArgument);
}

TEST(ExpandUtilities, ClassStructure)
{
    // 51 diseases in 26 classes, nine of them in one Hodgkin's class.
    std::vector<std::pair<std::string, std::string>> dc;
    std::map<std::string, std::string> expansion;
    for (int i = 0; i < 9; ++i) {
        dc.emplace_back("hodgkins_" + std::to_string(i), "hodgkins");
    }
    for (int i = 0; i < 42; ++i) {
        dc.emplace_back("d" + std::to_string(i), "class" + std::to_string(i % 25));
    }
    std::vector<std::string> classes{"hodgkins"};
    for (int c = 0; c < 25; ++c) {
        classes.push_back("class" + std::to_string(c));
    }
    for (const auto& [d, c] : dc) {
        expansion[d] = c;
    }
    std::vector<double> values(26 * 26);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = static_cast<double>(i);
    }
    const UtilityMatrix U(classes, values, expansion);
    const auto k = kb_with(dc);
    ASSERT_EQ(k.diseases.size(), 51U);
    ASSERT_TRUE(decision::validate_utilities(U, &k).empty()) << kb::describe(decision::validate_utilities(U, &k));

    const auto e = decision::expand_utilities(U, k);
    EXPECT_EQ(e.values.size(), 2601U);
    for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t j = 0; j < 9; ++j) {
            EXPECT_EQ(e.at(i, j), U.class_disutility("hodgkins", "hodgkins"));
        }
    }
    // Regrouping by class recovers the class matrix exactly.
    for (std::size_t i = 0; i < e.diseases.size(); ++i) {
        for (std::size_t j = 0; j < e.diseases.size(); ++j) {
            EXPECT_EQ(e.at(i, j), U.class_disutility(U.class_of(e.diseases[i]), U.class_of(e.diseases[j])));
        }
    }
}

TEST(ExpandUtilities, SingleClassIsConstant)
{
    const auto k = kb_with({{"a", "X"}, {"b", "X"}, {"c", "X"}});
    const UtilityMatrix U({"X"}, {7.0}, {{"a", "X"}, {"b", "X"}, {"c", "X"}});
    for (double v : decision::expand_utilities(U, k).values) {
        EXPECT_EQ(v, 7.0);
    }
    const auto k2 = kb_with({{"a", "X"}, {"q", "X"}});
    EXPECT_EQ(code_of([&] { (void)decision::expand_utilities(U, k2); }), ErrorCode::UnmappedDisease);
}

TEST(ValidateUtilities, Problems)
{
    const auto k = kb_with({{"a", "X"}, {"b", "Y"}});
    const UtilityMatrix U({"X", "Y"}, {0, -1, NAN, 0}, {{"a", "X"}, {"b", "Z"}});
    const auto text = kb::describe(decision::validate_utilities(U, &k));
    for (const char* needle : {"negative", "missing", "unknown class Z"}) {
        EXPECT_NE(text.find(needle), std::string::npos) << needle << " in " << text;
    }
}

TEST(UtilitiesFile, FixtureLoadsAndRoundTrips)
{
    const auto k = kb::load_kb_file(udx::testing::data_path("fixture_kb.json"));
    const auto U = decision::load_utilities_file(udx::testing::data_path("fixture_utilities.json"));
    EXPECT_TRUE(decision::validate_utilities(U, &k).empty());
    EXPECT_EQ(U.classes().size(), 5U);
    EXPECT_EQ(U.class_disutility("metastasis", "sinus_reactive"), 300000.0);
    std::istringstream in(decision::serialize_utilities(U));
    const auto back = decision::load_utilities(in);
    EXPECT_EQ(back.classes(), U.classes());
    EXPECT_EQ(back.expansion(), U.expansion());
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            EXPECT_EQ(back.class_disutility(i, j), U.class_disutility(i, j));
        }
    }
}

TEST(UtilitiesFile, MissingEntryIsValidationError)
{
    std::istringstream in(R"({"classes": ["a", "b"], "expansion": {"x": "a"},
        "disutility": [{"true": "a", "diagnosed": "a", "micromorts": 0}]})");
    EXPECT_EQ(code_of([&] { (void)decision::load_utilities(in); }), ErrorCode::ValidationError);
}

TEST(Wtp, ReferenceRates)
{
    EXPECT_EQ(decision::wtp_to_micromorts(100.0, 100'000'000.0).amount, 1.0);
    EXPECT_NEAR(decision::wtp_to_micromorts(10.0, 10'000'000.0).amount, 1.0, 1e-12);
    EXPECT_EQ(decision::wtp_to_micromorts(0.0, 123.0).amount, 0.0);
    EXPECT_FALSE(decision::wtp_to_micromorts(100.0, 100'000'000.0).beyond_linear_range);
}

TEST(Wtp, LinearityWarning)
{
    // $20,000 at $10M is 2000 micromorts, a 0.002 death probability.
    const auto q = decision::wtp_to_micromorts(20'000.0, 10'000'000.0);
    EXPECT_NEAR(q.amount, 2000.0, 1e-9);
    EXPECT_TRUE(q.beyond_linear_range);
    EXPECT_FALSE(decision::wtp_to_micromorts(10'000.0, 10'000'000.0).beyond_linear_range);
}

TEST(Wtp, Errors)
{
    EXPECT_EQ(code_of([] { (void)decision::wtp_to_micromorts(1.0, 0.0); }), ErrorCode::NonpositiveValueOfLife);
    EXPECT_EQ(code_of([] { (void)decision::wtp_to_micromorts(1.0, -5.0); }), ErrorCode::NonpositiveValueOfLife);
    EXPECT_EQ(code_of([] { (void)decision::wtp_to_micromorts(-1.0, 5.0); }), ErrorCode::InvalidArgument);
}

TEST(Wtp, Linear)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> money(0.0, 5000.0);
    std::uniform_real_distribution<double> lambda(0.0, 10.0);
    const double vol = 10'000'000.0;
    for (int i = 0; i < 500; ++i) {
        const double a = money(rng), b = money(rng), l = lambda(rng);
        const double fa = decision::wtp_to_micromorts(a, vol).amount;
        const double fb = decision::wtp_to_micromorts(b, vol).amount;
        const double fab = decision::wtp_to_micromorts(a + b, vol).amount;
        const double fla = decision::wtp_to_micromorts(l * a, vol).amount;
        EXPECT_NEAR(fab, fa + fb, 4 * std::numeric_limits<double>::epsilon() * fab);
        EXPECT_NEAR(fla, l * fa, 4 * std::numeric_limits<double>::epsilon() * fla);
    }
    // Integer dollar amounts at a power-of-ten rate are exact.
    EXPECT_EQ(decision::wtp_to_micromorts(300.0, 100'000'000.0).amount,
              decision::wtp_to_micromorts(100.0, 100'000'000.0).amount +
                  decision::wtp_to_micromorts(200.0, 100'000'000.0).amount);
}

TEST(OffdiagonalAdjust, AddsDelta)
{
    const auto antibiotics = decision::wtp_to_micromorts(100.0, 10'000'000.0);
    EXPECT_NEAR(decision::offdiagonal_adjust(25.0, antibiotics), 35.0, 1e-12);
    EXPECT_EQ(decision::offdiagonal_adjust(25.0, {}), 25.0);
    EXPECT_EQ(decision::offdiagonal_adjust(0.0, {1.0, false}), 1.0);
    EXPECT_EQ(code_of([] { (void)decision::offdiagonal_adjust(-1.0, {}); }), ErrorCode::InvalidArgument);
}

TEST(DecisionProperties, ScaleAndAffineInvariance)
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 2 + rng() % 6;
        const std::size_t c = 1 + rng() % m;
        std::vector<std::pair<std::string, std::string>> dc;
        std::map<std::string, std::string> expansion;
        for (std::size_t j = 0; j < m; ++j) {
            const std::string cls = "c" + std::to_string(j % c);
            dc.emplace_back("d" + std::to_string(j), cls);
            expansion["d" + std::to_string(j)] = cls;
        }
        std::vector<std::string> classes;
        for (std::size_t i = 0; i < c; ++i) {
            classes.push_back("c" + std::to_string(i));
        }
        const auto k = kb_with(dc);
        std::vector<double> values(c * c);
        for (auto& v : values) {
            v = std::floor(u(rng) * 1000.0);
        }
        // Dyadic beliefs keep every expected value exact, so ties stay ties.
        std::vector<double> cuts{0.0, 64.0};
        for (std::size_t j = 1; j < m; ++j) {
            cuts.push_back(std::floor(u(rng) * 65.0));
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> beliefs(m);
        for (std::size_t j = 0; j < m; ++j) {
            beliefs[j] = (cuts[j + 1] - cuts[j]) / 64.0;
        }
        const auto p = dist(k.disease_ids(), beliefs);

        auto scaled = p;
        for (auto& b : scaled.beliefs) {
            b *= 8.0;
        }
        EXPECT_EQ(decision::max_belief_diagnosis(p), decision::max_belief_diagnosis(scaled));

        const UtilityMatrix U(classes, values, expansion);
        std::vector<double> affine(values);
        for (auto& v : affine) {
            v = 4.0 * v + 1024.0;
        }
        const UtilityMatrix V(classes, affine, expansion);
        EXPECT_EQ(decision::meu_diagnosis(p, U, k), decision::meu_diagnosis(p, V, k));
    }
}
