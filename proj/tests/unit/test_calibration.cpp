#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "elink/calibration.hpp"
#include "oracles/grid_search.hpp"
#include "oracles/joint_lp.hpp"
#include "support/random_models.hpp"

using namespace elink;

namespace {

TrainingSet one_criterion(std::size_t p, const std::vector<std::pair<double, int>>& data) {
    TrainingSet t;
    t.category_count = p;
    t.criterion_count = 1;
    for (auto [g, c] : data) t.examples.push_back({{g}, Category{c}});
    return t;
}

void expect_feasible(const LpSolution& s, double epsilon) {
    for (std::size_t j = 0; j < s.profiles.criterion_count(); ++j)
        for (std::size_t h = 1; h < s.profiles.profile_count(); ++h)
            ASSERT_GE(s.profiles.value(h, j), s.profiles.value(h - 1, j) + epsilon);
}

}  // namespace

TEST(EstimateProfiles, SeparableDataHasZeroObjective) {
    const auto t = one_criterion(2, {{0.1, 1}, {0.2, 1}, {0.8, 2}, {0.9, 2}});
    const auto s = estimate_profiles(t, 0.01);
    EXPECT_EQ(s.objective, 0.0);
    EXPECT_GE(s.profiles.value(0, 0), 0.2);
    EXPECT_LE(s.profiles.value(0, 0), 0.8);
    // Flat optimum [0.2, 0.8]: midpoint.
    EXPECT_NEAR(s.profiles.value(0, 0), 0.5, 1e-12);
}

TEST(EstimateProfiles, OverlapSplitsTheError) {
    const auto t = one_criterion(2, {{0.3, 2}, {0.4, 1}});
    const auto s = estimate_profiles(t, 0.01);
    EXPECT_NEAR(s.objective, 0.1, 1e-12);

    // Brute-force grid over profile positions at resolution 1e-4.
    double best = 1e9;
    for (int i = 0; i <= 10000; ++i) {
        const double b = i * 1e-4;
        best = std::min(best, std::max(0.0, 0.4 - b) + std::max(0.0, b - 0.3));
    }
    EXPECT_NEAR(s.objective, best, 1e-9);
}

TEST(EstimateProfiles, ObjectiveIsSumOfErrors) {
    testsupport::Gen g(21);
    for (int k = 0; k < 50; ++k) {
        const auto t = testsupport::random_training_set(g, 3, 3, 60);
        const auto s = estimate_profiles(t, 0.01);
        double sum = 0.0;
        for (const auto& row : s.errors)
            for (double theta : row) {
                ASSERT_GE(theta, 0.0);
                sum += theta;
            }
        ASSERT_NEAR(s.objective, sum, 1e-9 * std::max(1.0, sum));
        expect_feasible(s, 0.01);
    }
}

TEST(EstimateProfiles, MatchesJointLpOracle) {
    testsupport::Gen g(22);
    for (int k = 0; k < 20; ++k) {
        const auto m = static_cast<std::size_t>(g.integer(1, 3));
        const auto p = static_cast<std::size_t>(g.integer(2, 4));
        const auto n = static_cast<std::size_t>(g.integer(static_cast<int>(p), 40));
        const auto t = testsupport::random_training_set(g, m, p, n);
        const auto s = estimate_profiles(t, 0.01);
        const auto joint = oracle::solve_joint_lp(t, 0.01);
        ASSERT_NEAR(s.objective, joint.objective, 1e-9 * std::max(1.0, joint.objective))
            << "instance " << k << " m=" << m << " p=" << p << " n=" << n;
    }
}

TEST(EstimateProfiles, MatchesExhaustiveGridSearch) {
    testsupport::Gen g(23);
    for (int k = 0; k < 60; ++k) {
        const int p = g.integer(2, 3);
        const int n = g.integer(p, 20);
        std::vector<oracle::GridExample> data;
        std::vector<std::pair<double, int>> rows;
        for (int i = 0; i < n; ++i) {
            const int c = i < p ? i + 1 : g.integer(1, p);
            const std::int64_t units = g.integer(0, 100);
            data.push_back({units, c});
            rows.emplace_back(static_cast<double>(units) / 100.0, c);
        }
        const auto t = one_criterion(static_cast<std::size_t>(p), rows);
        const auto s = estimate_profiles(t, 0.01);
        const auto best = oracle::grid_minimum(data, p, 1, -2, 102);
        ASSERT_NEAR(s.objective, static_cast<double>(best) / 100.0, 1e-9) << "instance " << k;
    }
}

TEST(EstimateProfiles, MarginSeparatedDataIsRecovered) {
    testsupport::Gen g(24);
    for (int k = 0; k < 30; ++k) {
        const std::size_t m = 3, p = 3;
        TrainingSet t;
        t.category_count = p;
        t.criterion_count = m;
        // Category h occupies [0.1 + 0.3 (h - 1), 0.3 + 0.3 (h - 1)] on every criterion.
        for (int i = 0; i < 90; ++i) {
            const int c = 1 + i % 3;
            std::vector<double> perf(m);
            for (auto& v : perf) v = 0.1 + 0.3 * (c - 1) + g.uniform(0.0, 0.2);
            t.examples.push_back({perf, Category{c}});
        }
        const auto s = estimate_profiles(t, 0.01);
        ASSERT_EQ(s.objective, 0.0);
        std::vector<Criterion> cs(m);
        for (std::size_t j = 0; j < m; ++j) cs[j].name = "g" + std::to_string(j);
        const ElectreModel model(cs, s.profiles, 0.5, 0.01);
        for (const auto& e : t.examples) ASSERT_EQ(assign_pessimistic(model, e.performances), e.category);
    }
}

TEST(EstimateProfiles, CostCriterionProfilesInNativeOrientation) {
    const auto t = one_criterion(3, {{0.9, 1}, {0.8, 1}, {0.5, 2}, {0.45, 2}, {0.1, 3}, {0.2, 3}});
    const auto s = estimate_profiles(t, 0.01, {Direction::cost});
    EXPECT_EQ(s.objective, 0.0);
    EXPECT_GT(s.profiles.value(0, 0), s.profiles.value(1, 0));
    Criterion c;
    c.direction = Direction::cost;
    EXPECT_NO_THROW(ElectreModel({c}, s.profiles, 0.5, 0.01));
}

TEST(EstimateProfiles, EmptyTrainingSetIsUsageError) {
    EXPECT_THROW(estimate_profiles(one_criterion(3, {}), 0.01), UsageError);
}

TEST(EstimateProfiles, NonpositiveEpsilonIsUsageError) {
    EXPECT_THROW(estimate_profiles(one_criterion(2, {{0.1, 1}, {0.9, 2}}), 0.0), UsageError);
}

TEST(EstimateProfiles, OversizedEpsilonIsInfeasible) {
    // Range 0.1 with p = 4 needs 2 epsilon <= 0.1.
    const auto t = one_criterion(4, {{0.1, 1}, {0.15, 2}, {0.18, 3}, {0.2, 4}});
    try {
        estimate_profiles(t, 0.06);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_NE(std::string(e.what()).find("epsilon"), std::string::npos);
    }
    EXPECT_NO_THROW(estimate_profiles(t, 0.05));
}

TEST(EstimateProfiles, EmptyCategoryWarnsAndStaysFeasible) {
    const auto t = one_criterion(3, {{0.1, 1}, {0.2, 1}, {0.8, 3}, {0.9, 3}});
    const auto s = estimate_profiles(t, 0.01);
    ASSERT_EQ(s.warnings.size(), 1u);
    EXPECT_NE(s.warnings[0].find("C2"), std::string::npos);
    EXPECT_EQ(s.objective, 0.0);
    expect_feasible(s, 0.01);
    EXPECT_GE(s.profiles.value(0, 0), 0.2);
    EXPECT_LE(s.profiles.value(1, 0), 0.8);
}

TEST(EstimateProfiles, RandomInstancesAreFeasible) {
    testsupport::Gen g(25);
    for (int k = 0; k < 100; ++k) {
        const auto p = static_cast<std::size_t>(g.integer(2, 5));
        const auto t = testsupport::random_training_set(g, 2, p, 50, 0.4);
        const double eps = g.uniform(0.001, 0.05);
        expect_feasible(estimate_profiles(t, eps), eps);
    }
}

TEST(EstimateThresholds, FractionsOfRange) {
    const auto t = one_criterion(2, {{0.0, 1}, {1.0, 2}});
    const auto th = estimate_thresholds(t, 0.05, 0.15);
    EXPECT_DOUBLE_EQ(th[0].indifference, 0.05);
    EXPECT_DOUBLE_EQ(th[0].preference, 0.15);
}

TEST(EstimateThresholds, ConstantCriterionGivesZero) {
    const auto t = one_criterion(2, {{0.4, 1}, {0.4, 2}});
    const auto th = estimate_thresholds(t);
    EXPECT_EQ(th[0].indifference, 0.0);
    EXPECT_EQ(th[0].preference, 0.0);
}

TEST(EstimateThresholds, ZeroFractionsGiveTrueCriterion) {
    const auto t = one_criterion(2, {{0.0, 1}, {1.0, 2}});
    const auto th = estimate_thresholds(t, 0.0, 0.0);
    EXPECT_EQ(th[0].indifference, 0.0);
    EXPECT_EQ(th[0].preference, 0.0);
}

TEST(EstimateThresholds, RejectsBadFractions) {
    const auto t = one_criterion(2, {{0.0, 1}, {1.0, 2}});
    EXPECT_THROW(estimate_thresholds(t, 0.2, 0.1), UsageError);
    EXPECT_THROW(estimate_thresholds(t, -0.1, 0.1), UsageError);
    EXPECT_THROW(estimate_thresholds(one_criterion(2, {})), UsageError);
}

TEST(LambdaGrid, SweepLevelsAreExactGridPoints) {
    const auto grid = lambda_grid(0.05);
    ASSERT_EQ(grid.size(), 11u);
    EXPECT_EQ(grid.front(), 0.5);
    EXPECT_EQ(grid.back(), 1.0);
    for (double l : {0.50, 0.70, 0.85}) EXPECT_NE(std::find(grid.begin(), grid.end(), l), grid.end()) << l;
}

TEST(LambdaGrid, AlwaysEndsAtOne) {
    const auto grid = lambda_grid(0.3);
    EXPECT_EQ(grid, (std::vector<double>{0.5, 0.8, 1.0}));
    EXPECT_THROW(lambda_grid(0.0), UsageError);
    EXPECT_THROW(lambda_grid(0.6), UsageError);
}

TEST(EstimateLambda, PerfectEverywherePicksOne) {
    const auto t = one_criterion(2, {{0.1, 1}, {0.9, 2}});
    Criterion c;
    const ElectreModel m({c}, ProfileSet({{0.5}}), 0.5);
    EXPECT_EQ(estimate_lambda(t, m, 0.05, Procedure::pessimistic), 1.0);
}

TEST(EstimateLambda, BestOnlyUpToPointSix) {
    // sigma(a, b) = 0.6: a stays in C_2 only while lambda <= 0.6.
    const auto t = one_criterion(2, {{0.1, 2}});
    Criterion c;
    c.preference = 1.0;
    const ElectreModel m({c}, ProfileSet({{0.5}}), 0.5);
    ASSERT_EQ(credibility(m, std::vector<double>{0.1}, 0), 0.6);
    const auto curve = lambda_accuracy_curve(t, m, 0.05, Procedure::pessimistic);
    for (const auto& pt : curve) EXPECT_EQ(pt.correct, pt.lambda <= 0.6 ? 1u : 0u) << pt.lambda;
    EXPECT_EQ(estimate_lambda(t, m, 0.05, Procedure::pessimistic), 0.6);
}

TEST(Calibrate, UniformWeightsAndChosenLambda) {
    testsupport::Gen g(26);
    const auto t = testsupport::random_training_set(g, 3, 3, 120, 0.15);
    const auto r = calibrate(t, {"x", "y", "z"});
    for (const auto& c : r.model.criteria()) EXPECT_EQ(c.weight, 1.0);
    EXPECT_EQ(r.model.lambda(), best_lambda(r.curve));
    EXPECT_EQ(r.curve.size(), 11u);
    EXPECT_EQ(r.model.profiles(), r.lp.profiles);
}

TEST(Calibrate, FixedLambdaSkipsGrid) {
    testsupport::Gen g(27);
    const auto t = testsupport::random_training_set(g, 2, 3, 60);
    CalibrationOptions o;
    o.fixed_lambda = 0.7;
    o.weights = {2.0, 1.0};
    o.vetoes = {std::nullopt, 0.9};
    const auto r = calibrate(t, {"x", "y"}, o);
    EXPECT_EQ(r.model.lambda(), 0.7);
    EXPECT_TRUE(r.curve.empty());
    EXPECT_EQ(r.model.criteria()[0].weight, 2.0);
    EXPECT_EQ(r.model.criteria()[1].veto, std::optional<double>(0.9));
}

TEST(Calibrate, ShapeMismatchesAreUsageErrors) {
    testsupport::Gen g(28);
    const auto t = testsupport::random_training_set(g, 2, 3, 30);
    EXPECT_THROW(calibrate(t, {"x"}), UsageError);
    CalibrationOptions o;
    o.weights = {1.0};
    EXPECT_THROW(calibrate(t, {"x", "y"}, o), UsageError);
}
