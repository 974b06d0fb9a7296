#include <doctest.h>

#include <cmath>

#include "mmse/errors.hpp"
#include "mmse/gexp.hpp"
#include "mmse/sublinear.hpp"
#include "support/instances.hpp"

using namespace mmse;

TEST_CASE("tree model validation")
{
    CHECK_THROWS_AS(TreeModel(1, 0.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(TreeModel(1, 0.6, 0.5), ArgumentError);
    CHECK_THROWS_AS(TreeModel(1, 0.5, 1.0), ArgumentError);
    CHECK_THROWS_AS(TreeModel::girsanov(2, 1.0), ArgumentError);
    CHECK_THROWS_AS(TreeModel(0, 0.2, 0.4), ArgumentError);
    const TreeModel tm = TreeModel::girsanov(3);
    CHECK(tm.q_lo()[0] == 0.25);
    CHECK(tm.q_hi()[6] == 0.75);
    CHECK(tm.leaves() == 8);
    CHECK(tm.level_partition(1).blocks() == std::vector<std::vector<Index>>{{0, 1, 2, 3}, {4, 5, 6, 7}});
}

TEST_CASE("corner measure sets")
{
    const MeasureSet t1 = tree_measure_set(TreeModel::girsanov(1));
    REQUIRE(t1.size() == 2);
    CHECK(t1[0].weights() == std::vector<double>{0.25, 0.75});
    CHECK(t1[1].weights() == std::vector<double>{0.75, 0.25});
    CHECK(tree_measure_set(TreeModel::girsanov(2)).size() == 8);
    CHECK(tree_measure_set(TreeModel(3, 0.4, 0.4)).size() == 1);
    CHECK_THROWS_AS(tree_measure_set(TreeModel::girsanov(7)), GuardRefusal);
    // Depth 5 with every node free would need 2^31 corners.
    CHECK_THROWS_AS(tree_measure_set(TreeModel::girsanov(5)), GuardRefusal);
}

TEST_CASE("g-expectation recursion")
{
    const TreeModel t1 = TreeModel::girsanov(1);
    const GExpResult r = g_expectation(t1, {2.0, 8.0});
    CHECK(r.y[0] == 6.5);
    CHECK(r.z[0] == doctest::Approx((2.0 - 8.0) / (2.0 * 0.5)));
    CHECK(g_expectation_lower(t1, {2.0, 8.0}).y[0] == 3.5);

    const TreeModel t3 = TreeModel::girsanov(3);
    const GExpResult flat = g_expectation(t3, std::vector<double>(8, 1.25));
    for (double y : flat.y)
        CHECK(y == 1.25);
    for (double z : flat.z)
        CHECK(z == 0.0);
    CHECK_THROWS_AS(g_expectation(t3, {1.0, 2.0}), StructuralError);
}

TEST_CASE("monotone leaves always select the upper probability")
{
    const TreeModel tm(3, 0.3, 0.6);
    const std::vector<double> leaves{8, 7, 6, 5, 4, 3, 2, 1};
    const GExpResult r = g_expectation(tm, leaves);
    const MeasureSet single({tree_measure_set(TreeModel(3, 0.6, 0.6))[0]});
    CHECK(r.y[0] == doctest::Approx(expectation(single[0], RandomVariable(leaves))));
}

TEST_CASE("root equals rho over the corner set")
{
    testing::Sampler s(8);
    for (int depth = 1; depth <= 4; ++depth) {
        for (int i = 0; i < 4; ++i) {
            const std::size_t internal = (std::size_t{1} << depth) - 1;
            std::vector<double> lo(internal), hi(internal);
            for (std::size_t v = 0; v < internal; ++v) {
                const double a = s.uniform(0.05, 0.95), b = s.uniform(0.05, 0.95);
                lo[v] = std::min(a, b);
                hi[v] = std::max(a, b);
            }
            const TreeModel tm(depth, lo, hi);
            const auto leaves = s.values(tm.leaves(), -5.0, 5.0);
            const MeasureSet ms = tree_measure_set(tm);
            const RhoValue r = rho(ms, RandomVariable(leaves));
            CHECK(std::abs(g_expectation(tm, leaves).y[0] - r.value) <= 1e-10);
        }
    }
}

TEST_CASE("g-expectation is recursive and negation-asymmetric")
{
    testing::Sampler s(12);
    const TreeModel tm = TreeModel::girsanov(3);
    for (int i = 0; i < 10; ++i) {
        const auto leaves = s.values(8, -4.0, 4.0);
        const GExpResult full = g_expectation(tm, leaves);
        for (int tau = 1; tau <= 3; ++tau) {
            // Restart the recursion from the level-tau values.
            const RandomVariable at_tau = full.level_values(tm, tau);
            const GExpResult again = g_expectation(tm, at_tau.values());
            for (int sigma = 0; sigma <= tau; ++sigma)
                CHECK(again.level_values(tm, sigma) == full.level_values(tm, sigma));
        }
        std::vector<double> neg(leaves.size());
        for (std::size_t j = 0; j < leaves.size(); ++j)
            neg[j] = -leaves[j];
        CHECK(g_expectation(tm, neg).y[0] == doctest::Approx(-g_expectation_lower(tm, leaves).y[0]));

        const auto up = solve_mmse(tree_measure_set(tm), RandomVariable(leaves), tm.level_partition(1));
        const auto down = solve_mmse(tree_measure_set(tm), RandomVariable(neg), tm.level_partition(1));
        for (Index j = 0; j < 8; ++j)
            CHECK(down.eta_hat[j] == doctest::Approx(-up.eta_hat[j]).epsilon(1e-9));
    }
}

TEST_CASE("comparison with the estimator")
{
    const GExpComparison t1 = compare_gexp_mmse(TreeModel::girsanov(1), {2.0, 8.0}, 0);
    CHECK(t1.gexp_cond[0] == 6.5);
    CHECK(t1.mmse[0] == doctest::Approx(5.0));
    CHECK(t1.sup_diff == doctest::Approx(1.5));

    const GExpComparison degenerate = compare_gexp_mmse(TreeModel(2, 0.3, 0.3), {1.0, -2.0, 0.5, 4.0}, 1);
    CHECK(degenerate.sup_diff <= 1e-12);

    const GExpComparison top = compare_gexp_mmse(TreeModel::girsanov(2), {1.0, 0.0, 0.0, 0.0}, 1);
    CHECK(top.sup_diff > 0.0);
    CHECK(top.gexp_cond[0] == doctest::Approx(0.75));
    CHECK_THROWS_AS(compare_gexp_mmse(TreeModel::girsanov(2), {1.0, 0.0, 0.0, 0.0}, 2), ArgumentError);
}

TEST_CASE("corner attainment")
{
    testing::Sampler s(21);
    const TreeModel tm(2, 0.2, 0.65);
    const MeasureSet corners = tree_measure_set(tm);
    for (int i = 0; i < 20; ++i) {
        const RandomVariable xi(s.values(4, -3.0, 3.0));
        const double best = rho(corners, xi).value;
        // No interior selection of node probabilities does better.
        for (int t = 0; t < 10; ++t) {
            const TreeModel inner(2, {s.uniform(0.2, 0.65), s.uniform(0.2, 0.65), s.uniform(0.2, 0.65)},
                                  {0.65, 0.65, 0.65});
            std::vector<double> q{inner.q_lo()[0], inner.q_lo()[1], inner.q_lo()[2]};
            const TreeModel pinned(2, q, q);
            CHECK(expectation(tree_measure_set(pinned)[0], xi) <= best + 1e-12);
        }
    }
}
