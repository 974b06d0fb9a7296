#include <doctest.h>

#include <cmath>

#include "mmse/errors.hpp"
#include "mmse/gexp.hpp"
#include "mmse/stability.hpp"
#include "support/instances.hpp"

using namespace mmse;

namespace {

Filtration two_level_tree()
{
    return Filtration({PartitionAlgebra::trivial(4), PartitionAlgebra(4, {{0, 1}, {2, 3}}),
                       PartitionAlgebra::discrete(4)});
}

/// Every node at 1/4, or every node at 3/4.
MeasureSet diagonal()
{
    return MeasureSet({Measure({1 / 16.0, 3 / 16.0, 3 / 16.0, 9 / 16.0}),
                       Measure({9 / 16.0, 3 / 16.0, 3 / 16.0, 1 / 16.0})});
}

} // namespace

TEST_CASE("pasting identities")
{
    testing::Sampler s(3);
    const Filtration f = two_level_tree();
    for (int i = 0; i < 20; ++i) {
        const Measure q0(s.positive_simplex(4)), q(s.positive_simplex(4));
        for (Index level = 0; level < 3; ++level)
            CHECK(paste(q0, q0, f, level).result == q0);
        const Measure start = paste(q0, q, f, 0).result;
        const Measure end = paste(q0, q, f, 2).result;
        for (Index j = 0; j < 4; ++j) {
            CHECK(start[j] == doctest::Approx(q[j]).epsilon(1e-14));
            CHECK(end[j] == doctest::Approx(q0[j]).epsilon(1e-14));
        }
        // Base marginal on the switch level is preserved; tail conditionals are kept.
        const Measure mid = paste(q0, q, f, 1).result;
        const auto& c = f.level(1);
        for (Index b = 0; b < 2; ++b) {
            CHECK(std::abs(mid.mass(c.block(b)) - q0.mass(c.block(b))) <= 1e-12);
            const Index i0 = c.block(b)[0];
            CHECK(mid[i0] / mid.mass(c.block(b)) == doctest::Approx(q[i0] / q.mass(c.block(b))));
        }
    }
}

TEST_CASE("pasting degeneracy")
{
    const Filtration f = two_level_tree();
    const Measure base({0.25, 0.25, 0.25, 0.25});
    const Measure tail({0.5, 0.5, 0.0, 0.0});
    try {
        paste(base, tail, f, 1);
        FAIL("expected PastingDegeneracyError");
    } catch (const PastingDegeneracyError& e) {
        CHECK(e.block() == 1);
    }
    // Blocks the base misses need nothing from the tail.
    CHECK_NOTHROW(paste(Measure({0.5, 0.5, 0.0, 0.0}), tail, f, 1));
}

TEST_CASE("rectangular tree sets are stable and recursive")
{
    const TreeModel tm(2, 0.2, 0.7);
    const MeasureSet ms = tree_measure_set(tm);
    const StabilityReport st = is_stable(ms, tm.filtration());
    CHECK(st.stable);
    CHECK(st.label == "stable (generator-pasting)");
    CHECK(st.pastings_checked == 3 * 8 * 7);
    testing::Sampler s(11);
    for (int i = 0; i < 20; ++i) {
        const RandomVariable xi(s.values(4, -3.0, 3.0));
        CHECK(recursivity_check(ms, tm.filtration(), xi, 0, 1).equal);
        CHECK(recursivity_check(ms, tm.filtration(), xi, 0, 2).equal);
    }
}

TEST_CASE("diagonal witness fails stability and recursivity")
{
    const StabilityReport st = is_stable(diagonal(), two_level_tree());
    CHECK_FALSE(st.stable);
    REQUIRE(st.witness);
    CHECK(st.witness->switch_level == 1);
    CHECK(st.witness_residual > 1e-9);
    // Root at 1/4 followed by children at 3/4.
    CHECK(st.witness->result[0] == doctest::Approx(3 / 16.0));

    const RecursivityCheck rc = recursivity_check(diagonal(), two_level_tree(), RandomVariable({1.0, 0.0, 0.0, 1.0}), 0, 1);
    CHECK(rc.lhs[0] == doctest::Approx(0.625));
    CHECK(rc.rhs[0] == doctest::Approx(0.75));
    CHECK(rc.gap == doctest::Approx(0.125));
    CHECK_FALSE(rc.equal);
}

TEST_CASE("single generator is trivially stable")
{
    const MeasureSet ms({Measure({0.1, 0.2, 0.3, 0.4})});
    CHECK(is_stable(ms, two_level_tree()).stable);
    CHECK(recursivity_check(ms, two_level_tree(), RandomVariable({1.0, -1.0, 2.0, 0.5}), 0, 1).equal);
}

TEST_CASE("stability preconditions")
{
    const MeasureSet zero({Measure({0.5, 0.5, 0.0, 0.0})});
    CHECK_THROWS_AS(is_stable(zero, two_level_tree()), ProperError);
    CHECK_THROWS_AS(recursivity_check(diagonal(), two_level_tree(), RandomVariable({1, 0, 0, 1}), 2, 1), ArgumentError);
    CHECK_THROWS_AS(recursivity_check(diagonal(), two_level_tree(), RandomVariable({1, 0, 0, 1}), 0, 3), ArgumentError);
}

TEST_CASE("search instance stream is deterministic and well formed")
{
    TcInstanceStream a(5, {}), b(5, {});
    for (int i = 0; i < 50; ++i) {
        const RationalInstance x = a.next(), y = b.next();
        CHECK(x.generators == y.generators);
        CHECK(x.xi == y.xi);
        const std::size_t n = x.xi.size();
        CHECK(n >= 4);
        CHECK(n <= 8);
        CHECK(x.generators.size() >= 2);
        CHECK(x.generators.size() <= 4);
        for (const auto& row : x.generators) {
            std::int64_t sum = 0;
            for (auto v : row) {
                CHECK(v > 0);
                sum += v;
            }
            CHECK(sum == 16);
        }
        CHECK(refine_check(x.filtration));
        CHECK(x.filtration.level(1).block_count() == 2);
        CHECK(x.filtration.level(2).block_count() > 2);
    }
}

TEST_CASE("search finds a genuine counterexample")
{
    const TcSearchResult res = mmse_time_consistency_search(kDefaultTcSeed, 1000);
    REQUIRE(res.counterexample);
    const auto& cx = *res.counterexample;
    CHECK(cx.chains.gap > 1e-3);
    // Cross-check both routes with the independent oracle.
    const MeasureSet ms = cx.instance.measure_set();
    const auto& f = cx.instance.filtration;
    const auto fine = brute_force_mmse(ms, cx.instance.random_variable(), f.level(2), 1e-4);
    const auto two_stage = brute_force_mmse(ms, fine.eta_hat, f.level(1), 1e-4);
    const auto direct = brute_force_mmse(ms, cx.instance.random_variable(), f.level(1), 1e-4);
    double gap = 0.0;
    for (Index i = 0; i < two_stage.eta_hat.size(); ++i)
        gap = std::max(gap, std::abs(two_stage.eta_hat[i] - direct.eta_hat[i]));
    CHECK(gap == doctest::Approx(cx.chains.gap).epsilon(1e-2));
    // Same seed, same answer.
    const TcSearchResult again = mmse_time_consistency_search(kDefaultTcSeed, 1000);
    REQUIRE(again.counterexample);
    CHECK(again.counterexample->trial == cx.trial);
    CHECK(again.counterexample->chains.gap == cx.chains.gap);
}

TEST_CASE("trivial search families never produce counterexamples")
{
    TcSearchOptions single;
    single.min_generators = 1;
    single.max_generators = 1;
    CHECK_FALSE(mmse_time_consistency_search(1, 200, single).counterexample);

    TcSearchOptions flat;
    flat.xi_range = 0;
    CHECK_FALSE(mmse_time_consistency_search(1, 100, flat).counterexample);

    CHECK_THROWS_AS(mmse_time_consistency_search(1, 0), ArgumentError);
}
