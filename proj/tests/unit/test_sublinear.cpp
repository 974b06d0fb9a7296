#include <doctest.h>

#include "mmse/errors.hpp"
#include "mmse/sublinear.hpp"
#include "support/instances.hpp"

using namespace mmse;

namespace {

MeasureSet two_point()
{
    return MeasureSet({Measure({0.25, 0.75}), Measure({0.75, 0.25})});
}

} // namespace

TEST_CASE("rho on the two-point set")
{
    const RhoValue r = rho(two_point(), RandomVariable({2.0, 8.0}));
    CHECK(r.value == 6.5);
    CHECK(r.argmax_generator == 0);
    CHECK(r.ties == std::vector<Index>{0});

    const RhoValue neg = rho(two_point(), RandomVariable({-2.0, -8.0}));
    CHECK(neg.value == -3.5);
    CHECK(neg.argmax_generator == 1);
}

TEST_CASE("ties report every maximizer and the smallest index")
{
    const RhoValue r = rho(two_point(), RandomVariable({3.0, 3.0}));
    CHECK(r.value == 3.0);
    CHECK(r.argmax_generator == 0);
    CHECK(r.ties == std::vector<Index>{0, 1});
}

TEST_CASE("conditional envelopes")
{
    const MeasureSet ms = two_point();
    const RandomVariable xi({2.0, 8.0});
    const auto c = PartitionAlgebra::trivial(2);
    CHECK(ess_sup_conditional(ms, xi, c)[0] == 6.5);
    CHECK(ess_inf_conditional(ms, xi, c)[0] == 3.5);
    // Singletons: both envelopes are xi itself.
    const auto d = PartitionAlgebra::discrete(2);
    CHECK(ess_sup_conditional(ms, xi, d) == xi);
    CHECK(ess_inf_conditional(ms, xi, d) == xi);
}

TEST_CASE("envelopes skip generators that miss a block")
{
    const MeasureSet ms({Measure({0.5, 0.5, 0.0, 0.0}), Measure({0.25, 0.25, 0.25, 0.25})});
    const PartitionAlgebra c(4, {{0, 1}, {2, 3}});
    const RandomVariable xi({0.0, 2.0, 4.0, 8.0});
    CHECK(ess_sup_conditional(ms, xi, c)[2] == 6.0);
    const MeasureSet blind({Measure({0.5, 0.5, 0.0, 0.0})});
    CHECK_THROWS_AS(ess_sup_conditional(blind, xi, c), ZeroMassBlockError);
}

TEST_CASE("axioms hold on seeded random sets")
{
    testing::Sampler s(31);
    for (int i = 0; i < 30; ++i) {
        const auto p = s.proper_problem(6, 1, 5);
        const auto samples = random_axiom_samples(p.xi.size(), 8, 100 + static_cast<std::uint64_t>(i));
        const AxiomReport report = axiom_suite(p.ms, samples, {0.0, 0.5, 2.0, 7.25});
        CHECK(report.passed());
        CHECK(report.checks > 0);
    }
}

TEST_CASE("Hoelder bound")
{
    const MeasureSet ms = two_point();
    const RandomVariable centered({-3.0, 3.0});
    const HolderBound eq = holder_bound(ms, centered, centered, 2.0, 2.0);
    CHECK(eq.lhs == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(eq.rhs == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(eq.holds());
    CHECK_THROWS_AS(holder_bound(ms, centered, centered, 2.0, 3.0), ArgumentError);

    testing::Sampler s(77);
    for (int i = 0; i < 50; ++i) {
        const auto p = s.proper_problem(6, 1, 4);
        const RandomVariable other(s.values(p.xi.size(), -5.0, 5.0));
        CHECK(holder_bound(p.ms, p.xi, other, 3.0, 1.5).holds());
        CHECK(holder_bound(p.ms, p.xi, other, 4.0, 4.0 / 3.0).holds());
    }
}

TEST_CASE("axiom samples are reproducible")
{
    const auto a = random_axiom_samples(4, 3, 9);
    const auto b = random_axiom_samples(4, 3, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == b[i]);
}
