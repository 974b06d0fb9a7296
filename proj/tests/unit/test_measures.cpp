#include <doctest.h>

#include <cmath>

#include "mmse/errors.hpp"
#include "mmse/measures.hpp"

using namespace mmse;

TEST_CASE("measure validation")
{
    CHECK_NOTHROW(Measure({0.25, 0.75}));
    CHECK_THROWS_AS(Measure({0.3, 0.6}), ArgumentError);
    CHECK_THROWS_AS(Measure({-0.1, 1.1}), ArgumentError);
    CHECK(Measure::from_unnormalized({1.0, 3.0}).weights() == std::vector<double>{0.25, 0.75});
    CHECK_THROWS(Measure::from_unnormalized({0.0, 0.0}));
    CHECK(Measure::uniform(4)[2] == 0.25);
}

TEST_CASE("mixture weights")
{
    CHECK(MixtureWeights::vertex(3, 1).values() == std::vector<double>{0.0, 1.0, 0.0});
    CHECK_THROWS(MixtureWeights({0.5, 0.6}));
}

TEST_CASE("duplicate generators are kept and reported")
{
    const MeasureSet ms({Measure({0.5, 0.5}), Measure({0.25, 0.75}), Measure({0.5, 0.5})});
    CHECK(ms.size() == 3);
    REQUIRE(ms.warnings().size() == 1);
    CHECK(ms.warnings()[0] == "generators 0 and 2 are identical");
    CHECK_THROWS_AS(MeasureSet({Measure({1.0}), Measure({0.5, 0.5})}), StructuralError);
}

TEST_CASE("conditional expectation")
{
    const Measure p({0.1, 0.3, 0.2, 0.4});
    const PartitionAlgebra c(4, {{0, 1}, {2, 3}});
    const RandomVariable x({4.0, 8.0, 3.0, 6.0});
    const RandomVariable e = conditional_expectation(p, x, c);
    CHECK(e[0] == doctest::Approx(7.0));
    CHECK(e[3] == doctest::Approx(5.0));
    // Tower property under a single measure.
    CHECK(expectation(p, e) == doctest::Approx(expectation(p, x)));
}

TEST_CASE("zero-mass block handling")
{
    const Measure p({0.5, 0.5, 0.0});
    const PartitionAlgebra c(3, {{0, 1}, {2}});
    const RandomVariable x({1.0, 3.0, 10.0});
    try {
        conditional_expectation(p, x, c);
        FAIL("expected ZeroMassBlockError");
    } catch (const ZeroMassBlockError& e) {
        CHECK(e.block() == 1);
    }
    const auto filled = conditional_expectation(p, x, c, ZeroBlockPolicy::fill_with_unconditional);
    CHECK(filled[2] == doctest::Approx(2.0));
}

TEST_CASE("properness and densities")
{
    const MeasureSet proper({Measure({0.5, 0.5}), Measure({0.1, 0.9})});
    const MeasureSet improper({Measure({0.5, 0.5}), Measure({0.0, 1.0})});
    CHECK(is_proper(proper));
    CHECK(is_strictly_comparable(proper));
    CHECK_FALSE(is_proper(improper));
    CHECK_FALSE(is_strictly_comparable(improper));
    // Points nobody charges do not break properness.
    CHECK(is_proper(MeasureSet({Measure({0.5, 0.5, 0.0}), Measure({0.2, 0.8, 0.0})})));

    const Measure p0 = reference_measure(proper);
    CHECK(p0[0] == doctest::Approx(0.3));
    const RandomVariable d = density(proper[1], p0);
    CHECK(expectation(p0, d) == doctest::Approx(1.0));
    CHECK_THROWS_AS(density(Measure({0.5, 0.5}), Measure({1.0, 0.0})), AbsoluteContinuityError);
    CHECK(density(Measure({1.0, 0.0}), Measure({1.0, 0.0}))[1] == 0.0);
}

TEST_CASE("mixing generators")
{
    const MeasureSet ms({Measure({0.25, 0.75}), Measure({0.75, 0.25})});
    const Measure m = mix(ms, MixtureWeights({0.5, 0.5}));
    CHECK(m[0] == 0.5);
    CHECK(m[1] == 0.5);
}
