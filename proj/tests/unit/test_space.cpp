#include <doctest.h>

#include <limits>

#include "mmse/errors.hpp"
#include "mmse/space.hpp"

using namespace mmse;

TEST_CASE("sample space labels")
{
    CHECK(SampleSpace::anonymous(3).labels() == std::vector<std::string>{"w0", "w1", "w2"});
    CHECK_THROWS_AS(SampleSpace({"a", "a"}), ArgumentError);
    CHECK_THROWS_AS(SampleSpace({}), ArgumentError);
}

TEST_CASE("random variable bound is tight")
{
    RandomVariable x({2.0, -8.0, 3.0});
    CHECK(x.bound() == 8.0);
    CHECK(RandomVariable({1.0, -2.0}, 5.0).bound() == 2.0);
    CHECK_THROWS_AS(RandomVariable({1.0, -2.0}, 1.0), ArgumentError);
    CHECK_THROWS_AS(RandomVariable({1.0, -2.0}, -1.0), ArgumentError);
    CHECK_THROWS(RandomVariable({1.0, std::numeric_limits<double>::infinity()}));
}

TEST_CASE("pointwise arithmetic")
{
    const RandomVariable a({1.0, -2.0}), b({3.0, 4.0});
    CHECK((a + b).values() == std::vector<double>{4.0, 2.0});
    CHECK((a - b).values() == std::vector<double>{-2.0, -6.0});
    CHECK((a * b).values() == std::vector<double>{3.0, -8.0});
    CHECK((2.0 * a).values() == std::vector<double>{2.0, -4.0});
    CHECK((a + 1.0).values() == std::vector<double>{2.0, -1.0});
    CHECK(abs(a).values() == std::vector<double>{1.0, 2.0});
    CHECK(square(a).values() == std::vector<double>{1.0, 4.0});
    CHECK(pow(abs(a), 3.0).values() == std::vector<double>{1.0, 8.0});
    CHECK_THROWS_AS(a + RandomVariable({1.0}), StructuralError);
}

TEST_CASE("partition canonicalization and validation")
{
    const PartitionAlgebra c(4, {{3, 1}, {0, 2}});
    CHECK(c.blocks() == std::vector<std::vector<Index>>{{0, 2}, {1, 3}});
    CHECK(c.block_of(3) == 1);
    CHECK_THROWS_AS(PartitionAlgebra(3, {{0, 1}}), ArgumentError);
    CHECK_THROWS_AS(PartitionAlgebra(3, {{0, 1}, {1, 2}}), ArgumentError);
    CHECK_THROWS_AS(PartitionAlgebra(3, {{0, 1, 2}, {}}), ArgumentError);
    CHECK_THROWS_AS(PartitionAlgebra(3, {{0, 1, 5}, {2}}), ArgumentError);
}

TEST_CASE("broadcast, collapse and measurability")
{
    const PartitionAlgebra c(4, {{0, 1}, {2, 3}});
    const std::vector<double> per_block{1.5, -2.0};
    const RandomVariable x = c.broadcast(per_block);
    CHECK(x.values() == std::vector<double>{1.5, 1.5, -2.0, -2.0});
    CHECK(c.collapse(x) == per_block);
    CHECK(is_measurable(x, c));
    CHECK_FALSE(is_measurable(RandomVariable({1.0, 2.0, 3.0, 3.0}), c));
    CHECK(is_measurable(RandomVariable({7.0, 1.0, 2.0}), PartitionAlgebra::discrete(3)));
}

TEST_CASE("filtration nesting")
{
    const Filtration good({PartitionAlgebra::trivial(4), PartitionAlgebra(4, {{0, 1}, {2, 3}}),
                           PartitionAlgebra::discrete(4)});
    CHECK(refine_check(good));
    CHECK_NOTHROW(require_refining(good));
    const Filtration crossed({PartitionAlgebra::trivial(4), PartitionAlgebra(4, {{0, 1}, {2, 3}}),
                              PartitionAlgebra(4, {{0, 2}, {1, 3}})});
    CHECK_FALSE(refine_check(crossed));
    CHECK_THROWS_AS(require_refining(crossed), ArgumentError);
    CHECK_THROWS(good.level(3));
}

TEST_CASE("truncate and block average")
{
    const RandomVariable x({-5.0, 0.5, 9.0});
    CHECK(truncate(x, 2.0).values() == std::vector<double>{-2.0, 0.5, 2.0});
    CHECK_THROWS_AS(truncate(x, -1.0), ArgumentError);
    const PartitionAlgebra c(3, {{0, 2}, {1}});
    CHECK(block_average(x, c).values() == std::vector<double>{2.0, 0.5, 2.0});
}
