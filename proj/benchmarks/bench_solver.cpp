#include <benchmark/benchmark.h>

#include "mmse/estimator.hpp"
#include "mmse/gexp.hpp"
#include "mmse/lp.hpp"
#include "mmse/sublinear.hpp"
#include "support/instances.hpp"

using namespace mmse;

namespace {

void BM_SolveDual(benchmark::State& state)
{
    testing::Sampler s(11);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<Measure> gens;
    for (int g = 0; g < 8; ++g)
        gens.emplace_back(s.positive_simplex(n));
    const MeasureSet ms(std::move(gens));
    const RandomVariable xi(s.values(n, -10.0, 10.0));
    const PartitionAlgebra c = s.partition(n, n / 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_mmse(ms, xi, c));
}
BENCHMARK(BM_SolveDual)->Arg(8)->Arg(32)->Arg(128);

void BM_NestedOracle(benchmark::State& state)
{
    testing::Sampler s(12);
    const testing::Problem p = s.proper_problem(6, static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(brute_force_mmse(p.ms, p.xi, p.c));
}
BENCHMARK(BM_NestedOracle)->Arg(1)->Arg(2)->Arg(3);

void BM_TreeCorners(benchmark::State& state)
{
    const int depth = static_cast<int>(state.range(0));
    const TreeModel tm = TreeModel::girsanov(depth);
    for (auto _ : state)
        benchmark::DoNotOptimize(tree_measure_set(tm));
}
BENCHMARK(BM_TreeCorners)->DenseRange(1, 4);

void BM_TreeRho(benchmark::State& state)
{
    const TreeModel tm = TreeModel::girsanov(4);
    const MeasureSet ms = tree_measure_set(tm);
    testing::Sampler s(13);
    const RandomVariable xi(s.values(tm.leaves(), -5.0, 5.0));
    for (auto _ : state)
        benchmark::DoNotOptimize(rho(ms, xi));
}
BENCHMARK(BM_TreeRho);

void BM_HullMembership(benchmark::State& state)
{
    testing::Sampler s(14);
    const auto k = static_cast<std::size_t>(state.range(0));
    std::vector<std::vector<double>> points;
    for (std::size_t i = 0; i < k; ++i)
        points.push_back(s.values(6, -1.0, 1.0));
    const std::vector<double> target(6, 0.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(lp::convex_hull_membership(points, target));
}
BENCHMARK(BM_HullMembership)->Arg(8)->Arg(64);

} // namespace

BENCHMARK_MAIN();
