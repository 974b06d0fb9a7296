#pragma once

// Seeded random instances shared by the unit and acceptance tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "mmse/measures.hpp"
#include "mmse/space.hpp"

namespace mmse::testing {

struct Problem {
    MeasureSet ms;
    RandomVariable xi;
    PartitionAlgebra c;
};

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    /// Strictly positive probability vector with entries bounded away from zero.
    std::vector<double> positive_simplex(std::size_t n, double floor = 0.05)
    {
        std::vector<double> w(n);
        for (auto& v : w)
            v = uniform(floor, 1.0);
        const double s = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& v : w)
            v /= s;
        return w;
    }

    std::vector<double> values(std::size_t n, double lo, double hi)
    {
        std::vector<double> v(n);
        for (auto& x : v)
            x = uniform(lo, hi);
        return v;
    }

    /// Random partition of {0..n-1} into exactly `blocks` nonempty blocks.
    PartitionAlgebra partition(std::size_t n, std::size_t blocks)
    {
        std::vector<Index> perm(n);
        for (Index i = 0; i < n; ++i)
            perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng_);
        std::vector<std::vector<Index>> out(blocks);
        for (Index i = 0; i < n; ++i)
            out[i < blocks ? i : static_cast<Index>(integer(0, static_cast<int>(blocks) - 1))].push_back(perm[i]);
        return PartitionAlgebra(n, std::move(out));
    }

    /// n <= max_n points, <= max_blocks blocks, <= max_k strictly positive generators.
    Problem proper_problem(std::size_t max_n = 6, std::size_t max_blocks = 3, std::size_t max_k = 5)
    {
        const auto n = static_cast<std::size_t>(integer(2, static_cast<int>(max_n)));
        const auto b = static_cast<std::size_t>(integer(1, static_cast<int>(std::min(max_blocks, n))));
        const auto k = static_cast<std::size_t>(integer(1, static_cast<int>(max_k)));
        std::vector<Measure> gens;
        for (std::size_t g = 0; g < k; ++g)
            gens.emplace_back(positive_simplex(n));
        return Problem{MeasureSet(std::move(gens)), RandomVariable(values(n, -10.0, 10.0)), partition(n, b)};
    }

    /// Rectangular set over `c`: every pairing of a block marginal (from `marginals`
    /// candidates) with per-block conditionals (`conditionals` candidates per block).
    MeasureSet rectangular(const PartitionAlgebra& c, std::size_t marginals = 2, std::size_t conditionals = 2)
    {
        const std::size_t m = c.block_count();
        std::vector<std::vector<double>> mu;
        for (std::size_t a = 0; a < marginals; ++a)
            mu.push_back(positive_simplex(m));
        std::vector<std::vector<std::vector<double>>> nu(m);
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t j = 0; j < conditionals; ++j)
                nu[b].push_back(positive_simplex(c.block(b).size()));
        std::size_t combos = 1;
        for (std::size_t b = 0; b < m; ++b)
            combos *= conditionals;
        std::vector<Measure> gens;
        for (std::size_t a = 0; a < marginals; ++a) {
            for (std::size_t code = 0; code < combos; ++code) {
                std::vector<double> w(c.space_size());
                std::size_t rest = code;
                for (std::size_t b = 0; b < m; ++b) {
                    const std::size_t pick = rest % conditionals;
                    rest /= conditionals;
                    const auto& blk = c.block(b);
                    for (std::size_t j = 0; j < blk.size(); ++j)
                        w[blk[j]] = mu[a][b] * nu[b][pick][j];
                }
                gens.push_back(Measure::from_unnormalized(std::move(w)));
            }
        }
        return MeasureSet(std::move(gens));
    }

    /// Blocks of `per_block` consecutive points with identical value patterns; generators share
    /// the block marginal, so xi is independent of the partition under every hull element.
    Problem independent_problem(std::size_t blocks, std::size_t per_block, std::size_t k)
    {
        const std::vector<double> pi = positive_simplex(blocks);
        const std::vector<double> pattern = values(per_block, -10.0, 10.0);
        std::vector<Measure> gens;
        for (std::size_t g = 0; g < k; ++g) {
            const std::vector<double> theta = positive_simplex(per_block);
            std::vector<double> w;
            for (std::size_t b = 0; b < blocks; ++b)
                for (std::size_t j = 0; j < per_block; ++j)
                    w.push_back(pi[b] * theta[j]);
            gens.push_back(Measure::from_unnormalized(std::move(w)));
        }
        std::vector<double> xi;
        std::vector<std::vector<Index>> parts(blocks);
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::size_t j = 0; j < per_block; ++j) {
                parts[b].push_back(xi.size());
                xi.push_back(pattern[j]);
            }
        const std::size_t n = xi.size();
        return Problem{MeasureSet(std::move(gens)), RandomVariable(std::move(xi)), PartitionAlgebra(n, std::move(parts))};
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace mmse::testing
