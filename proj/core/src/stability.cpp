#include "mmse/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mmse/errors.hpp"
#include "mmse/lp.hpp"
#include "mmse/sublinear.hpp"

namespace mmse {

PastedMeasure paste(const Measure& base, const Measure& tail, const Filtration& f, Index level)
{
    require_same_size(base.size(), f.space_size(), "paste");
    require_same_size(tail.size(), f.space_size(), "paste");
    const PartitionAlgebra& c = f.level(level);
    std::vector<double> out(base.size(), 0.0);
    for (Index b = 0; b < c.block_count(); ++b) {
        const double head = base.mass(c.block(b));
        const double denom = tail.mass(c.block(b));
        if (head == 0.0)
            continue;
        if (!(denom > 0.0))
            throw PastingDegeneracyError(b, "pasting: tail measure has zero mass on block " +
                                                std::to_string(b) + " charged by the base measure");
        for (Index i : c.block(b))
            out[i] = head * tail[i] / denom;
    }
    // Pasting a measure with itself must give it back bit for bit.
    Measure result = base == tail ? base : Measure::from_unnormalized(std::move(out));
    return PastedMeasure{base, tail, level, std::move(result)};
}

StabilityReport is_stable(const MeasureSet& ms, const Filtration& f, double tol)
{
    require_same_size(ms.space_size(), f.space_size(), "is_stable");
    if (!is_strictly_comparable(ms))
        throw ProperError("stability check needs strictly positive generators");

    std::vector<std::vector<double>> points;
    points.reserve(ms.size());
    for (const auto& g : ms.generators())
        points.push_back(g.weights());

    StabilityReport report;
    for (Index level = 0; level < f.depth(); ++level) {
        for (Index a = 0; a < ms.size(); ++a) {
            for (Index b = 0; b < ms.size(); ++b) {
                if (a == b)
                    continue;
                PastedMeasure pasted = paste(ms[a], ms[b], f, level);
                ++report.pastings_checked;
                const auto hull = lp::convex_hull_membership(points, pasted.result.weights(), tol);
                if (!hull.member) {
                    report.stable = false;
                    report.witness = std::move(pasted);
                    report.witness_pair = {a, b};
                    report.witness_residual = hull.residual;
                    return report;
                }
            }
        }
    }
    return report;
}

RecursivityCheck recursivity_check(const MeasureSet& ms, const Filtration& f, const RandomVariable& xi,
                                   Index sigma_level, Index tau_level, double tol)
{
    if (tau_level >= f.depth() || sigma_level >= f.depth())
        throw ArgumentError("recursivity_check: level out of range (depth " + std::to_string(f.depth()) +
                            ")");
    if (sigma_level > tau_level)
        throw ArgumentError("recursivity_check: sigma level must not exceed tau level");
    RecursivityCheck out;
    out.lhs = ess_sup_conditional(ms, xi, f.level(sigma_level));
    out.rhs = ess_sup_conditional(ms, ess_sup_conditional(ms, xi, f.level(tau_level)), f.level(sigma_level));
    for (Index i = 0; i < xi.size(); ++i)
        out.gap = std::max(out.gap, std::abs(out.lhs[i] - out.rhs[i]));
    out.equal = out.gap <= tol;
    return out;
}

MeasureSet RationalInstance::measure_set() const
{
    std::vector<Measure> gens;
    gens.reserve(generators.size());
    for (const auto& row : generators) {
        std::vector<double> w(row.size());
        for (std::size_t i = 0; i < row.size(); ++i)
            w[i] = static_cast<double>(row[i]) / static_cast<double>(denominator);
        gens.emplace_back(std::move(w));
    }
    return MeasureSet(std::move(gens));
}

RandomVariable RationalInstance::random_variable() const
{
    std::vector<double> v(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i)
        v[i] = static_cast<double>(xi[i]) / static_cast<double>(denominator);
    return RandomVariable(std::move(v));
}

TcChains evaluate_chains(const RationalInstance& inst, const SolverConfig& cfg)
{
    return evaluate_chains(inst.measure_set(), inst.random_variable(), inst.filtration, cfg);
}

TcChains evaluate_chains(const MeasureSet& ms, const RandomVariable& xi, const Filtration& f,
                         const SolverConfig& cfg)
{
    if (f.depth() < 3)
        throw ArgumentError("time-consistency chains need a filtration with at least three levels");
    const PartitionAlgebra& coarse = f.level(1);
    const PartitionAlgebra& fine = f.level(2);

    TcChains chains;
    const EstimatorResult r2 = solve_mmse(ms, xi, fine, cfg);
    const EstimatorResult r21 = solve_mmse(ms, r2.eta_hat, coarse, cfg);
    const EstimatorResult r1 = solve_mmse(ms, xi, coarse, cfg);
    chains.fine = r2.eta_hat;
    chains.two_stage = r21.eta_hat;
    chains.direct = r1.eta_hat;
    chains.converged = r2.converged() && r21.converged() && r1.converged();
    for (Index i = 0; i < xi.size(); ++i)
        chains.gap = std::max(chains.gap, std::abs(chains.two_stage[i] - chains.direct[i]));
    return chains;
}

TcInstanceStream::TcInstanceStream(std::uint64_t seed, TcSearchOptions opts)
    : rng_(seed), opts_(std::move(opts))
{
    if (opts_.min_points < 4 || opts_.min_points > opts_.max_points)
        throw ArgumentError("search needs 4 <= min_points <= max_points");
    if (opts_.min_generators < 1 || opts_.min_generators > opts_.max_generators)
        throw ArgumentError("search needs 1 <= min_generators <= max_generators");
    if (opts_.denominator < static_cast<std::int64_t>(opts_.max_points))
        throw ArgumentError("denominator must be at least the largest point count");
    if (opts_.xi_range < 0)
        throw ArgumentError("xi_range must be nonnegative");
}

std::int64_t TcInstanceStream::draw(std::int64_t lo, std::int64_t hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng_() % span);
}

RationalInstance TcInstanceStream::next()
{
    const auto n = static_cast<std::size_t>(
        draw(static_cast<std::int64_t>(opts_.min_points), static_cast<std::int64_t>(opts_.max_points)));

    const auto split = static_cast<Index>(draw(1, static_cast<std::int64_t>(n) - 1));
    std::vector<std::vector<Index>> level1(2);
    for (Index i = 0; i < n; ++i)
        level1[i < split ? 0 : 1].push_back(i);

    std::vector<Index> cuts(2, 0);
    for (std::size_t b = 0; b < 2; ++b)
        cuts[b] = static_cast<Index>(draw(0, static_cast<std::int64_t>(level1[b].size()) - 1));
    if (cuts[0] == 0 && cuts[1] == 0)
        cuts[level1[0].size() >= 2 ? 0 : 1] = 1;
    std::vector<std::vector<Index>> level2;
    for (std::size_t b = 0; b < 2; ++b) {
        const auto& blk = level1[b];
        if (cuts[b] == 0) {
            level2.push_back(blk);
        } else {
            level2.emplace_back(blk.begin(), blk.begin() + static_cast<std::ptrdiff_t>(cuts[b]));
            level2.emplace_back(blk.begin() + static_cast<std::ptrdiff_t>(cuts[b]), blk.end());
        }
    }

    const auto k = static_cast<std::size_t>(draw(static_cast<std::int64_t>(opts_.min_generators),
                                                 static_cast<std::int64_t>(opts_.max_generators)));
    std::vector<std::vector<std::int64_t>> gens;
    for (std::size_t g = 0; g < k; ++g) {
        std::vector<std::int64_t> pool(static_cast<std::size_t>(opts_.denominator - 1));
        std::iota(pool.begin(), pool.end(), 1);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const auto pick = static_cast<std::size_t>(
                draw(static_cast<std::int64_t>(j), static_cast<std::int64_t>(pool.size()) - 1));
            std::swap(pool[j], pool[pick]);
        }
        std::vector<std::int64_t> marks(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n - 1));
        std::sort(marks.begin(), marks.end());
        std::vector<std::int64_t> row(n);
        std::int64_t prev = 0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            row[j] = marks[j] - prev;
            prev = marks[j];
        }
        row[n - 1] = opts_.denominator - prev;
        gens.push_back(std::move(row));
    }

    std::vector<std::int64_t> xi(n);
    for (auto& v : xi)
        v = draw(-opts_.xi_range, opts_.xi_range);

    Filtration f({PartitionAlgebra::trivial(n), PartitionAlgebra(n, std::move(level1)),
                  PartitionAlgebra(n, std::move(level2))});
    return RationalInstance{opts_.denominator, std::move(gens), std::move(xi), std::move(f)};
}

TcSearchResult mmse_time_consistency_search(std::uint64_t seed, std::size_t trials,
                                            const TcSearchOptions& opts)
{
    if (trials == 0)
        throw ArgumentError("trials must be at least 1");
    TcInstanceStream stream(seed, opts);
    TcSearchResult out;
    for (std::size_t t = 0; t < trials; ++t) {
        RationalInstance inst = stream.next();
        ++out.trials_run;
        TcChains chains = evaluate_chains(inst, opts.solver);
        if (!chains.converged) {
            ++out.skipped;
            continue;
        }
        if (chains.gap > opts.threshold) {
            out.counterexample = TcCounterexample{std::move(inst), std::move(chains), seed, t};
            break;
        }
    }
    return out;
}

} // namespace mmse
