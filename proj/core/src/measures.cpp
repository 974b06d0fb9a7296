#include "mmse/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mmse/errors.hpp"

namespace mmse {

namespace {

void check_simplex(const std::vector<double>& w, const char* what)
{
    if (w.empty())
        throw ArgumentError(std::string(what) + " is empty");
    double total = 0.0;
    for (double v : w) {
        if (!std::isfinite(v) || v < 0.0)
            throw ArgumentError(std::string(what) + " has a negative or non-finite entry");
        total += v;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << what << " sums to " << total << ", expected 1";
        throw ArgumentError(os.str());
    }
}

std::vector<double> renormalized(std::vector<double> w)
{
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total != 1.0)
        for (double& v : w)
            v /= total;
    return w;
}

} // namespace

Measure::Measure(std::vector<double> weights)
{
    check_simplex(weights, "measure weights");
    weights_ = renormalized(std::move(weights));
}

Measure Measure::from_unnormalized(std::vector<double> weights)
{
    double total = 0.0;
    for (double v : weights) {
        if (!std::isfinite(v) || v < 0.0)
            throw ArgumentError("measure weights have a negative or non-finite entry");
        total += v;
    }
    if (!(total > 0.0))
        throw ArgumentError("measure weights have zero total mass");
    for (double& v : weights)
        v /= total;
    return Measure(std::move(weights), Trusted{});
}

Measure Measure::uniform(std::size_t n)
{
    return Measure(std::vector<double>(n, 1.0 / static_cast<double>(n)), Trusted{});
}

double Measure::mass(std::span<const Index> points) const
{
    double m = 0.0;
    for (Index i : points)
        m += weights_[i];
    return m;
}

bool Measure::strictly_positive() const
{
    for (double v : weights_)
        if (!(v > 0.0))
            return false;
    return true;
}

MixtureWeights::MixtureWeights(std::vector<double> lambda)
{
    check_simplex(lambda, "mixture weights");
    lambda_ = std::move(lambda);
}

MixtureWeights MixtureWeights::uniform(std::size_t k)
{
    return MixtureWeights(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

MixtureWeights MixtureWeights::vertex(std::size_t k, Index which)
{
    std::vector<double> l(k, 0.0);
    l.at(which) = 1.0;
    return MixtureWeights(std::move(l));
}

MeasureSet::MeasureSet(std::vector<Measure> generators) : generators_(std::move(generators))
{
    if (generators_.empty())
        throw ArgumentError("measure set needs at least one generator");
    for (const auto& g : generators_)
        require_same_size(g.size(), generators_.front().size(), "measure-set generator");
    // Sort indices by weight vector so duplicates become neighbours.
    std::vector<Index> order(generators_.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return generators_[a].weights() < generators_[b].weights();
    });
    std::vector<std::pair<Index, Index>> pairs;
    for (Index lo = 0; lo < order.size();) {
        Index hi = lo + 1;
        while (hi < order.size() && generators_[order[hi]] == generators_[order[lo]])
            ++hi;
        for (Index a = lo; a < hi; ++a)
            for (Index b = a + 1; b < hi; ++b)
                pairs.emplace_back(std::min(order[a], order[b]), std::max(order[a], order[b]));
        lo = hi;
    }
    std::sort(pairs.begin(), pairs.end());
    for (auto [a, b] : pairs)
        warnings_.push_back("generators " + std::to_string(a) + " and " + std::to_string(b) +
                            " are identical");
}

double expectation(const Measure& p, const RandomVariable& x)
{
    require_same_size(p.size(), x.size(), "expectation");
    double s = 0.0;
    for (Index i = 0; i < x.size(); ++i)
        s += p[i] * x[i];
    return s;
}

std::vector<double> block_conditional_means(const Measure& p, const RandomVariable& x,
                                            const PartitionAlgebra& c, ZeroBlockPolicy policy)
{
    require_same_size(p.size(), x.size(), "conditional_expectation");
    require_same_size(c.space_size(), x.size(), "conditional_expectation");
    std::vector<double> out(c.block_count());
    for (Index b = 0; b < c.block_count(); ++b) {
        double mass = 0.0, weighted = 0.0;
        for (Index i : c.block(b)) {
            mass += p[i];
            weighted += p[i] * x[i];
        }
        if (mass > 0.0) {
            out[b] = weighted / mass;
        } else if (policy == ZeroBlockPolicy::fill_with_unconditional) {
            out[b] = expectation(p, x);
        } else {
            throw ZeroMassBlockError(b, "conditioning block " + std::to_string(b) +
                                            " has zero mass under the measure");
        }
    }
    return out;
}

RandomVariable conditional_expectation(const Measure& p, const RandomVariable& x,
                                       const PartitionAlgebra& c, ZeroBlockPolicy policy)
{
    return c.broadcast(block_conditional_means(p, x, c, policy));
}

Measure mix(const MeasureSet& ms, const MixtureWeights& w)
{
    require_same_size(w.size(), ms.size(), "mix");
    std::vector<double> out(ms.space_size(), 0.0);
    for (Index k = 0; k < ms.size(); ++k) {
        if (w[k] == 0.0)
            continue;
        for (Index i = 0; i < out.size(); ++i)
            out[i] += w[k] * ms[k][i];
    }
    return Measure::from_unnormalized(std::move(out));
}

Measure reference_measure(const MeasureSet& ms)
{
    return mix(ms, MixtureWeights::uniform(ms.size()));
}

bool is_proper(const MeasureSet& ms)
{
    const Measure p0 = reference_measure(ms);
    for (const auto& g : ms.generators())
        for (Index i = 0; i < g.size(); ++i)
            if (p0[i] > 0.0 && !(g[i] > 0.0))
                return false;
    return true;
}

bool is_strictly_comparable(const MeasureSet& ms)
{
    for (const auto& g : ms.generators())
        if (!g.strictly_positive())
            return false;
    return true;
}

RandomVariable density(const Measure& p, const Measure& p0)
{
    require_same_size(p.size(), p0.size(), "density");
    std::vector<double> out(p.size());
    for (Index i = 0; i < p.size(); ++i) {
        if (p0[i] == 0.0) {
            if (p[i] != 0.0)
                throw AbsoluteContinuityError("measure charges point " + std::to_string(i) +
                                              " which the reference measure does not");
            out[i] = 0.0;
        } else {
            out[i] = p[i] / p0[i];
        }
    }
    return RandomVariable(std::move(out));
}

} // namespace mmse
