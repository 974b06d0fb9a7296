#include "mmse/sublinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mmse/errors.hpp"

namespace mmse {

RhoValue rho(const MeasureSet& ms, const RandomVariable& x, double tie_tolerance)
{
    require_same_size(ms.space_size(), x.size(), "rho");
    std::vector<double> values(ms.size());
    for (Index k = 0; k < ms.size(); ++k)
        values[k] = expectation(ms[k], x);

    RhoValue out;
    const auto best = std::max_element(values.begin(), values.end());
    out.value = *best;
    out.argmax_generator = static_cast<Index>(best - values.begin());
    for (Index k = 0; k < values.size(); ++k)
        if (values[k] >= out.value - tie_tolerance)
            out.ties.push_back(k);
    return out;
}

namespace {

template <class Better>
RandomVariable envelope(const MeasureSet& ms, const RandomVariable& x, const PartitionAlgebra& c,
                        Better better)
{
    require_same_size(ms.space_size(), x.size(), "conditional envelope");
    require_same_size(c.space_size(), x.size(), "conditional envelope");
    std::vector<double> out(c.block_count());
    for (Index b = 0; b < c.block_count(); ++b) {
        bool any = false;
        for (const auto& g : ms.generators()) {
            double mass = 0.0, weighted = 0.0;
            for (Index i : c.block(b)) {
                mass += g[i];
                weighted += g[i] * x[i];
            }
            if (!(mass > 0.0))
                continue;
            const double v = weighted / mass;
            if (!any || better(v, out[b]))
                out[b] = v;
            any = true;
        }
        if (!any)
            throw ZeroMassBlockError(b, "block " + std::to_string(b) +
                                            " has zero mass under every generator");
    }
    return c.broadcast(out);
}

} // namespace

RandomVariable ess_sup_conditional(const MeasureSet& ms, const RandomVariable& x,
                                   const PartitionAlgebra& c)
{
    return envelope(ms, x, c, [](double a, double b) { return a > b; });
}

RandomVariable ess_inf_conditional(const MeasureSet& ms, const RandomVariable& x,
                                   const PartitionAlgebra& c)
{
    return envelope(ms, x, c, [](double a, double b) { return a < b; });
}

HolderBound holder_bound(const MeasureSet& ms, const RandomVariable& x1, const RandomVariable& x2,
                         double p, double q)
{
    if (!(p > 1.0) || !(q > 1.0) || std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12)
        throw ArgumentError("Hoelder exponents must satisfy p, q > 1 and 1/p + 1/q = 1");
    HolderBound out;
    out.lhs = rho(ms, abs(x1 * x2)).value;
    const double a = rho(ms, pow(abs(x1), p)).value;
    const double b = rho(ms, pow(abs(x2), q)).value;
    out.rhs = std::pow(a, 1.0 / p) * std::pow(b, 1.0 / q);
    return out;
}

namespace {

bool pointwise_leq(const RandomVariable& x, const RandomVariable& y)
{
    for (Index i = 0; i < x.size(); ++i)
        if (x[i] > y[i])
            return false;
    return true;
}

std::string pair_name(Index a, Index b)
{
    return "samples[" + std::to_string(a) + "], samples[" + std::to_string(b) + "]";
}

} // namespace

AxiomReport axiom_suite(const MeasureSet& ms, const std::vector<RandomVariable>& samples,
                        const std::vector<double>& scalars, double tol)
{
    AxiomReport report;
    auto check = [&](bool ok, const char* axiom, std::string witness, double lhs, double rhs) {
        ++report.checks;
        if (!ok)
            report.violations.push_back({axiom, std::move(witness), lhs, rhs});
    };

    const std::size_t n = ms.space_size();
    std::vector<double> rhos;
    rhos.reserve(samples.size());
    for (const auto& x : samples)
        rhos.push_back(rho(ms, x).value);

    for (double c : scalars) {
        const double r = rho(ms, RandomVariable::constant(n, c)).value;
        check(std::abs(r - c) <= tol, "constant preserving", "c=" + std::to_string(c), r, c);
    }

    for (Index a = 0; a < samples.size(); ++a) {
        for (Index b = 0; b < samples.size(); ++b) {
            if (a != b && pointwise_leq(samples[a], samples[b]))
                check(rhos[a] <= rhos[b] + tol, "monotonicity", pair_name(a, b), rhos[a], rhos[b]);
            if (a <= b) {
                const double sum = rho(ms, samples[a] + samples[b]).value;
                check(sum <= rhos[a] + rhos[b] + tol, "subadditivity", pair_name(a, b), sum,
                      rhos[a] + rhos[b]);
            }
        }
        for (double c : scalars) {
            const double lambda = std::abs(c);
            const double scaled = rho(ms, lambda * samples[a]).value;
            check(std::abs(scaled - lambda * rhos[a]) <= tol * (1.0 + lambda),
                  "positive homogeneity",
                  "samples[" + std::to_string(a) + "], lambda=" + std::to_string(lambda), scaled,
                  lambda * rhos[a]);
        }
    }
    return report;
}

std::vector<RandomVariable> random_axiom_samples(std::size_t n, std::size_t count,
                                                 std::uint64_t seed, double scale)
{
    std::mt19937_64 rng(seed);
    // Top 53 bits mapped onto [0, 1); independent of the standard library's distributions.
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<RandomVariable> out;
    out.reserve(2 * count);
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = scale * (2.0 * unit() - 1.0);
            y[i] = x[i] + scale * unit();
        }
        out.emplace_back(std::move(x));
        out.emplace_back(std::move(y));
    }
    return out;
}

} // namespace mmse
