#include "mmse/gexp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmse/errors.hpp"

namespace mmse {

namespace {

constexpr int kTreeStorageDepth = 20;

std::size_t internal_count(int depth)
{
    if (depth < 1 || depth > kTreeStorageDepth)
        throw ArgumentError("tree depth must lie in [1, " + std::to_string(kTreeStorageDepth) + "]");
    return (std::size_t{1} << depth) - 1;
}

void check_leaf_values(const TreeModel& tm, const std::vector<double>& xi_leaf)
{
    if (xi_leaf.size() != tm.leaves())
        throw StructuralError("tree of depth " + std::to_string(tm.depth()) + " needs " +
                              std::to_string(tm.leaves()) + " leaf values, got " +
                              std::to_string(xi_leaf.size()));
    for (double v : xi_leaf)
        if (!std::isfinite(v))
            throw ArgumentError("leaf values must be finite");
}

template <typename Pick>
GExpResult recurse(const TreeModel& tm, const std::vector<double>& xi_leaf, Pick pick)
{
    check_leaf_values(tm, xi_leaf);
    const std::size_t internal = tm.internal_nodes();
    GExpResult out;
    out.y.assign(2 * internal + 1, 0.0);
    out.z.assign(internal, 0.0);
    std::copy(xi_leaf.begin(), xi_leaf.end(), out.y.begin() + static_cast<std::ptrdiff_t>(internal));
    const double scale = 2.0 * std::sqrt(tm.dt());
    for (std::size_t v = internal; v-- > 0;) {
        const double up = out.y[2 * v + 1];
        const double down = out.y[2 * v + 2];
        const double lo = tm.q_lo()[v] * up + (1.0 - tm.q_lo()[v]) * down;
        const double hi = tm.q_hi()[v] * up + (1.0 - tm.q_hi()[v]) * down;
        out.y[v] = pick(lo, hi);
        out.z[v] = (up - down) / scale;
    }
    return out;
}

} // namespace

TreeModel::TreeModel(int depth, double q_lo, double q_hi, double dt)
    : TreeModel(depth, std::vector<double>(internal_count(depth), q_lo),
                std::vector<double>(internal_count(depth), q_hi), dt)
{
}

TreeModel::TreeModel(int depth, std::vector<double> q_lo, std::vector<double> q_hi, double dt)
    : depth_(depth), dt_(dt), q_lo_(std::move(q_lo)), q_hi_(std::move(q_hi))
{
    const std::size_t internal = internal_count(depth);
    if (q_lo_.size() != internal || q_hi_.size() != internal)
        throw StructuralError("tree of depth " + std::to_string(depth) + " needs " +
                              std::to_string(internal) + " node intervals");
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ArgumentError("dt must be positive");
    for (std::size_t v = 0; v < internal; ++v)
        if (!(q_lo_[v] > 0.0 && q_lo_[v] <= q_hi_[v] && q_hi_[v] < 1.0))
            throw ArgumentError("node " + std::to_string(v) + ": need 0 < q_lo <= q_hi < 1");
}

TreeModel TreeModel::girsanov(int depth, double dt)
{
    if (!(dt > 0.0 && dt < 1.0))
        throw ArgumentError("dt must lie in (0, 1) for the probabilities to stay inside (0, 1)");
    const double h = std::sqrt(dt);
    return TreeModel(depth, (1.0 - h) / 2.0, (1.0 + h) / 2.0, dt);
}

PartitionAlgebra TreeModel::level_partition(int level) const
{
    if (level < 0 || level > depth_)
        throw ArgumentError("tree level must lie in [0, " + std::to_string(depth_) + "]");
    const std::size_t width = std::size_t{1} << (depth_ - level);
    const std::size_t count = std::size_t{1} << level;
    std::vector<std::vector<Index>> blocks(count);
    for (std::size_t b = 0; b < count; ++b)
        for (std::size_t j = 0; j < width; ++j)
            blocks[b].push_back(b * width + j);
    return PartitionAlgebra(leaves(), std::move(blocks));
}

Filtration TreeModel::filtration() const
{
    std::vector<PartitionAlgebra> levels;
    for (int t = 0; t <= depth_; ++t)
        levels.push_back(level_partition(t));
    return Filtration(std::move(levels));
}

MeasureSet tree_measure_set(const TreeModel& tm)
{
    if (tm.depth() > kTreeMaxDepth)
        throw GuardRefusal("corner enumeration is limited to depth " + std::to_string(kTreeMaxDepth) +
                           ", got " + std::to_string(tm.depth()));
    std::vector<std::size_t> free_nodes;
    for (std::size_t v = 0; v < tm.internal_nodes(); ++v)
        if (tm.q_lo()[v] < tm.q_hi()[v])
            free_nodes.push_back(v);
    if (free_nodes.size() > 16)
        throw GuardRefusal("tree has 2^" + std::to_string(free_nodes.size()) +
                           " corner measures; the limit is " + std::to_string(kTreeMaxCorners));

    const std::size_t corners = std::size_t{1} << free_nodes.size();
    const std::size_t internal = tm.internal_nodes();
    std::vector<Measure> gens;
    gens.reserve(corners);
    std::vector<double> q(internal);
    std::vector<double> node_mass(2 * internal + 1);
    for (std::size_t mask = 0; mask < corners; ++mask) {
        q = tm.q_lo();
        for (std::size_t j = 0; j < free_nodes.size(); ++j)
            if (mask >> j & 1U)
                q[free_nodes[j]] = tm.q_hi()[free_nodes[j]];
        node_mass[0] = 1.0;
        for (std::size_t v = 0; v < internal; ++v) {
            node_mass[2 * v + 1] = node_mass[v] * q[v];
            node_mass[2 * v + 2] = node_mass[v] * (1.0 - q[v]);
        }
        gens.push_back(Measure::from_unnormalized(
            std::vector<double>(node_mass.begin() + static_cast<std::ptrdiff_t>(internal), node_mass.end())));
    }
    return MeasureSet(std::move(gens));
}

RandomVariable GExpResult::level_values(const TreeModel& tm, int level) const
{
    if (level < 0 || level > tm.depth())
        throw ArgumentError("tree level must lie in [0, " + std::to_string(tm.depth()) + "]");
    const std::size_t first = (std::size_t{1} << level) - 1;
    const std::size_t width = std::size_t{1} << (tm.depth() - level);
    std::vector<double> out(tm.leaves());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = y[first + j / width];
    return RandomVariable(std::move(out));
}

GExpResult g_expectation(const TreeModel& tm, const std::vector<double>& xi_leaf)
{
    return recurse(tm, xi_leaf, [](double a, double b) { return std::max(a, b); });
}

GExpResult g_expectation_lower(const TreeModel& tm, const std::vector<double>& xi_leaf)
{
    return recurse(tm, xi_leaf, [](double a, double b) { return std::min(a, b); });
}

GExpComparison compare_gexp_mmse(const TreeModel& tm, const std::vector<double>& xi_leaf, int level,
                                 const SolverConfig& cfg)
{
    if (level < 0 || level >= tm.depth())
        throw ArgumentError("comparison level must lie in [0, " + std::to_string(tm.depth() - 1) + "]");
    GExpComparison out;
    out.gexp_cond = g_expectation(tm, xi_leaf).level_values(tm, level);
    out.estimator = solve_mmse(tree_measure_set(tm), RandomVariable(xi_leaf), tm.level_partition(level), cfg);
    out.mmse = out.estimator.eta_hat;
    for (Index i = 0; i < xi_leaf.size(); ++i)
        out.sup_diff = std::max(out.sup_diff, std::abs(out.gexp_cond[i] - out.mmse[i]));
    return out;
}

} // namespace mmse
