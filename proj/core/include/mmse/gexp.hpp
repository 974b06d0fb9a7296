#pragma once

#include <vector>

#include "mmse/estimator.hpp"
#include "mmse/measures.hpp"
#include "mmse/space.hpp"

namespace mmse {

/// Non-recombining binary tree with an up-move probability interval at each internal node.
///
/// Nodes use heap order: root 0, up child 2v+1, down child 2v+2. Leaf j (0 <= j < 2^T) is the
/// path whose bits, most significant first, are the moves (0 = up).
class TreeModel {
public:
    /// Same interval at every node.
    TreeModel(int depth, double q_lo, double q_hi, double dt = 0.25);
    TreeModel(int depth, std::vector<double> q_lo, std::vector<double> q_hi, double dt = 0.25);
    /// Interval (1 -+ sqrt(dt)) / 2 at every node.
    static TreeModel girsanov(int depth, double dt = 0.25);

    int depth() const noexcept { return depth_; }
    double dt() const noexcept { return dt_; }
    std::size_t internal_nodes() const noexcept { return q_lo_.size(); }
    std::size_t leaves() const noexcept { return q_lo_.size() + 1; }
    const std::vector<double>& q_lo() const noexcept { return q_lo_; }
    const std::vector<double>& q_hi() const noexcept { return q_hi_; }

    /// Partition of the leaves by the node reached after `level` moves.
    PartitionAlgebra level_partition(int level) const;
    /// Levels 0..T.
    Filtration filtration() const;

private:
    int depth_;
    double dt_;
    std::vector<double> q_lo_;
    std::vector<double> q_hi_;
};

inline constexpr int kTreeMaxDepth = 6;
inline constexpr std::size_t kTreeMaxCorners = std::size_t{1} << 16;

/// All corner measures: each non-degenerate node independently at q_lo or q_hi. Corner m sets
/// the j-th non-degenerate node (heap order) to q_hi iff bit j of m is set. Refuses depth above
/// kTreeMaxDepth or more than kTreeMaxCorners corners.
MeasureSet tree_measure_set(const TreeModel& tm);

struct GExpResult {
    std::vector<double> y;  ///< per node, heap order
    std::vector<double> z;  ///< per internal node

    /// y at the nodes after `level` moves, broadcast to the leaves below them.
    RandomVariable level_values(const TreeModel& tm, int level) const;
};

/// Backward recursion y = max over q in {q_lo, q_hi} of q y_up + (1 - q) y_down,
/// z = (y_up - y_down) / (2 sqrt(dt)).
GExpResult g_expectation(const TreeModel& tm, const std::vector<double>& xi_leaf);

/// Same recursion with min in place of max.
GExpResult g_expectation_lower(const TreeModel& tm, const std::vector<double>& xi_leaf);

struct GExpComparison {
    RandomVariable gexp_cond;
    RandomVariable mmse;
    double sup_diff = 0.0;
    EstimatorResult estimator;
};

/// Conditional g-expectation vs the estimator at a level 0 <= level < T.
GExpComparison compare_gexp_mmse(const TreeModel& tm, const std::vector<double>& xi_leaf, int level,
                                 const SolverConfig& cfg = {});

} // namespace mmse
