#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mmse::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// Phase-one residual (sum of artificial variables) at termination.
    double infeasibility = 0.0;
    int pivots = 0;
};

/// Dense two-phase tableau simplex with Bland's rule.
///
///     minimize c'x  subject to  A x = b,  x >= 0
///
/// `tol` is the phase-one feasibility threshold, scaled by 1 + max|b|.
Result solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
             double tol = 1e-9);

struct HullMembership {
    bool member = false;
    /// Minimal L1 distance between `target` and the hull, over the point coordinates.
    double residual = 0.0;
    /// Simplex weights realizing the closest hull point.
    std::vector<double> weights;
};

/// Decides whether `target` lies in conv{points} within `tol` (scaled by the data magnitude).
HullMembership convex_hull_membership(const std::vector<std::vector<double>>& points,
                                      std::span<const double> target, double tol = 1e-9);

} // namespace mmse::lp
