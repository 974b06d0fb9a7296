#include "mmse/lp.hpp"

#include <cmath>
#include <limits>

#include "mmse/errors.hpp"

namespace mmse::lp {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr int kMaxPivots = 100000;

class Tableau {
public:
    Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows) {}

    Eigen::Index rows() const { return t_.rows() - 1; }
    Eigen::Index cols() const { return t_.cols() - 1; }
    double& at(Eigen::Index i, Eigen::Index j) { return t_(i, j); }
    double& rhs(Eigen::Index i) { return t_(i, cols()); }
    double& cost(Eigen::Index j) { return t_(rows(), j); }
    double& objective() { return t_(rows(), cols()); }
    std::vector<Eigen::Index>& basis() { return basis_; }

    void pivot(Eigen::Index r, Eigen::Index col)
    {
        t_.row(r) /= t_(r, col);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == r)
                continue;
            const double f = t_(i, col);
            if (f != 0.0)
                t_.row(i) -= f * t_.row(r);
        }
        basis_[static_cast<std::size_t>(r)] = col;
    }

    /// Runs simplex iterations over columns [0, allowed). Returns false if unbounded.
    bool iterate(Eigen::Index allowed, int& pivots)
    {
        for (;;) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j) {
                if (cost(j) < -kPivotEps) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0)
                return true;

            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows(); ++i) {
                const double a = at(i, enter);
                if (a <= kPivotEps)
                    continue;
                const double ratio = rhs(i) / a;
                if (ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0)
                return false;
            pivot(leave, enter);
            if (++pivots > kMaxPivots)
                throw InternalError("simplex pivot limit exceeded");
        }
    }

private:
    Eigen::MatrixXd t_;
    std::vector<Eigen::Index> basis_;
};

} // namespace

Result solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c, double tol)
{
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (b.size() != m || c.size() != n)
        throw StructuralError("lp::solve: inconsistent dimensions");

    Result result;
    Tableau tab(m, n + m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        for (Eigen::Index j = 0; j < n; ++j)
            tab.at(i, j) = sign * a(i, j);
        tab.at(i, n + i) = 1.0;
        tab.rhs(i) = sign * b(i);
        tab.basis()[static_cast<std::size_t>(i)] = n + i;
    }

    // Phase one: minimize the sum of artificials.
    for (Eigen::Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            s += tab.at(i, j);
        tab.cost(j) = -s;
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        total += tab.rhs(i);
    tab.objective() = -total;
    tab.iterate(n + m, result.pivots);

    result.infeasibility = -tab.objective();
    const double scale = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
    if (result.infeasibility > tol * scale) {
        result.status = Status::infeasible;
        return result;
    }

    // Drive artificials out of the basis where possible; rows that cannot pivot are redundant.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis()[static_cast<std::size_t>(i)] < n)
            continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(tab.at(i, j)) > kPivotEps) {
                tab.pivot(i, j);
                break;
            }
        }
    }

    // Phase two.
    for (Eigen::Index j = 0; j <= n + m; ++j)
        tab.cost(j) = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        tab.cost(j) = c(j);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
        const double cb = bj < n ? c(bj) : 0.0;
        if (cb == 0.0)
            continue;
        for (Eigen::Index j = 0; j < n + m; ++j)
            tab.cost(j) -= cb * tab.at(i, j);
        tab.objective() -= cb * tab.rhs(i);
    }
    if (!tab.iterate(n, result.pivots)) {
        result.status = Status::unbounded;
        return result;
    }

    result.status = Status::optimal;
    result.objective = -tab.objective();
    result.x.assign(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
        if (bj < n)
            result.x[static_cast<std::size_t>(bj)] = std::max(0.0, tab.rhs(i));
    }
    return result;
}

HullMembership convex_hull_membership(const std::vector<std::vector<double>>& points,
                                      std::span<const double> target, double tol)
{
    if (points.empty())
        throw ArgumentError("hull membership over an empty point set");
    const auto k = static_cast<Eigen::Index>(points.size());
    const auto d = static_cast<Eigen::Index>(target.size());
    for (const auto& p : points)
        if (static_cast<Eigen::Index>(p.size()) != d)
            throw StructuralError("hull membership: point dimension mismatch");

    // Variables: mu (k), r+ (d), r- (d).  Rows: sum_k mu_k p_k + r+ - r- = target; sum mu = 1.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d + 1, k + 2 * d);
    Eigen::VectorXd b(d + 1);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(k + 2 * d);
    double scale = 1.0;
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index j = 0; j < k; ++j) {
            const double v = points[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
            a(r, j) = v;
            scale = std::max(scale, std::abs(v));
        }
        a(r, k + r) = 1.0;
        a(r, k + d + r) = -1.0;
        b(r) = target[static_cast<std::size_t>(r)];
        scale = std::max(scale, std::abs(b(r)));
        c(k + r) = 1.0;
        c(k + d + r) = 1.0;
    }
    for (Eigen::Index j = 0; j < k; ++j)
        a(d, j) = 1.0;
    b(d) = 1.0;

    const Result lp = solve(a, b, c, tol);
    if (lp.status != Status::optimal)
        throw InternalError("hull membership LP is always feasible and bounded");

    HullMembership out;
    out.residual = lp.objective;
    out.member = lp.objective <= tol * scale;
    out.weights.assign(lp.x.begin(), lp.x.begin() + k);
    return out;
}

} // namespace mmse::lp
