#include "mmse/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "mmse/errors.hpp"
#include "mmse/lp.hpp"
#include "mmse/stability.hpp"

namespace mmse {

const char* to_string(SolverKind kind)
{
    return kind == SolverKind::saddle_iteration ? "saddle_iteration" : "brute_force";
}

const char* to_string(SolveStatus status)
{
    return status == SolveStatus::converged ? "converged" : "max_iterations";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Euclidean projection onto the probability simplex.
VectorXd project_simplex(const VectorXd& v)
{
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0)
            theta = candidate;
    }
    return (v.array() - theta).max(0.0).matrix();
}

VectorXd normalized(VectorXd v)
{
    v = v.cwiseMax(0.0);
    const double s = v.sum();
    if (!(s > 0.0))
        return VectorXd::Constant(v.size(), 1.0 / static_cast<double>(v.size()));
    return v / s;
}

/// One point of the dual iteration together with its primal response.
struct Iterate {
    VectorXd lambda;
    std::vector<double> eta;  // per block
    VectorXd losses;          // E_k[(xi - eta)^2]
    double phi = 0.0;         // lambda . losses
    double gap = kInf;        // max losses - phi
};

class DualProblem {
public:
    DualProblem(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c)
        : ms_(ms), xi_(xi), c_(c), k_(static_cast<Eigen::Index>(ms.size())),
          b_(static_cast<Eigen::Index>(c.block_count())), mass_(k_, b_), first_(k_, b_),
          second_(k_, b_)
    {
        for (Eigen::Index k = 0; k < k_; ++k) {
            const Measure& g = ms[static_cast<Index>(k)];
            for (Eigen::Index b = 0; b < b_; ++b) {
                double m = 0.0, s1 = 0.0, s2 = 0.0;
                for (Index i : c.block(static_cast<Index>(b))) {
                    m += g[i];
                    s1 += g[i] * xi[i];
                    s2 += g[i] * xi[i] * xi[i];
                }
                mass_(k, b) = m;
                first_(k, b) = s1;
                second_(k, b) = s2;
            }
        }
        fallback_ = block_conditional_means(reference_measure(ms), xi, c);
        scale_ = 1.0 + xi.bound() * xi.bound();
    }

    Eigen::Index generators() const { return k_; }
    Eigen::Index blocks() const { return b_; }
    double scale() const { return scale_; }

    std::vector<double> eta_for(const VectorXd& lambda) const
    {
        std::vector<double> eta(static_cast<std::size_t>(b_));
        for (Eigen::Index b = 0; b < b_; ++b) {
            const double den = lambda.dot(mass_.col(b));
            eta[static_cast<std::size_t>(b)] =
                den > 0.0 ? lambda.dot(first_.col(b)) / den : fallback_[static_cast<std::size_t>(b)];
        }
        return eta;
    }

    VectorXd losses(const std::vector<double>& eta) const
    {
        VectorXd out(k_);
        for (Eigen::Index k = 0; k < k_; ++k) {
            const Measure& g = ms_[static_cast<Index>(k)];
            double s = 0.0;
            for (Index i = 0; i < xi_.size(); ++i) {
                const double r = xi_[i] - eta[c_.block_of(i)];
                s += g[i] * r * r;
            }
            out(k) = s;
        }
        return out;
    }

    Iterate evaluate(VectorXd lambda) const
    {
        Iterate it;
        it.lambda = std::move(lambda);
        it.eta = eta_for(it.lambda);
        it.losses = losses(it.eta);
        it.phi = it.lambda.dot(it.losses);
        it.gap = std::max(0.0, it.losses.maxCoeff() - it.phi);
        return it;
    }

    /// Newton's method on the saddle-point system restricted to candidate active sets.
    std::optional<Iterate> polish(const Iterate& from, double tol) const
    {
        const double top = from.losses.maxCoeff();
        for (double delta : {1e-1, 1e-2, 1e-4, 1e-6, 1e-9}) {
            std::vector<Eigen::Index> active;
            for (Eigen::Index k = 0; k < k_; ++k)
                if (from.losses(k) >= top - delta * scale_)
                    active.push_back(k);
            auto candidate = solve_active(std::move(active), from.lambda);
            if (candidate && candidate->gap <= tol && candidate->gap <= from.gap)
                return candidate;
        }
        return std::nullopt;
    }

private:
    double piece(Eigen::Index k, const VectorXd& eta) const
    {
        double s = 0.0;
        for (Eigen::Index b = 0; b < b_; ++b)
            s += second_(k, b) - 2.0 * eta(b) * first_(k, b) + eta(b) * eta(b) * mass_(k, b);
        return s;
    }

    // Unknowns z = (eta[0..B), lambda_A, t). Equations:
    //   sum_a lambda_a (m_aB eta_B - s1_aB) = 0     (stationarity in eta)
    //   f_a(eta) - t = 0                            (active pieces level)
    //   sum_a lambda_a - 1 = 0
    std::optional<Iterate> solve_active(std::vector<Eigen::Index> active, VectorXd lambda0) const
    {
        for (Eigen::Index round = 0; round < 2 * k_ + 2; ++round) {
            if (active.empty())
                return std::nullopt;
            const auto na = static_cast<Eigen::Index>(active.size());
            const Eigen::Index n = b_ + na + 1;

            VectorXd lam(na);
            for (Eigen::Index a = 0; a < na; ++a)
                lam(a) = std::max(0.0, lambda0(active[static_cast<std::size_t>(a)]));
            lam = normalized(lam);
            VectorXd full = VectorXd::Zero(k_);
            for (Eigen::Index a = 0; a < na; ++a)
                full(active[static_cast<std::size_t>(a)]) = lam(a);
            const auto eta0 = eta_for(full);

            VectorXd z(n);
            for (Eigen::Index b = 0; b < b_; ++b)
                z(b) = eta0[static_cast<std::size_t>(b)];
            z.segment(b_, na) = lam;
            double t0 = -kInf;
            for (Eigen::Index a = 0; a < na; ++a)
                t0 = std::max(t0, piece(active[static_cast<std::size_t>(a)], z.head(b_)));
            z(n - 1) = t0;

            VectorXd r(n);
            MatrixXd jac(n, n);
            double residual = kInf;
            for (int iter = 0; iter < 60; ++iter) {
                const VectorXd eta = z.head(b_);
                r.setZero();
                jac.setZero();
                for (Eigen::Index b = 0; b < b_; ++b) {
                    for (Eigen::Index a = 0; a < na; ++a) {
                        const Eigen::Index k = active[static_cast<std::size_t>(a)];
                        const double dm = mass_(k, b) * eta(b) - first_(k, b);
                        r(b) += z(b_ + a) * dm;
                        jac(b, b) += z(b_ + a) * mass_(k, b);
                        jac(b, b_ + a) = dm;
                        jac(b_ + a, b) = 2.0 * dm;
                    }
                }
                for (Eigen::Index a = 0; a < na; ++a) {
                    r(b_ + a) = piece(active[static_cast<std::size_t>(a)], eta) - z(n - 1);
                    jac(b_ + a, n - 1) = -1.0;
                    jac(n - 1, b_ + a) = 1.0;
                }
                r(n - 1) = z.segment(b_, na).sum() - 1.0;
                residual = r.cwiseAbs().maxCoeff();
                if (residual <= 1e-15 * scale_)
                    break;
                const VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
                if (!step.allFinite())
                    return std::nullopt;
                z += step;
                if (step.cwiseAbs().maxCoeff() <= 1e-16 * (1.0 + z.cwiseAbs().maxCoeff()))
                    break;
            }
            if (!(residual <= 1e-9 * scale_))
                return std::nullopt;

            const VectorXd lam_a = z.segment(b_, na);
            Eigen::Index worst = 0;
            const double most_negative = lam_a.minCoeff(&worst);
            VectorXd current = VectorXd::Zero(k_);
            for (Eigen::Index a = 0; a < na; ++a)
                current(active[static_cast<std::size_t>(a)]) = std::max(0.0, lam_a(a));
            if (most_negative < -1e-10) {
                active.erase(active.begin() + worst);
                lambda0 = current;
                continue;
            }

            const VectorXd eta = z.head(b_);
            Eigen::Index violator = -1;
            double violation = 1e-12 * scale_;
            for (Eigen::Index k = 0; k < k_; ++k) {
                if (std::find(active.begin(), active.end(), k) != active.end())
                    continue;
                const double excess = piece(k, eta) - z(n - 1);
                if (excess > violation) {
                    violation = excess;
                    violator = k;
                }
            }
            if (violator >= 0) {
                active.push_back(violator);
                std::sort(active.begin(), active.end());
                lambda0 = current;
                continue;
            }
            return evaluate(normalized(current));
        }
        return std::nullopt;
    }

    const MeasureSet& ms_;
    const RandomVariable& xi_;
    const PartitionAlgebra& c_;
    Eigen::Index k_;
    Eigen::Index b_;
    MatrixXd mass_;
    MatrixXd first_;
    MatrixXd second_;
    std::vector<double> fallback_;
    double scale_ = 1.0;
};

void require_charged_blocks(const MeasureSet& ms, const PartitionAlgebra& c)
{
    const Measure p0 = reference_measure(ms);
    for (Index b = 0; b < c.block_count(); ++b)
        if (!(p0.mass(c.block(b)) > 0.0))
            throw ZeroMassBlockError(b, "block " + std::to_string(b) +
                                            " has zero mass under every generator");
}

std::vector<std::string> standard_warnings(const MeasureSet& ms, bool proper)
{
    std::vector<std::string> warnings = ms.warnings();
    if (!proper)
        warnings.emplace_back("measure set is not proper: solution may be non-unique");
    return warnings;
}

EstimatorResult finish(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                       const Iterate& it, EstimatorResult result)
{
    result.eta_hat = truncate(c.broadcast(it.eta), xi.bound());
    result.p_hat = MixtureWeights(std::vector<double>(it.lambda.data(), it.lambda.data() + it.lambda.size()));
    result.alpha = worst_case_mse(ms, xi, result.eta_hat);
    result.saddle_gap = it.gap;
    return result;
}

} // namespace

double worst_case_mse(const MeasureSet& ms, const RandomVariable& xi, const RandomVariable& eta)
{
    return rho(ms, square(xi - eta)).value;
}

EstimatorResult solve_mmse(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                           const SolverConfig& cfg)
{
    require_same_size(ms.space_size(), xi.size(), "solve_mmse");
    require_same_size(c.space_size(), xi.size(), "solve_mmse");
    if (!(cfg.tol > 0.0))
        throw ArgumentError("solver tolerance must be positive");
    require_charged_blocks(ms, c);

    EstimatorResult result;
    result.solver = SolverKind::saddle_iteration;
    result.proper = is_proper(ms);
    result.warnings = standard_warnings(ms, result.proper);

    const DualProblem problem(ms, xi, c);
    const Eigen::Index k = problem.generators();

    // Already measurable: the dual is flat and any measure certifies.
    if (is_measurable(xi, c)) {
        Iterate it = problem.evaluate(VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
        it.eta = c.collapse(xi);
        it.gap = 0.0;
        return finish(ms, xi, c, it, std::move(result));
    }

    VectorXd start = VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    if (cfg.initial_weights) {
        require_same_size(cfg.initial_weights->size(), static_cast<std::size_t>(k), "initial weights");
        start = project_simplex(Eigen::Map<const VectorXd>(cfg.initial_weights->data(), k));
    }

    Iterate current = problem.evaluate(start);
    Iterate best = current;
    VectorXd y = current.lambda;
    double momentum = 1.0;
    double lipschitz = 1.0;
    double last_polish_gap = kInf;

    int iter = 0;
    while (best.gap > cfg.tol && iter < cfg.max_iter) {
        ++iter;
        const Iterate at_y = problem.evaluate(y);
        Iterate candidate;
        for (int tries = 0;; ++tries) {
            candidate = problem.evaluate(project_simplex(y + at_y.losses / lipschitz));
            const VectorXd d = candidate.lambda - y;
            const double model = at_y.phi + at_y.losses.dot(d) - 0.5 * lipschitz * d.squaredNorm();
            if (candidate.phi >= model - 1e-15 * problem.scale() || tries > 60)
                break;
            lipschitz *= 2.0;
        }

        if (candidate.phi < current.phi) {
            // Function-value restart: drop the momentum and step again from the current point.
            y = current.lambda;
            momentum = 1.0;
        } else {
            const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            y = project_simplex(candidate.lambda +
                                ((momentum - 1.0) / next) * (candidate.lambda - current.lambda));
            momentum = next;
            current = std::move(candidate);
            if (current.gap < best.gap)
                best = current;
        }
        lipschitz = std::max(1e-12, 0.9 * lipschitz);

        if (cfg.polish && best.gap > cfg.tol && (best.gap < 0.1 * last_polish_gap || iter % 250 == 0)) {
            last_polish_gap = best.gap;
            if (auto polished = problem.polish(best, cfg.tol)) {
                best = std::move(*polished);
                break;
            }
        }
    }

    result.iterations = iter;
    result.status = best.gap <= cfg.tol ? SolveStatus::converged : SolveStatus::max_iterations;
    if (!result.converged())
        result.warnings.push_back("dual iteration stopped at max_iter before reaching the gap tolerance");
    return finish(ms, xi, c, best, std::move(result));
}

namespace {

/// Nested minimization of F(eta) = max_k sum_B q_kB(eta_B) over [-M, M]^B, where
/// q_kB(x) = m_kB x^2 - 2 s1_kB x + s2_kB.
class NestedOracle {
public:
    NestedOracle(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                 double outer_tol)
        : k_(ms.size()), b_(c.block_count()), bound_(xi.bound()), outer_tol_(outer_tol),
          inner_tol_(1e-10 * (1.0 + xi.bound())), quad_(k_ * b_ * 3, 0.0)
    {
        for (Index k = 0; k < k_; ++k)
            for (Index b = 0; b < b_; ++b)
                for (Index i : c.block(b)) {
                    const double w = ms[k][i];
                    coef(k, b, 0) += w;
                    coef(k, b, 1) += -2.0 * w * xi[i];
                    coef(k, b, 2) += w * xi[i] * xi[i];
                }
    }

    std::vector<double> minimize()
    {
        std::vector<double> eta(b_, 0.0);
        descend(0, eta);
        return eta;
    }

    long evaluations() const { return evaluations_; }

private:
    double& coef(Index k, Index b, int p) { return quad_[(k * b_ + b) * 3 + static_cast<Index>(p)]; }
    double coef(Index k, Index b, int p) const { return quad_[(k * b_ + b) * 3 + static_cast<Index>(p)]; }

    double part(Index k, Index b, double x) const
    {
        return (coef(k, b, 0) * x + coef(k, b, 1)) * x + coef(k, b, 2);
    }

    /// Minimizes over coordinates [level, B) with eta[0, level) fixed; leaves the argmin in eta.
    double descend(Index level, std::vector<double>& eta)
    {
        if (level + 1 == b_)
            return exact_last(eta);

        auto h = [&](double x) {
            eta[level] = x;
            return descend(level + 1, eta);
        };
        const double tol = level == 0 ? outer_tol_ : inner_tol_;
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = -bound_, hi = bound_;
        double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
        double f1 = h(x1), f2 = h(x2);
        double best_x = f1 <= f2 ? x1 : x2, best_f = std::min(f1, f2);
        while (hi - lo > tol) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = h(x1);
                if (f1 < best_f) {
                    best_f = f1;
                    best_x = x1;
                }
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = h(x2);
                if (f2 < best_f) {
                    best_f = f2;
                    best_x = x2;
                }
            }
        }
        for (double edge : {-bound_, bound_}) {
            const double fe = h(edge);
            if (fe < best_f) {
                best_f = fe;
                best_x = edge;
            }
        }
        return h(best_x);
    }

    /// Exact minimization of a max of convex quadratics in the last coordinate: the minimum sits
    /// at a box edge, at a single piece's vertex, or where two pieces cross.
    double exact_last(std::vector<double>& eta)
    {
        const Index last = b_ - 1;
        std::vector<double> a(k_), b(k_), c(k_);
        for (Index k = 0; k < k_; ++k) {
            double fixed = 0.0;
            for (Index j = 0; j < last; ++j)
                fixed += part(k, j, eta[j]);
            a[k] = coef(k, last, 0);
            b[k] = coef(k, last, 1);
            c[k] = coef(k, last, 2) + fixed;
        }
        std::vector<double> candidates{-bound_, bound_};
        for (Index k = 0; k < k_; ++k)
            if (a[k] > 0.0)
                candidates.push_back(-b[k] / (2.0 * a[k]));
        for (Index i = 0; i < k_; ++i) {
            for (Index j = i + 1; j < k_; ++j) {
                const double qa = a[i] - a[j], qb = b[i] - b[j], qc = c[i] - c[j];
                if (std::abs(qa) <= 1e-300) {
                    if (qb != 0.0)
                        candidates.push_back(-qc / qb);
                    continue;
                }
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc < 0.0)
                    continue;
                const double sq = std::sqrt(disc);
                // Numerically stable root pair.
                const double q = -0.5 * (qb + std::copysign(sq, qb));
                candidates.push_back(q / qa);
                if (q != 0.0)
                    candidates.push_back(qc / q);
            }
        }
        double best_x = 0.0, best_f = kInf;
        for (double x : candidates) {
            if (!std::isfinite(x))
                continue;
            x = std::clamp(x, -bound_, bound_);
            double f = -kInf;
            for (Index k = 0; k < k_; ++k)
                f = std::max(f, (a[k] * x + b[k]) * x + c[k]);
            ++evaluations_;
            if (f < best_f || (f == best_f && x < best_x)) {
                best_f = f;
                best_x = x;
            }
        }
        eta[last] = best_x;
        return best_f;
    }

    Index k_;
    Index b_;
    double bound_;
    double outer_tol_;
    double inner_tol_;
    std::vector<double> quad_;
    long evaluations_ = 0;
};

} // namespace

EstimatorResult brute_force_mmse(const MeasureSet& ms, const RandomVariable& xi,
                                 const PartitionAlgebra& c, double grid_step)
{
    require_same_size(ms.space_size(), xi.size(), "brute_force_mmse");
    require_same_size(c.space_size(), xi.size(), "brute_force_mmse");
    if (c.block_count() > kBruteForceMaxBlocks)
        throw GuardRefusal("brute_force_mmse handles at most " + std::to_string(kBruteForceMaxBlocks) +
                           " blocks, got " + std::to_string(c.block_count()));
    if (!(grid_step > 0.0))
        throw ArgumentError("grid_step must be positive");
    require_charged_blocks(ms, c);

    NestedOracle oracle(ms, xi, c, grid_step / 100.0);
    const auto eta = oracle.minimize();

    EstimatorResult result;
    result.solver = SolverKind::brute_force;
    result.proper = is_proper(ms);
    result.warnings = standard_warnings(ms, result.proper);
    result.eta_hat = c.broadcast(eta);
    const RhoValue worst = rho(ms, square(xi - result.eta_hat));
    result.alpha = worst.value;
    result.p_hat = MixtureWeights::vertex(ms.size(), worst.argmax_generator);
    result.iterations = static_cast<int>(std::min<long>(oracle.evaluations(), std::numeric_limits<int>::max()));
    return result;
}

Certificate verify_saddle(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                          const EstimatorResult& result, double tol)
{
    const Measure p_hat = mix(ms, result.p_hat);
    const RandomVariable residual = square(xi - result.eta_hat);
    Certificate cert;
    cert.max_over_p = rho(ms, residual).value;
    cert.value_at_saddle = expectation(p_hat, residual);
    const RandomVariable projection = conditional_expectation(p_hat, xi, c);
    cert.min_over_eta = expectation(p_hat, square(xi - projection));
    cert.tolerance = tol * (1.0 + result.alpha);
    cert.passed = cert.max_over_p <= cert.value_at_saddle + cert.tolerance &&
                  cert.value_at_saddle <= cert.min_over_eta + cert.tolerance;
    return cert;
}

namespace {

/// Rows k: (E_k[(xi - eta) 1_B])_B.
std::vector<std::vector<double>> block_cross_moments(const MeasureSet& ms, const RandomVariable& xi,
                                                     const PartitionAlgebra& c,
                                                     const RandomVariable& eta)
{
    std::vector<std::vector<double>> rows(ms.size(), std::vector<double>(c.block_count(), 0.0));
    for (Index k = 0; k < ms.size(); ++k)
        for (Index i = 0; i < xi.size(); ++i)
            rows[k][c.block_of(i)] += ms[k][i] * (xi[i] - eta[i]);
    return rows;
}

void require_measurable(const RandomVariable& eta, const PartitionAlgebra& c, const char* what)
{
    if (!is_measurable(eta, c))
        throw ArgumentError(std::string(what) + " must be measurable with respect to the partition");
}

} // namespace

bool kernel_member(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                   const RandomVariable& eta_tilde, double tol)
{
    require_same_size(ms.space_size(), xi.size(), "kernel_member");
    require_same_size(eta_tilde.size(), xi.size(), "kernel_member");
    require_measurable(eta_tilde, c, "eta_tilde");
    const auto rows = block_cross_moments(ms, xi, c, eta_tilde);
    const std::vector<double> origin(c.block_count(), 0.0);
    return lp::convex_hull_membership(rows, origin, tol).member;
}

KernelInterval kernel_interval(const MeasureSet& ms, const RandomVariable& xi,
                               const PartitionAlgebra& c, const Filtration* filtration)
{
    KernelInterval out{ess_inf_conditional(ms, xi, c), ess_sup_conditional(ms, xi, c), false};
    if (filtration != nullptr) {
        const auto& levels = filtration->levels();
        if (std::find(levels.begin(), levels.end(), c) == levels.end())
            throw ArgumentError("kernel_interval: partition is not a level of the filtration");
        out.exact = is_stable(ms, *filtration).stable;
    }
    return out;
}

NsCondition ns_condition(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                         const RandomVariable& eta_hat, double tol)
{
    require_same_size(ms.space_size(), xi.size(), "ns_condition");
    require_same_size(eta_hat.size(), xi.size(), "ns_condition");
    require_measurable(eta_hat, c, "eta_hat");

    const RandomVariable residual = xi - eta_hat;
    NsCondition out;
    out.rho_sq = rho(ms, square(residual)).value;

    const auto slopes = block_cross_moments(ms, xi, c, eta_hat);
    const std::vector<double> origin(c.block_count(), 0.0);
    if (!lp::convex_hull_membership(slopes, origin).member) {
        out.inf_value = -kInf;
        out.holds = false;
        return out;
    }

    // Epigraph LP over the box: eta = u - M with 0 <= u <= 2M, t = t+ - t-.
    //   minimize t  s.t.  a_k - <u - M, b_k> <= t  for every generator k.
    const auto k = static_cast<Eigen::Index>(ms.size());
    const auto nb = static_cast<Eigen::Index>(c.block_count());
    const double bound = xi.bound();
    const Eigen::Index cols = nb /*u*/ + nb /*box slack*/ + 2 /*t+,t-*/ + k /*row slack*/;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + nb, cols);
    Eigen::VectorXd rhs(k + nb);
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
    cost(2 * nb) = 1.0;
    cost(2 * nb + 1) = -1.0;
    for (Eigen::Index r = 0; r < k; ++r) {
        const double ak = expectation(ms[static_cast<Index>(r)], residual * xi);
        double shift = 0.0;
        for (Eigen::Index b = 0; b < nb; ++b) {
            const double bkb = slopes[static_cast<std::size_t>(r)][static_cast<std::size_t>(b)];
            a(r, b) = -bkb;
            shift += bkb;
        }
        a(r, 2 * nb) = -1.0;
        a(r, 2 * nb + 1) = 1.0;
        a(r, 2 * nb + 2 + r) = 1.0;
        rhs(r) = -ak - bound * shift;
    }
    for (Eigen::Index b = 0; b < nb; ++b) {
        a(k + b, b) = 1.0;
        a(k + b, nb + b) = 1.0;
        rhs(k + b) = 2.0 * bound;
    }
    const lp::Result lp_result = lp::solve(a, rhs, cost);
    if (lp_result.status != lp::Status::optimal)
        throw InternalError("ns_condition: epigraph LP over a nonempty box must be solvable");
    out.inf_value = lp_result.objective;
    out.holds = std::abs(out.inf_value - out.rho_sq) <= tol * (1.0 + std::abs(out.rho_sq));
    return out;
}

std::vector<OptimalityEntry> optimality_ineq(const MeasureSet& ms, const RandomVariable& xi,
                                             const PartitionAlgebra& c,
                                             const RandomVariable& eta_hat,
                                             const std::vector<RandomVariable>& candidates,
                                             double tol)
{
    require_measurable(eta_hat, c, "eta_hat");
    const RandomVariable residual = xi - eta_hat;
    const double rhs = rho(ms, square(residual)).value;
    std::vector<OptimalityEntry> out;
    out.reserve(candidates.size());
    for (const auto& eta : candidates) {
        require_measurable(eta, c, "candidate eta");
        OptimalityEntry e;
        e.lhs = rho(ms, (xi - eta) * residual).value;
        e.rhs = rhs;
        e.margin = e.lhs - e.rhs;
        e.ok = e.margin >= -tol * (1.0 + std::abs(rhs));
        out.push_back(e);
    }
    return out;
}

double penalized_value(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                       const RandomVariable& eta, double tol)
{
    if (!is_strictly_comparable(ms))
        throw ProperError("penalized problem needs strictly positive generators");
    require_same_size(eta.size(), xi.size(), "penalized_value");
    require_measurable(eta, c, "eta");
    const RandomVariable upper = ess_sup_conditional(ms, xi, c);
    for (Index i = 0; i < xi.size(); ++i)
        if (eta[i] < upper[i] - tol * (1.0 + std::abs(upper[i])))
            return kInf;
    return rho(ms, square(xi - eta)).value;
}

MinimaxGap minimax_gap(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                       const SolverConfig& cfg)
{
    const RandomVariable upper = ess_sup_conditional(ms, xi, c);
    MinimaxGap out;
    out.minimax = penalized_value(ms, xi, c, upper);
    out.maximin = solve_mmse(ms, xi, c, cfg).alpha;
    out.gap = out.minimax - out.maximin;
    out.ess_sup_is_mmse = out.gap <= cfg.tol * (1.0 + out.maximin);
    return out;
}

} // namespace mmse
