#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmse/measures.hpp"
#include "mmse/sublinear.hpp"

namespace mmse {

class Filtration;

enum class SolverKind { saddle_iteration, brute_force };
enum class SolveStatus { converged, max_iterations };

const char* to_string(SolverKind kind);
const char* to_string(SolveStatus status);

struct SolverConfig {
    /// Target duality gap max_k E_k[(xi - eta)^2] - E_P[(xi - eta)^2].
    double tol = 1e-8;
    int max_iter = 10000;
    /// Starting point of the dual iteration (uniform when empty).
    std::optional<std::vector<double>> initial_weights;
    /// Finish with a Newton solve of the saddle-point system on the detected active set.
    bool polish = true;
};

/// Minimum mean square estimator eta_hat with its worst-case measure.
struct EstimatorResult {
    RandomVariable eta_hat;
    /// Worst-case measure in hull coordinates; for the grid oracle, the vertex maximizing the
    /// residual at eta_hat.
    MixtureWeights p_hat = MixtureWeights({1.0});
    double alpha = 0.0;
    /// Certified duality gap; absent for the grid oracle.
    std::optional<double> saddle_gap;
    int iterations = 0;
    SolverKind solver = SolverKind::saddle_iteration;
    SolveStatus status = SolveStatus::converged;
    bool proper = true;
    std::vector<std::string> warnings;

    bool converged() const { return status == SolveStatus::converged; }
};

/// Solves inf over c-measurable eta of max_k E_k[(xi - eta)^2].
///
/// Maximizes the concave dual phi(lambda) = E_{P_lambda}[(xi - E_{P_lambda}[xi|c])^2] over the
/// generator simplex by accelerated projected gradient ascent with backtracking, optionally
/// polished by Newton's method on the saddle-point system. Throws ZeroMassBlockError when the
/// reference measure misses a block.
EstimatorResult solve_mmse(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                           const SolverConfig& cfg = {});

inline constexpr std::size_t kBruteForceMaxBlocks = 4;

/// Primal oracle independent of the dual iteration: nested one-dimensional minimization of the
/// convex objective over the box [-M, M]^blocks. The innermost coordinate is minimized exactly
/// (max of convex quadratics); outer coordinates by golden-section search, the outermost to
/// grid_step / 100.
EstimatorResult brute_force_mmse(const MeasureSet& ms, const RandomVariable& xi,
                                 const PartitionAlgebra& c, double grid_step = 1e-3);

/// Max over generators of E_k[(xi - eta)^2].
double worst_case_mse(const MeasureSet& ms, const RandomVariable& xi, const RandomVariable& eta);

struct Certificate {
    double max_over_p = 0.0;
    double value_at_saddle = 0.0;
    double min_over_eta = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Checks E_P[(xi-eta)^2] <= E_Phat[(xi-eta)^2] <= E_Phat[(xi-eta')^2] at the returned pair.
Certificate verify_saddle(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                          const EstimatorResult& result, double tol = 1e-8);

/// Decides f(eta_tilde) = inf_eta rho[(xi - eta_tilde) eta] = 0 via the hull test
/// 0 in conv{ (E_k[(xi - eta_tilde) 1_B])_B }.
bool kernel_member(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                   const RandomVariable& eta_tilde, double tol = 1e-9);

struct KernelInterval {
    RandomVariable lower;
    RandomVariable upper;
    /// True when stability was verified, so the interval is exactly the kernel; otherwise it
    /// is only an outer description.
    bool exact = false;
};

/// Essential envelopes of the conditional expectations. Pass the filtration containing c (and
/// its level) to have stability checked.
KernelInterval kernel_interval(const MeasureSet& ms, const RandomVariable& xi,
                               const PartitionAlgebra& c, const Filtration* filtration = nullptr);

struct NsCondition {
    /// inf over c-measurable eta of rho[(xi - eta_hat)(xi - eta)]; -inf when unbounded.
    double inf_value = 0.0;
    double rho_sq = 0.0;
    bool holds = false;
};

/// Optimality equation inf_eta rho[(xi - eta_hat)(xi - eta)] = rho[(xi - eta_hat)^2].
NsCondition ns_condition(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                         const RandomVariable& eta_hat, double tol = 1e-6);

struct OptimalityEntry {
    double lhs = 0.0;     ///< rho[(xi - eta)(xi - eta_hat)]
    double rhs = 0.0;     ///< rho[(xi - eta_hat)^2]
    double margin = 0.0;  ///< lhs - rhs
    bool ok = false;
};

std::vector<OptimalityEntry> optimality_ineq(const MeasureSet& ms, const RandomVariable& xi,
                                             const PartitionAlgebra& c,
                                             const RandomVariable& eta_hat,
                                             const std::vector<RandomVariable>& candidates,
                                             double tol = 1e-9);

/// sup over nonnegative c-measurable eta_tilde of rho[(xi - eta)^2 + eta_tilde (xi - eta)];
/// +infinity when eta falls below the upper envelope on some block. Requires strictly positive
/// generators (ProperError otherwise).
double penalized_value(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                       const RandomVariable& eta, double tol = 1e-9);

struct MinimaxGap {
    double minimax = 0.0;
    double maximin = 0.0;
    double gap = 0.0;
    bool ess_sup_is_mmse = false;
};

MinimaxGap minimax_gap(const MeasureSet& ms, const RandomVariable& xi, const PartitionAlgebra& c,
                       const SolverConfig& cfg = {});

} // namespace mmse
