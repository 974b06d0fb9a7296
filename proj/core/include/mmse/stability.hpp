#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mmse/estimator.hpp"
#include "mmse/measures.hpp"
#include "mmse/space.hpp"

namespace mmse {

/// Measure following `base` up to `switch_level` and `tail` afterwards.
struct PastedMeasure {
    Measure base;
    Measure tail;
    Index switch_level = 0;
    Measure result;
};

/// result[i] = base(B_i) * tail[i] / tail(B_i), with B_i the switch-level block of i.
/// Throws PastingDegeneracyError when tail misses a block that base charges.
PastedMeasure paste(const Measure& base, const Measure& tail, const Filtration& f, Index level);

struct StabilityReport {
    bool stable = true;
    /// First pasting found outside the hull.
    std::optional<PastedMeasure> witness;
    /// Generator indices (base, tail) of the witness.
    std::optional<std::pair<Index, Index>> witness_pair;
    /// L1 distance from the witness to the hull.
    double witness_residual = 0.0;
    std::size_t pastings_checked = 0;
    /// Only generator pairs at deterministic levels are pasted.
    std::string label = "stable (generator-pasting)";
};

/// Pastes every ordered generator pair at every level and tests hull membership.
/// Requires strictly positive generators.
StabilityReport is_stable(const MeasureSet& ms, const Filtration& f, double tol = 1e-9);

struct RecursivityCheck {
    RandomVariable lhs;  ///< upper envelope at sigma
    RandomVariable rhs;  ///< upper envelope at sigma of the envelope at tau
    double gap = 0.0;    ///< sup-norm of lhs - rhs
    bool equal = false;
};

RecursivityCheck recursivity_check(const MeasureSet& ms, const Filtration& f, const RandomVariable& xi,
                                   Index sigma_level, Index tau_level, double tol = 1e-9);

// ---------------------------------------------------------------------------------------------
// Time-consistency search for the estimator chain.

/// Instance with entries on a common rational grid numerator / denominator.
struct RationalInstance {
    std::int64_t denominator = 16;
    std::vector<std::vector<std::int64_t>> generators;  ///< numerators, one row per generator
    std::vector<std::int64_t> xi;                        ///< numerators
    Filtration filtration;

    MeasureSet measure_set() const;
    RandomVariable random_variable() const;
};

/// Estimates along both routes from the finest level to level 1.
struct TcChains {
    RandomVariable fine;       ///< eta at level 2
    RandomVariable two_stage;  ///< eta of the level-2 estimate at level 1
    RandomVariable direct;     ///< eta at level 1
    double gap = 0.0;          ///< sup-norm of two_stage - direct
    bool converged = true;     ///< all three solves reached the gap tolerance
};

/// Levels 1 and 2 of `f` are the coarse and fine algebras.
TcChains evaluate_chains(const MeasureSet& ms, const RandomVariable& xi, const Filtration& f,
                         const SolverConfig& cfg);
TcChains evaluate_chains(const RationalInstance& inst, const SolverConfig& cfg);

struct TcSearchOptions {
    std::size_t min_points = 4;
    std::size_t max_points = 8;
    std::size_t min_generators = 2;
    std::size_t max_generators = 4;
    std::int64_t denominator = 16;
    /// xi numerators are drawn from [-xi_range, xi_range].
    std::int64_t xi_range = 32;
    double threshold = 1e-3;
    SolverConfig solver{1e-11, 20000, std::nullopt, true};
};

struct TcCounterexample {
    RationalInstance instance;
    TcChains chains;
    std::uint64_t seed = 0;
    std::size_t trial = 0;
};

struct TcSearchResult {
    std::optional<TcCounterexample> counterexample;
    std::size_t trials_run = 0;
    /// Solves that stopped at max_iter; such trials are skipped.
    std::size_t skipped = 0;
};

inline constexpr std::uint64_t kDefaultTcSeed = 20240601;

/// Deterministic stream of random search instances.
///
/// Randomness comes from std::mt19937_64 seeded with the given seed; an integer in [lo, hi] is
/// drawn as lo + rng() % (hi - lo + 1). Per instance, in order: point count n; level-1 split
/// point; per level-1 block a level-2 cut (0 = none, forced on the first splittable block if no
/// cut was drawn); generator count; per generator n - 1 distinct cut points of
/// {1, ..., denominator - 1} by partial Fisher-Yates; n xi numerators.
class TcInstanceStream {
public:
    TcInstanceStream(std::uint64_t seed, TcSearchOptions opts);
    RationalInstance next();

private:
    std::int64_t draw(std::int64_t lo, std::int64_t hi);

    std::mt19937_64 rng_;
    TcSearchOptions opts_;
};

/// Draws instances sequentially and returns the first (smallest trial index) whose two routes
/// differ by more than opts.threshold in sup norm. Throws ArgumentError when trials == 0.
TcSearchResult mmse_time_consistency_search(std::uint64_t seed, std::size_t trials,
                                            const TcSearchOptions& opts = {});

} // namespace mmse
