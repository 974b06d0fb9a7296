#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmse/measures.hpp"

namespace mmse {

inline constexpr double kTieTolerance = 1e-9;

/// Value of the sublinear operator together with the generators attaining it.
struct RhoValue {
    double value = 0.0;
    Index argmax_generator = 0;  ///< smallest maximizing index
    std::vector<Index> ties;     ///< every index within the tie tolerance of the max
};

/// rho(x) = max over generators of E_g[x]; equals the sup over the hull.
RhoValue rho(const MeasureSet& ms, const RandomVariable& x, double tie_tolerance = kTieTolerance);

/// Blockwise max of generator conditional means (generators with zero block mass skipped).
RandomVariable ess_sup_conditional(const MeasureSet& ms, const RandomVariable& x,
                                   const PartitionAlgebra& c);

/// Blockwise min of generator conditional means.
RandomVariable ess_inf_conditional(const MeasureSet& ms, const RandomVariable& x,
                                   const PartitionAlgebra& c);

struct HolderBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds(double tol = 1e-10) const { return lhs <= rhs + tol; }
};

/// rho(|x1 x2|) against rho(|x1|^p)^(1/p) rho(|x2|^q)^(1/q); p, q must be conjugate.
HolderBound holder_bound(const MeasureSet& ms, const RandomVariable& x1, const RandomVariable& x2,
                         double p, double q);

struct AxiomViolation {
    std::string axiom;
    std::string witness;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct AxiomReport {
    std::size_t checks = 0;
    std::vector<AxiomViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// Checks monotonicity (on pointwise-ordered pairs), constant preservation, subadditivity and
/// positive homogeneity of rho over every sample, sample pair and scalar.
AxiomReport axiom_suite(const MeasureSet& ms, const std::vector<RandomVariable>& samples,
                        const std::vector<double>& scalars, double tol = 1e-10);

/// Seeded sample list for axiom_suite: `count` random variables with entries in
/// [-scale, scale], each followed by a pointwise-larger companion so ordered pairs exist.
std::vector<RandomVariable> random_axiom_samples(std::size_t n, std::size_t count,
                                                 std::uint64_t seed, double scale = 10.0);

} // namespace mmse
