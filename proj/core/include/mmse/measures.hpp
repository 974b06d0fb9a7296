#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mmse/space.hpp"

namespace mmse {

/// Simplex tolerance applied to user-supplied probability vectors before renormalization.
inline constexpr double kSimplexTolerance = 1e-12;

/// Probability vector on a finite sample space.
class Measure {
public:
    /// Weights must be nonnegative and sum to 1 within kSimplexTolerance; they are then
    /// renormalized.
    explicit Measure(std::vector<double> weights);
    /// Normalizes any nonnegative vector with positive total mass.
    static Measure from_unnormalized(std::vector<double> weights);
    static Measure uniform(std::size_t n);

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](Index i) const { return weights_[i]; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    /// Mass of a set of sample points.
    double mass(std::span<const Index> points) const;
    bool strictly_positive() const;

    bool operator==(const Measure& other) const { return weights_ == other.weights_; }

private:
    struct Trusted {};
    Measure(std::vector<double> weights, Trusted) : weights_(std::move(weights)) {}

    std::vector<double> weights_;
};

/// Coordinates of a point in the simplex spanned by a measure set's generators.
class MixtureWeights {
public:
    explicit MixtureWeights(std::vector<double> lambda);
    static MixtureWeights uniform(std::size_t k);
    static MixtureWeights vertex(std::size_t k, Index which);

    std::size_t size() const noexcept { return lambda_.size(); }
    double operator[](Index i) const { return lambda_[i]; }
    const std::vector<double>& values() const noexcept { return lambda_; }

private:
    std::vector<double> lambda_;
};

/// Finite generator list; the represented set is the convex hull of the generators.
class MeasureSet {
public:
    explicit MeasureSet(std::vector<Measure> generators);

    std::size_t size() const noexcept { return generators_.size(); }
    std::size_t space_size() const noexcept { return generators_.front().size(); }
    const Measure& operator[](Index k) const { return generators_[k]; }
    const std::vector<Measure>& generators() const noexcept { return generators_; }

    /// Duplicate generators are kept; each duplicate pair is reported here.
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::vector<Measure> generators_;
    std::vector<std::string> warnings_;
};

enum class ZeroBlockPolicy { error, fill_with_unconditional };

double expectation(const Measure& p, const RandomVariable& x);

/// Classical blockwise conditional expectation E_P[x | c].
RandomVariable conditional_expectation(const Measure& p, const RandomVariable& x,
                                       const PartitionAlgebra& c,
                                       ZeroBlockPolicy policy = ZeroBlockPolicy::error);

/// Per-block conditional means, without broadcasting.
std::vector<double> block_conditional_means(const Measure& p, const RandomVariable& x,
                                            const PartitionAlgebra& c,
                                            ZeroBlockPolicy policy = ZeroBlockPolicy::error);

/// Convex combination of the generators.
Measure mix(const MeasureSet& ms, const MixtureWeights& w);

/// Uniform mixture of the generators; dominates every element of the hull.
Measure reference_measure(const MeasureSet& ms);

/// Every generator charges every point that the reference measure charges.
bool is_proper(const MeasureSet& ms);

/// Every generator is strictly positive everywhere.
bool is_strictly_comparable(const MeasureSet& ms);

/// Radon-Nikodym derivative dp/dp0, with 0/0 := 0.
RandomVariable density(const Measure& p, const Measure& p0);

} // namespace mmse
