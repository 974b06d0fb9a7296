#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mmse {

using Index = std::size_t;

/// Finite sample space: distinct labelled points, power-set sigma-algebra implied.
class SampleSpace {
public:
    explicit SampleSpace(std::vector<std::string> labels);
    /// Points labelled "w0", "w1", ...
    static SampleSpace anonymous(std::size_t n);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    bool operator==(const SampleSpace&) const = default;

private:
    std::vector<std::string> labels_;
};

/// Bounded real function on a finite sample space.
///
/// The bound is max|values|; a looser user bound is accepted and tightened.
class RandomVariable {
public:
    RandomVariable() = default;
    explicit RandomVariable(std::vector<double> values);
    RandomVariable(std::vector<double> values, double bound);

    static RandomVariable constant(std::size_t n, double c);

    std::size_t size() const noexcept { return values_.size(); }
    double bound() const noexcept { return bound_; }
    double operator[](Index i) const { return values_[i]; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::span<const double> view() const noexcept { return values_; }

    bool operator==(const RandomVariable& other) const { return values_ == other.values_; }

private:
    std::vector<double> values_;
    double bound_ = 0.0;
};

// Pointwise arithmetic; operands must share a dimension.
RandomVariable operator+(const RandomVariable& a, const RandomVariable& b);
RandomVariable operator-(const RandomVariable& a, const RandomVariable& b);
RandomVariable operator*(const RandomVariable& a, const RandomVariable& b);
RandomVariable operator*(double s, const RandomVariable& a);
RandomVariable operator+(const RandomVariable& a, double c);
RandomVariable operator-(const RandomVariable& a, double c);
RandomVariable abs(const RandomVariable& a);
RandomVariable pow(const RandomVariable& a, double p);
RandomVariable square(const RandomVariable& a);

/// Sub-sigma-algebra of a finite space, given by the partition generating it.
///
/// Blocks are canonicalized: indices sorted, blocks ordered by smallest member.
class PartitionAlgebra {
public:
    PartitionAlgebra(std::size_t n, std::vector<std::vector<Index>> blocks);
    static PartitionAlgebra trivial(std::size_t n);
    static PartitionAlgebra discrete(std::size_t n);

    std::size_t space_size() const noexcept { return block_of_.size(); }
    std::size_t block_count() const noexcept { return blocks_.size(); }
    const std::vector<std::vector<Index>>& blocks() const noexcept { return blocks_; }
    const std::vector<Index>& block(Index b) const { return blocks_[b]; }
    /// Block containing sample point i.
    Index block_of(Index i) const { return block_of_[i]; }

    /// Expand one value per block into a random variable constant on blocks.
    RandomVariable broadcast(std::span<const double> per_block) const;
    /// Per-block values of a measurable variable (first member of each block).
    std::vector<double> collapse(const RandomVariable& x) const;

    /// True when every block of this partition lies inside one block of `coarser`.
    bool refines(const PartitionAlgebra& coarser) const;

    bool operator==(const PartitionAlgebra& other) const { return blocks_ == other.blocks_; }

private:
    std::vector<std::vector<Index>> blocks_;
    std::vector<Index> block_of_;
};

/// Ordered list of partitions over one sample space.
///
/// Nesting is not enforced on construction; see refine_check / require_refining.
class Filtration {
public:
    explicit Filtration(std::vector<PartitionAlgebra> levels);

    std::size_t depth() const noexcept { return levels_.size(); }
    std::size_t space_size() const noexcept { return levels_.front().space_size(); }
    const PartitionAlgebra& level(Index k) const;
    const std::vector<PartitionAlgebra>& levels() const noexcept { return levels_; }

private:
    std::vector<PartitionAlgebra> levels_;
};

/// x is constant (exactly) on every block of c.
bool is_measurable(const RandomVariable& x, const PartitionAlgebra& c);

/// Every level refines its predecessor.
bool refine_check(const Filtration& f);

/// Throws ArgumentError unless refine_check holds and level 0 is trivial.
void require_refining(const Filtration& f);

/// Clamp every value into [-m, m].
RandomVariable truncate(const RandomVariable& x, double m);

/// Unweighted blockwise average, written identically into each block member.
RandomVariable block_average(const RandomVariable& x, const PartitionAlgebra& c);

void require_same_size(std::size_t a, std::size_t b, const char* what);

} // namespace mmse
