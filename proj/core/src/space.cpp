#include "mmse/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mmse/errors.hpp"

namespace mmse {

void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw StructuralError(os.str());
    }
}

SampleSpace::SampleSpace(std::vector<std::string> labels) : labels_(std::move(labels))
{
    if (labels_.empty())
        throw ArgumentError("sample space needs at least one point");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size())
        throw ArgumentError("sample-point labels must be unique");
}

SampleSpace SampleSpace::anonymous(std::size_t n)
{
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        labels.push_back("w" + std::to_string(i));
    return SampleSpace(std::move(labels));
}

RandomVariable::RandomVariable(std::vector<double> values) : values_(std::move(values))
{
    for (double v : values_) {
        if (!std::isfinite(v))
            throw ArgumentError("random-variable values must be finite");
        bound_ = std::max(bound_, std::abs(v));
    }
}

RandomVariable::RandomVariable(std::vector<double> values, double bound)
    : RandomVariable(std::move(values))
{
    if (!(bound >= 0.0) || std::isinf(bound))
        throw ArgumentError("random-variable bound must be a finite nonnegative number");
    if (bound < bound_)
        throw ArgumentError("random-variable value exceeds the supplied bound");
}

RandomVariable RandomVariable::constant(std::size_t n, double c)
{
    return RandomVariable(std::vector<double>(n, c));
}

namespace {

template <class Op>
RandomVariable zip(const RandomVariable& a, const RandomVariable& b, Op op)
{
    require_same_size(a.size(), b.size(), "pointwise operation");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = op(a[i], b[i]);
    return RandomVariable(std::move(out));
}

template <class Op>
RandomVariable map(const RandomVariable& a, Op op)
{
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = op(a[i]);
    return RandomVariable(std::move(out));
}

} // namespace

RandomVariable operator+(const RandomVariable& a, const RandomVariable& b)
{
    return zip(a, b, [](double x, double y) { return x + y; });
}
RandomVariable operator-(const RandomVariable& a, const RandomVariable& b)
{
    return zip(a, b, [](double x, double y) { return x - y; });
}
RandomVariable operator*(const RandomVariable& a, const RandomVariable& b)
{
    return zip(a, b, [](double x, double y) { return x * y; });
}
RandomVariable operator*(double s, const RandomVariable& a)
{
    return map(a, [s](double x) { return s * x; });
}
RandomVariable operator+(const RandomVariable& a, double c)
{
    return map(a, [c](double x) { return x + c; });
}
RandomVariable operator-(const RandomVariable& a, double c)
{
    return map(a, [c](double x) { return x - c; });
}
RandomVariable abs(const RandomVariable& a)
{
    return map(a, [](double x) { return std::abs(x); });
}
RandomVariable pow(const RandomVariable& a, double p)
{
    return map(a, [p](double x) { return std::pow(x, p); });
}
RandomVariable square(const RandomVariable& a)
{
    return map(a, [](double x) { return x * x; });
}

PartitionAlgebra::PartitionAlgebra(std::size_t n, std::vector<std::vector<Index>> blocks)
    : blocks_(std::move(blocks)), block_of_(n, n)
{
    if (n == 0)
        throw ArgumentError("partition over an empty sample space");
    for (auto& b : blocks_) {
        if (b.empty())
            throw ArgumentError("partition contains an empty block");
        std::sort(b.begin(), b.end());
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    for (Index b = 0; b < blocks_.size(); ++b) {
        for (Index i : blocks_[b]) {
            if (i >= n)
                throw ArgumentError("partition index " + std::to_string(i) + " out of range");
            if (block_of_[i] != n)
                throw ArgumentError("partition blocks overlap at index " + std::to_string(i));
            block_of_[i] = b;
        }
    }
    for (Index i = 0; i < n; ++i)
        if (block_of_[i] == n)
            throw ArgumentError("partition does not cover index " + std::to_string(i));
}

PartitionAlgebra PartitionAlgebra::trivial(std::size_t n)
{
    std::vector<Index> all(n);
    for (Index i = 0; i < n; ++i)
        all[i] = i;
    return PartitionAlgebra(n, {all});
}

PartitionAlgebra PartitionAlgebra::discrete(std::size_t n)
{
    std::vector<std::vector<Index>> blocks(n);
    for (Index i = 0; i < n; ++i)
        blocks[i] = {i};
    return PartitionAlgebra(n, std::move(blocks));
}

RandomVariable PartitionAlgebra::broadcast(std::span<const double> per_block) const
{
    require_same_size(per_block.size(), block_count(), "broadcast");
    std::vector<double> out(space_size());
    for (Index i = 0; i < out.size(); ++i)
        out[i] = per_block[block_of_[i]];
    return RandomVariable(std::move(out));
}

std::vector<double> PartitionAlgebra::collapse(const RandomVariable& x) const
{
    require_same_size(x.size(), space_size(), "collapse");
    std::vector<double> out(block_count());
    for (Index b = 0; b < blocks_.size(); ++b)
        out[b] = x[blocks_[b].front()];
    return out;
}

bool PartitionAlgebra::refines(const PartitionAlgebra& coarser) const
{
    require_same_size(space_size(), coarser.space_size(), "refines");
    for (const auto& b : blocks_) {
        const Index parent = coarser.block_of(b.front());
        for (Index i : b)
            if (coarser.block_of(i) != parent)
                return false;
    }
    return true;
}

Filtration::Filtration(std::vector<PartitionAlgebra> levels) : levels_(std::move(levels))
{
    if (levels_.empty())
        throw ArgumentError("filtration needs at least one level");
    for (const auto& l : levels_)
        require_same_size(l.space_size(), levels_.front().space_size(), "filtration level");
}

const PartitionAlgebra& Filtration::level(Index k) const
{
    if (k >= levels_.size())
        throw ArgumentError("filtration level " + std::to_string(k) + " out of range (depth " +
                            std::to_string(levels_.size()) + ")");
    return levels_[k];
}

bool is_measurable(const RandomVariable& x, const PartitionAlgebra& c)
{
    require_same_size(x.size(), c.space_size(), "is_measurable");
    for (const auto& b : c.blocks())
        for (Index i : b)
            if (x[i] != x[b.front()])
                return false;
    return true;
}

bool refine_check(const Filtration& f)
{
    for (Index k = 1; k < f.depth(); ++k)
        if (!f.level(k).refines(f.level(k - 1)))
            return false;
    return true;
}

void require_refining(const Filtration& f)
{
    if (!refine_check(f))
        throw ArgumentError("filtration levels are not nested");
    if (f.level(0).block_count() != 1)
        throw ArgumentError("filtration level 0 must be the trivial partition");
}

RandomVariable truncate(const RandomVariable& x, double m)
{
    if (!(m >= 0.0))
        throw ArgumentError("truncation bound must be nonnegative");
    std::vector<double> out(x.size());
    for (Index i = 0; i < x.size(); ++i)
        out[i] = std::clamp(x[i], -m, m);
    return RandomVariable(std::move(out));
}

RandomVariable block_average(const RandomVariable& x, const PartitionAlgebra& c)
{
    require_same_size(x.size(), c.space_size(), "block_average");
    std::vector<double> per_block(c.block_count());
    for (Index b = 0; b < c.block_count(); ++b) {
        double s = 0.0;
        for (Index i : c.block(b))
            s += x[i];
        per_block[b] = s / static_cast<double>(c.block(b).size());
    }
    return c.broadcast(per_block);
}

} // namespace mmse
