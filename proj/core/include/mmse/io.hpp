#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmse/estimator.hpp"
#include "mmse/gexp.hpp"
#include "mmse/measures.hpp"
#include "mmse/space.hpp"
#include "mmse/stability.hpp"

namespace mmse::io {

using nlohmann::json;

inline constexpr const char* kInstanceVersion = "mmse-instance/1";
inline constexpr const char* kResultFormat = "mmse-result/1";

/// Numeric entry as written in the file: a JSON number, a decimal string or a rational "p/q".
/// `raw` is kept verbatim for canonical output.
struct Number {
    double value = 0.0;
    json raw;
};

struct TreeStanza {
    int depth = 1;
    /// One entry (every node) or one per internal node.
    std::vector<Number> q_lo;
    std::vector<Number> q_hi;
    std::optional<Number> dt;
    std::vector<Number> leaves;
};

struct Options {
    std::optional<Number> tol;
    std::optional<int> max_iter;
    std::optional<std::string> solver;
    std::optional<std::uint64_t> seed;
    std::optional<Number> grid_step;
    std::optional<int> level;
    std::optional<int> sigma_level;
    std::optional<int> tau_level;
    std::optional<std::uint64_t> trials;
};

/// Parsed and validated instance file. Exactly one of partition, filtration, tree is set.
struct Instance {
    std::vector<std::string> omega;
    std::vector<std::vector<Number>> generators;
    std::vector<Number> xi;
    std::optional<std::vector<std::vector<Index>>> partition;
    std::optional<std::vector<std::vector<std::vector<Index>>>> filtration;
    std::optional<TreeStanza> tree;
    Options options;
    /// "chains" and "origin" annotations; not part of the canonical form.
    json annotations = json::object();
};

/// Parses numbers written as JSON numbers, decimal strings or "p/q" rationals.
Number parse_number(const json& j, const std::string& path);

/// Throws ValidationError naming the offending field.
Instance parse_instance(const json& j);
Instance parse_instance_text(const std::string& text);
Instance load_instance(const std::string& path);

/// Canonical JSON: recognized fields only, keys sorted, partition blocks canonicalized.
json canonicalize(const Instance& inst);
/// Compact dump of the canonical form.
std::string serialize(const Instance& inst);
/// "sha256:<hex>" of serialize(inst).
std::string digest(const Instance& inst);
std::string sha256_hex(const std::string& bytes);

/// Mathematical objects described by an instance. Tree instances expand to the corner measure
/// set, the leaf values and the tree filtration.
struct Model {
    SampleSpace omega;
    MeasureSet ms;
    RandomVariable xi;
    std::optional<PartitionAlgebra> partition;
    std::optional<Filtration> filtration;
    std::optional<TreeModel> tree;

    /// Algebra to estimate against: the partition, or the filtration / tree level from
    /// options.level (default: second-finest level).
    PartitionAlgebra target(const Options& opts) const;
    int target_level(const Options& opts) const;
};

Model build_model(const Instance& inst);
TreeModel build_tree(const TreeStanza& stanza);

SolverConfig solver_config(const Options& opts);

/// JSON number, or "+inf" / "-inf" / "nan".
json real(double v);
json values(const RandomVariable& x);
json values(const std::vector<double>& x);

/// Counterexample as an instance file with "chains" and "origin" annotations.
json counterexample_instance(const TcCounterexample& cx, const TcSearchOptions& opts);

} // namespace mmse::io
