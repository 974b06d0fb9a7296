#include "mmse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "mmse/errors.hpp"

namespace mmse::io {

namespace {

std::string at(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string at(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

const json& require_array(const json& j, const std::string& path)
{
    if (!j.is_array())
        throw ValidationError(path, "expected an array");
    return j;
}

bool parse_int64(std::string_view s, std::int64_t& out)
{
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

Index parse_index(const json& j, const std::string& path)
{
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        throw ValidationError(path, "expected a nonnegative integer");
    return j.get<Index>();
}

int parse_int(const json& j, const std::string& path)
{
    if (!j.is_number_integer())
        throw ValidationError(path, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ValidationError(path, "integer out of range");
    return static_cast<int>(v);
}

std::uint64_t parse_u64(const json& j, const std::string& path)
{
    if (j.is_number_unsigned())
        return j.get<std::uint64_t>();
    if (j.is_number_integer())
        throw ValidationError(path, "expected a nonnegative integer");
    if (j.is_string()) {
        const std::string s = trim(j.get<std::string>());
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty())
            return v;
    }
    throw ValidationError(path, "expected a nonnegative integer");
}

std::vector<Number> parse_numbers(const json& j, const std::string& path)
{
    require_array(j, path);
    std::vector<Number> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_number(j[i], at(path, i)));
    return out;
}

std::vector<double> number_values(const std::vector<Number>& v)
{
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](const Number& n) { return n.value; });
    return out;
}

json raws(const std::vector<Number>& v)
{
    json out = json::array();
    for (const auto& n : v)
        out.push_back(n.raw);
    return out;
}

std::vector<std::vector<Index>> parse_partition(const json& j, std::size_t n, const std::string& path)
{
    require_array(j, path);
    std::vector<std::vector<Index>> blocks;
    for (std::size_t b = 0; b < j.size(); ++b) {
        const std::string bp = at(path, b);
        require_array(j[b], bp);
        std::vector<Index> block;
        for (std::size_t i = 0; i < j[b].size(); ++i)
            block.push_back(parse_index(j[b][i], at(bp, i)));
        blocks.push_back(std::move(block));
    }
    try {
        return PartitionAlgebra(n, blocks).blocks();
    } catch (const Error& e) {
        throw ValidationError(path, e.what());
    }
}

const std::set<std::string> kTopLevelKeys{"version", "omega",   "generators", "xi",    "partition",
                                          "filtration", "tree", "options",    "chains", "origin"};
const std::set<std::string> kOptionKeys{"tol",   "max_iter",    "solver",    "seed",  "grid_step",
                                        "level", "sigma_level", "tau_level", "trials"};
const std::set<std::string> kTreeKeys{"depth", "q_lo", "q_hi", "dt", "leaves"};

Options parse_options(const json& j)
{
    const std::string path = "options";
    if (!j.is_object())
        throw ValidationError(path, "expected an object");
    for (const auto& [key, _] : j.items())
        if (!kOptionKeys.count(key))
            throw ValidationError(at(path, key), "unknown option");
    Options o;
    if (j.contains("tol")) {
        o.tol = parse_number(j["tol"], "options.tol");
        if (!(o.tol->value > 0.0))
            throw ValidationError("options.tol", "must be positive");
    }
    if (j.contains("max_iter")) {
        o.max_iter = parse_int(j["max_iter"], "options.max_iter");
        if (*o.max_iter < 1)
            throw ValidationError("options.max_iter", "must be at least 1");
    }
    if (j.contains("solver")) {
        if (!j["solver"].is_string())
            throw ValidationError("options.solver", "expected a string");
        o.solver = j["solver"].get<std::string>();
        if (*o.solver != "saddle_iteration" && *o.solver != "brute_force")
            throw ValidationError("options.solver", "expected \"saddle_iteration\" or \"brute_force\"");
    }
    if (j.contains("seed"))
        o.seed = parse_u64(j["seed"], "options.seed");
    if (j.contains("grid_step")) {
        o.grid_step = parse_number(j["grid_step"], "options.grid_step");
        if (!(o.grid_step->value > 0.0))
            throw ValidationError("options.grid_step", "must be positive");
    }
    for (const char* key : {"level", "sigma_level", "tau_level"}) {
        if (!j.contains(key))
            continue;
        const int v = parse_int(j[key], at(path, key));
        if (v < 0)
            throw ValidationError(at(path, key), "must be nonnegative");
        (std::string(key) == "level" ? o.level : std::string(key) == "sigma_level" ? o.sigma_level : o.tau_level) = v;
    }
    if (j.contains("trials"))
        o.trials = parse_u64(j["trials"], "options.trials");
    return o;
}

TreeStanza parse_tree(const json& j)
{
    const std::string path = "tree";
    if (!j.is_object())
        throw ValidationError(path, "expected an object");
    for (const auto& [key, _] : j.items())
        if (!kTreeKeys.count(key))
            throw ValidationError(at(path, key), "unknown tree field");
    for (const char* key : {"depth", "leaves"})
        if (!j.contains(key))
            throw ValidationError(at(path, key), "missing");
    TreeStanza t;
    t.depth = parse_int(j["depth"], "tree.depth");
    if (t.depth < 1 || t.depth > 20)
        throw ValidationError("tree.depth", "must lie in [1, 20]");
    const std::size_t internal = (std::size_t{1} << t.depth) - 1;
    auto interval = [&](const char* key) {
        const std::string p = at(path, key);
        if (!j.contains(key))
            return std::vector<Number>{};
        if (!j[key].is_array())
            return std::vector<Number>{parse_number(j[key], p)};
        auto v = parse_numbers(j[key], p);
        if (v.size() != internal)
            throw ValidationError(p, "expected " + std::to_string(internal) + " node values");
        return v;
    };
    t.q_lo = interval("q_lo");
    t.q_hi = interval("q_hi");
    if (t.q_lo.empty() != t.q_hi.empty())
        throw ValidationError("tree", "q_lo and q_hi must be given together");
    if (j.contains("dt")) {
        t.dt = parse_number(j["dt"], "tree.dt");
        if (!(t.dt->value > 0.0 && t.dt->value < 1.0))
            throw ValidationError("tree.dt", "must lie in (0, 1)");
    }
    t.leaves = parse_numbers(j["leaves"], "tree.leaves");
    if (t.leaves.size() != internal + 1)
        throw ValidationError("tree.leaves", "expected " + std::to_string(internal + 1) + " leaf values");
    try {
        build_tree(t);
    } catch (const Error& e) {
        throw ValidationError("tree", e.what());
    }
    return t;
}

std::string leaf_label(std::size_t leaf, int depth)
{
    std::string s;
    for (int b = depth - 1; b >= 0; --b)
        s.push_back((leaf >> b & 1U) ? 'd' : 'u');
    return s;
}

} // namespace

Number parse_number(const json& j, const std::string& path)
{
    if (j.is_number()) {
        const double v = j.get<double>();
        if (!std::isfinite(v))
            throw ValidationError(path, "number must be finite");
        return Number{v, j};
    }
    if (!j.is_string())
        throw ValidationError(path, "expected a number or a numeric string");
    const std::string s = trim(j.get<std::string>());
    double v = 0.0;
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        std::int64_t p = 0, q = 0;
        if (!parse_int64(trim(s.substr(0, slash)), p) || !parse_int64(trim(s.substr(slash + 1)), q))
            throw ValidationError(path, "malformed rational \"" + s + "\"");
        if (q <= 0)
            throw ValidationError(path, "rational denominator must be positive");
        v = static_cast<double>(p) / static_cast<double>(q);
    } else {
        char* end = nullptr;
        v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size())
            throw ValidationError(path, "malformed number \"" + s + "\"");
    }
    if (!std::isfinite(v))
        throw ValidationError(path, "number must be finite");
    return Number{v, j};
}

Instance parse_instance(const json& j)
{
    if (!j.is_object())
        throw ValidationError("", "instance must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kTopLevelKeys.count(key))
            throw ValidationError(key, "unknown field");
    if (!j.contains("version"))
        throw ValidationError("version", "missing");
    if (j["version"] != kInstanceVersion)
        throw ValidationError("version", std::string("expected \"") + kInstanceVersion + "\"");

    const int structures = static_cast<int>(j.contains("partition")) +
                           static_cast<int>(j.contains("filtration")) + static_cast<int>(j.contains("tree"));
    if (structures != 1)
        throw ValidationError("partition", "exactly one of partition, filtration, tree is required");

    Instance inst;
    if (j.contains("options"))
        inst.options = parse_options(j["options"]);
    for (const char* key : {"chains", "origin"})
        if (j.contains(key))
            inst.annotations[key] = j[key];

    if (j.contains("tree")) {
        for (const char* key : {"omega", "generators", "xi"})
            if (j.contains(key))
                throw ValidationError(key, "tree instances derive this field from the tree stanza");
        inst.tree = parse_tree(j["tree"]);
        const std::size_t leaves = inst.tree->leaves.size();
        for (std::size_t i = 0; i < leaves; ++i)
            inst.omega.push_back(leaf_label(i, inst.tree->depth));
        inst.xi = inst.tree->leaves;
        return inst;
    }

    for (const char* key : {"omega", "generators", "xi"})
        if (!j.contains(key))
            throw ValidationError(key, "missing");

    require_array(j["omega"], "omega");
    for (std::size_t i = 0; i < j["omega"].size(); ++i) {
        if (!j["omega"][i].is_string())
            throw ValidationError(at("omega", i), "expected a string label");
        inst.omega.push_back(j["omega"][i].get<std::string>());
    }
    try {
        SampleSpace check(inst.omega);
    } catch (const Error& e) {
        throw ValidationError("omega", e.what());
    }
    const std::size_t n = inst.omega.size();

    require_array(j["generators"], "generators");
    if (j["generators"].empty())
        throw ValidationError("generators", "at least one generator is required");
    for (std::size_t k = 0; k < j["generators"].size(); ++k) {
        const std::string path = at("generators", k);
        auto row = parse_numbers(j["generators"][k], path);
        if (row.size() != n)
            throw ValidationError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(row.size()));
        try {
            Measure check(number_values(row));
        } catch (const Error& e) {
            throw ValidationError(path, e.what());
        }
        inst.generators.push_back(std::move(row));
    }

    inst.xi = parse_numbers(j["xi"], "xi");
    if (inst.xi.size() != n)
        throw ValidationError("xi", "expected " + std::to_string(n) + " entries, got " + std::to_string(inst.xi.size()));

    if (j.contains("partition")) {
        inst.partition = parse_partition(j["partition"], n, "partition");
    } else {
        require_array(j["filtration"], "filtration");
        if (j["filtration"].empty())
            throw ValidationError("filtration", "at least one level is required");
        std::vector<std::vector<std::vector<Index>>> levels;
        for (std::size_t l = 0; l < j["filtration"].size(); ++l)
            levels.push_back(parse_partition(j["filtration"][l], n, at("filtration", l)));
        std::vector<PartitionAlgebra> algebras;
        for (const auto& lv : levels)
            algebras.emplace_back(n, lv);
        try {
            require_refining(Filtration(std::move(algebras)));
        } catch (const Error& e) {
            throw ValidationError("filtration", e.what());
        }
        inst.filtration = std::move(levels);
    }
    return inst;
}

Instance parse_instance_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_instance(j);
}

Instance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("", "cannot open instance file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance_text(buf.str());
}

json canonicalize(const Instance& inst)
{
    json out = json::object();
    out["version"] = kInstanceVersion;
    if (inst.tree) {
        const TreeStanza& t = *inst.tree;
        json tree = json::object();
        tree["depth"] = t.depth;
        if (!t.q_lo.empty()) {
            tree["q_lo"] = t.q_lo.size() == 1 ? t.q_lo.front().raw : raws(t.q_lo);
            tree["q_hi"] = t.q_hi.size() == 1 ? t.q_hi.front().raw : raws(t.q_hi);
        }
        if (t.dt)
            tree["dt"] = t.dt->raw;
        tree["leaves"] = raws(t.leaves);
        out["tree"] = std::move(tree);
    } else {
        out["omega"] = inst.omega;
        json gens = json::array();
        for (const auto& row : inst.generators)
            gens.push_back(raws(row));
        out["generators"] = std::move(gens);
        out["xi"] = raws(inst.xi);
        if (inst.partition)
            out["partition"] = *inst.partition;
        if (inst.filtration)
            out["filtration"] = *inst.filtration;
    }
    json opts = json::object();
    const Options& o = inst.options;
    if (o.tol)
        opts["tol"] = o.tol->raw;
    if (o.max_iter)
        opts["max_iter"] = *o.max_iter;
    if (o.solver)
        opts["solver"] = *o.solver;
    if (o.seed)
        opts["seed"] = *o.seed;
    if (o.grid_step)
        opts["grid_step"] = o.grid_step->raw;
    if (o.level)
        opts["level"] = *o.level;
    if (o.sigma_level)
        opts["sigma_level"] = *o.sigma_level;
    if (o.tau_level)
        opts["tau_level"] = *o.tau_level;
    if (o.trials)
        opts["trials"] = *o.trials;
    if (!opts.empty())
        out["options"] = std::move(opts);
    return out;
}

std::string serialize(const Instance& inst)
{
    return canonicalize(inst).dump();
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw InternalError("SHA-256 computation failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

std::string digest(const Instance& inst)
{
    return "sha256:" + sha256_hex(serialize(inst));
}

TreeModel build_tree(const TreeStanza& t)
{
    const double dt = t.dt ? t.dt->value : 0.25;
    if (t.q_lo.empty())
        return TreeModel::girsanov(t.depth, dt);
    const std::size_t internal = (std::size_t{1} << t.depth) - 1;
    auto expand = [&](const std::vector<Number>& v) {
        return v.size() == 1 ? std::vector<double>(internal, v.front().value) : number_values(v);
    };
    return TreeModel(t.depth, expand(t.q_lo), expand(t.q_hi), dt);
}

Model build_model(const Instance& inst)
{
    if (inst.tree) {
        TreeModel tm = build_tree(*inst.tree);
        MeasureSet ms = tree_measure_set(tm);
        Filtration f = tm.filtration();
        return Model{SampleSpace(inst.omega), std::move(ms), RandomVariable(number_values(inst.xi)),
                     std::nullopt, std::move(f), std::move(tm)};
    }
    std::vector<Measure> gens;
    for (const auto& row : inst.generators)
        gens.emplace_back(number_values(row));
    const std::size_t n = inst.omega.size();
    std::optional<PartitionAlgebra> partition;
    std::optional<Filtration> filtration;
    if (inst.partition)
        partition.emplace(n, *inst.partition);
    if (inst.filtration) {
        std::vector<PartitionAlgebra> levels;
        for (const auto& lv : *inst.filtration)
            levels.emplace_back(n, lv);
        filtration.emplace(std::move(levels));
    }
    return Model{SampleSpace(inst.omega), MeasureSet(std::move(gens)), RandomVariable(number_values(inst.xi)),
                 std::move(partition), std::move(filtration), std::nullopt};
}

int Model::target_level(const Options& opts) const
{
    if (!filtration)
        return -1;
    const int depth = static_cast<int>(filtration->depth());
    const int level = opts.level ? *opts.level : std::max(0, depth - 2);
    if (level >= depth)
        throw ValidationError("options.level", "level " + std::to_string(level) + " out of range for " +
                                                   std::to_string(depth) + " levels");
    return level;
}

PartitionAlgebra Model::target(const Options& opts) const
{
    if (partition)
        return *partition;
    return filtration->level(static_cast<Index>(target_level(opts)));
}

SolverConfig solver_config(const Options& opts)
{
    SolverConfig cfg;
    if (opts.tol)
        cfg.tol = opts.tol->value;
    if (opts.max_iter)
        cfg.max_iter = *opts.max_iter;
    return cfg;
}

json real(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "+inf" : "-inf";
    return v;
}

json values(const std::vector<double>& x)
{
    json out = json::array();
    for (double v : x)
        out.push_back(real(v));
    return out;
}

json values(const RandomVariable& x)
{
    return values(x.values());
}

json counterexample_instance(const TcCounterexample& cx, const TcSearchOptions& opts)
{
    const RationalInstance& ri = cx.instance;
    const std::string den = "/" + std::to_string(ri.denominator);
    json out = json::object();
    out["version"] = kInstanceVersion;
    json omega = json::array();
    for (std::size_t i = 0; i < ri.xi.size(); ++i)
        omega.push_back("w" + std::to_string(i));
    out["omega"] = std::move(omega);
    json gens = json::array();
    for (const auto& row : ri.generators) {
        json r = json::array();
        for (auto v : row)
            r.push_back(std::to_string(v) + den);
        gens.push_back(std::move(r));
    }
    out["generators"] = std::move(gens);
    json xi = json::array();
    for (auto v : ri.xi)
        xi.push_back(std::to_string(v) + den);
    out["xi"] = std::move(xi);
    json levels = json::array();
    for (const auto& lv : ri.filtration.levels())
        levels.push_back(lv.blocks());
    out["filtration"] = std::move(levels);
    out["options"] = {{"tol", opts.solver.tol}, {"max_iter", opts.solver.max_iter}, {"level", 1}, {"seed", cx.seed}};
    out["chains"] = {{"fine", values(cx.chains.fine)},
                     {"two_stage", values(cx.chains.two_stage)},
                     {"direct", values(cx.chains.direct)},
                     {"gap", real(cx.chains.gap)}};
    out["origin"] = {{"generator", "mt19937_64"}, {"seed", cx.seed}, {"trial", cx.trial},
                     {"denominator", ri.denominator}, {"threshold", opts.threshold}};
    return out;
}

} // namespace mmse::io
