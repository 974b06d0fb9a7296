#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include "mmse/errors.hpp"
#include "mmse/estimator.hpp"
#include "mmse/gexp.hpp"
#include "mmse/io.hpp"
#include "mmse/stability.hpp"
#include "mmse/sublinear.hpp"
#include "mmse/version.hpp"

namespace mmse::cli {

namespace {

using io::json;
using io::real;
using io::values;

const std::set<std::string> kCommands{"solve", "rho", "oracle", "stability", "tcsearch", "gexp"};

struct Context {
    io::Instance inst;
    io::Model model;
    io::Options opts;
};

struct Report {
    int code = kOk;
    json body = json::object();
    std::vector<std::string> warnings;
};

io::Options merge(io::Options o, const Flags& f)
{
    if (f.tol) {
        if (!(*f.tol > 0.0))
            throw ValidationError("--tol", "must be positive");
        o.tol = io::Number{*f.tol, *f.tol};
    }
    if (f.grid_step) {
        if (!(*f.grid_step > 0.0))
            throw ValidationError("--grid-step", "must be positive");
        o.grid_step = io::Number{*f.grid_step, *f.grid_step};
    }
    if (f.seed)
        o.seed = *f.seed;
    if (f.trials)
        o.trials = *f.trials;
    if (f.level) {
        if (*f.level < 0)
            throw ValidationError("--level", "must be nonnegative");
        o.level = *f.level;
    }
    return o;
}

Context load(const std::string& path, const Flags& flags)
{
    io::Instance inst = io::load_instance(path);
    io::Options opts = merge(inst.options, flags);
    io::Model model = io::build_model(inst);
    return Context{std::move(inst), std::move(model), std::move(opts)};
}

json estimator_json(const EstimatorResult& r, const MeasureSet& ms, const PartitionAlgebra& c)
{
    json j;
    j["eta_hat"] = values(r.eta_hat);
    j["eta_blocks"] = values(c.collapse(r.eta_hat));
    j["p_hat"] = values(r.p_hat.values());
    j["p_hat_measure"] = values(mix(ms, r.p_hat).weights());
    j["alpha"] = real(r.alpha);
    j["saddle_gap"] = r.saddle_gap ? real(*r.saddle_gap) : json(nullptr);
    j["iterations"] = r.iterations;
    j["solver"] = to_string(r.solver);
    j["status"] = to_string(r.status);
    j["proper"] = r.proper;
    return j;
}

json certificate_json(const Certificate& c)
{
    return {{"max_over_p", real(c.max_over_p)},
            {"value_at_saddle", real(c.value_at_saddle)},
            {"min_over_eta", real(c.min_over_eta)},
            {"tolerance", real(c.tolerance)},
            {"passed", c.passed}};
}

EstimatorResult run_solver(const Context& ctx, const PartitionAlgebra& c)
{
    const bool brute = ctx.opts.solver && *ctx.opts.solver == "brute_force";
    if (brute)
        return brute_force_mmse(ctx.model.ms, ctx.model.xi, c, ctx.opts.grid_step ? ctx.opts.grid_step->value : 1e-3);
    return solve_mmse(ctx.model.ms, ctx.model.xi, c, io::solver_config(ctx.opts));
}

const Filtration* declared_filtration(const Context& ctx)
{
    return ctx.model.filtration ? &*ctx.model.filtration : nullptr;
}

json level_json(const Context& ctx)
{
    const int level = ctx.model.target_level(ctx.opts);
    return level < 0 ? json(nullptr) : json(level);
}

Report cmd_rho(const Context& ctx)
{
    const auto& m = ctx.model;
    const PartitionAlgebra c = m.target(ctx.opts);
    Report rep;
    const RhoValue r = rho(m.ms, m.xi);
    rep.body["rho"] = {{"value", real(r.value)}, {"argmax_generator", r.argmax_generator}, {"ties", r.ties}};
    rep.body["level"] = level_json(ctx);
    rep.body["ess_sup"] = values(ess_sup_conditional(m.ms, m.xi, c));
    rep.body["ess_inf"] = values(ess_inf_conditional(m.ms, m.xi, c));
    return rep;
}

Report cmd_solve(const Context& ctx)
{
    const auto& m = ctx.model;
    const PartitionAlgebra c = m.target(ctx.opts);
    const SolverConfig cfg = io::solver_config(ctx.opts);
    Report rep;
    const EstimatorResult r = run_solver(ctx, c);
    rep.warnings = r.warnings;
    rep.body["level"] = level_json(ctx);
    rep.body["estimator"] = estimator_json(r, m.ms, c);

    const Certificate cert = verify_saddle(m.ms, m.xi, c, r, cfg.tol);
    const bool kernel = kernel_member(m.ms, m.xi, c, r.eta_hat);
    const NsCondition ns = ns_condition(m.ms, m.xi, c, r.eta_hat);
    const KernelInterval interval = kernel_interval(m.ms, m.xi, c, declared_filtration(ctx));
    rep.body["certificate"] = certificate_json(cert);
    rep.body["kernel_member"] = kernel;
    rep.body["ns_condition"] = {{"inf_value", real(ns.inf_value)}, {"rho_sq", real(ns.rho_sq)}, {"holds", ns.holds}};
    rep.body["kernel_interval"] = {{"lower", values(interval.lower)},
                                   {"upper", values(interval.upper)},
                                   {"exact", interval.exact}};
    if (!interval.exact)
        rep.warnings.emplace_back("kernel interval is an outer description (stability not verified)");

    if (!r.converged())
        rep.code = kNonconvergence;
    else if (!cert.passed || !kernel || !ns.holds)
        rep.code = kCertificateFailure;
    return rep;
}

Report cmd_oracle(const Context& ctx)
{
    const auto& m = ctx.model;
    const PartitionAlgebra c = m.target(ctx.opts);
    const double step = ctx.opts.grid_step ? ctx.opts.grid_step->value : 1e-3;
    Report rep;
    const EstimatorResult oracle = brute_force_mmse(m.ms, m.xi, c, step);
    const EstimatorResult dual = solve_mmse(m.ms, m.xi, c, io::solver_config(ctx.opts));
    rep.warnings = dual.warnings;
    double eta_diff = 0.0;
    for (Index i = 0; i < m.xi.size(); ++i)
        eta_diff = std::max(eta_diff, std::abs(oracle.eta_hat[i] - dual.eta_hat[i]));
    const double alpha_diff = std::abs(oracle.alpha - dual.alpha);
    const bool agree = alpha_diff <= 1e-4 && eta_diff <= 2.0 * step;
    rep.body["level"] = level_json(ctx);
    rep.body["grid_step"] = step;
    rep.body["oracle"] = estimator_json(oracle, m.ms, c);
    rep.body["solver"] = estimator_json(dual, m.ms, c);
    rep.body["cross_check"] = {{"alpha_diff", real(alpha_diff)}, {"eta_sup_diff", real(eta_diff)}, {"agree", agree}};
    if (!dual.converged())
        rep.code = kNonconvergence;
    else if (!agree)
        rep.code = kCertificateFailure;
    return rep;
}

Report cmd_stability(const Context& ctx)
{
    const auto& m = ctx.model;
    if (!m.filtration)
        throw ValidationError("filtration", "stability needs a filtration or tree instance");
    const Filtration& f = *m.filtration;
    Report rep;
    const StabilityReport st = is_stable(m.ms, f);
    json s = {{"stable", st.stable}, {"label", st.label}, {"pastings_checked", st.pastings_checked}};
    if (st.witness) {
        s["witness"] = {{"base_generator", st.witness_pair->first},
                        {"tail_generator", st.witness_pair->second},
                        {"switch_level", st.witness->switch_level},
                        {"measure", values(st.witness->result.weights())},
                        {"hull_residual", real(st.witness_residual)}};
    }
    rep.body["stability"] = std::move(s);

    const auto depth = static_cast<int>(f.depth());
    std::vector<std::pair<int, int>> pairs;
    if (ctx.opts.sigma_level || ctx.opts.tau_level) {
        const int sigma = ctx.opts.sigma_level.value_or(0);
        const int tau = ctx.opts.tau_level.value_or(depth - 1);
        if (sigma > tau || tau >= depth)
            throw ValidationError("options.tau_level", "need sigma_level <= tau_level < number of levels");
        pairs.emplace_back(sigma, tau);
    } else {
        for (int s = 0; s < depth; ++s)
            for (int t = s; t < depth; ++t)
                pairs.emplace_back(s, t);
    }
    json checks = json::array();
    bool recursive = true;
    double worst = 0.0;
    for (auto [s, t] : pairs) {
        const RecursivityCheck rc = recursivity_check(m.ms, f, m.xi, static_cast<Index>(s), static_cast<Index>(t));
        recursive = recursive && rc.equal;
        worst = std::max(worst, rc.gap);
        checks.push_back({{"sigma_level", s}, {"tau_level", t}, {"gap", real(rc.gap)}, {"equal", rc.equal},
                          {"lhs", values(rc.lhs)}, {"rhs", values(rc.rhs)}});
    }
    rep.body["recursivity"] = {{"recursive", recursive}, {"max_gap", real(worst)}, {"checks", std::move(checks)}};
    // Stability implies recursivity; anything else is a failed certificate.
    if (st.stable && !recursive)
        rep.code = kCertificateFailure;
    return rep;
}

Report cmd_gexp(const Context& ctx)
{
    const auto& m = ctx.model;
    if (!m.tree)
        throw ValidationError("tree", "gexp needs a tree instance");
    const TreeModel& tm = *m.tree;
    const std::vector<double>& leaves = m.xi.values();
    const int level = ctx.opts.level.value_or(tm.depth() - 1);
    if (level >= tm.depth())
        throw ValidationError("options.level", "comparison level must be below the tree depth");
    Report rep;
    const GExpResult upper = g_expectation(tm, leaves);
    const GExpResult lower = g_expectation_lower(tm, leaves);
    const double rho_root = rho(m.ms, m.xi).value;
    const GExpComparison cmp = compare_gexp_mmse(tm, leaves, level, io::solver_config(ctx.opts));
    rep.warnings = cmp.estimator.warnings;
    rep.body["level"] = level;
    rep.body["generators"] = m.ms.size();
    rep.body["gexp"] = {{"y", values(upper.y)}, {"z", values(upper.z)}, {"root", real(upper.y.front())}};
    rep.body["gexp_lower"] = {{"y", values(lower.y)}, {"root", real(lower.y.front())}};
    rep.body["representation"] = {{"rho", real(rho_root)},
                                  {"difference", real(std::abs(rho_root - upper.y.front()))}};
    rep.body["comparison"] = {{"gexp_cond", values(cmp.gexp_cond)},
                              {"mmse", values(cmp.mmse)},
                              {"sup_diff", real(cmp.sup_diff)},
                              {"estimator", estimator_json(cmp.estimator, m.ms, tm.level_partition(level))}};
    if (!cmp.estimator.converged())
        rep.code = kNonconvergence;
    else if (std::abs(rho_root - upper.y.front()) > 1e-10 * (1.0 + std::abs(rho_root)))
        rep.code = kCertificateFailure;
    return rep;
}

Report cmd_tcsearch_replay(const std::string& path, const Flags& flags)
{
    const Context ctx = load(path, flags);
    if (!ctx.model.filtration)
        throw ValidationError("filtration", "replay needs a filtration instance");
    const auto& ann = ctx.inst.annotations;
    if (!ann.contains("chains") || !ann["chains"].contains("gap") || !ann["chains"]["gap"].is_number())
        throw ValidationError("chains.gap", "replay needs the recorded chain gap");
    const double recorded = ann["chains"]["gap"].get<double>();
    const TcChains chains = evaluate_chains(ctx.model.ms, ctx.model.xi, *ctx.model.filtration, io::solver_config(ctx.opts));
    Report rep;
    const double diff = std::abs(chains.gap - recorded);
    rep.body["replay"] = {{"recorded_gap", real(recorded)},
                          {"gap", real(chains.gap)},
                          {"difference", real(diff)},
                          {"reproduced", diff <= 1e-9},
                          {"chains", {{"fine", values(chains.fine)},
                                      {"two_stage", values(chains.two_stage)},
                                      {"direct", values(chains.direct)}}}};
    if (!chains.converged)
        rep.code = kNonconvergence;
    else if (diff > 1e-9)
        rep.code = kCertificateFailure;
    return rep;
}

Report cmd_tcsearch(const std::optional<std::string>& path, const Flags& flags)
{
    if (flags.replay)
        return cmd_tcsearch_replay(*flags.replay, flags);

    io::Options opts;
    if (path)
        opts = io::load_instance(*path).options;
    opts = merge(opts, flags);
    const std::uint64_t seed = opts.seed.value_or(kDefaultTcSeed);
    const std::uint64_t trials = opts.trials.value_or(1000);
    if (trials == 0)
        throw ArgumentError("trials must be at least 1");

    TcSearchOptions search;
    if (opts.tol)
        search.solver.tol = opts.tol->value;
    if (opts.max_iter)
        search.solver.max_iter = *opts.max_iter;
    if (flags.max_generators) {
        if (*flags.max_generators < 1)
            throw ValidationError("--max-generators", "must be at least 1");
        search.max_generators = *flags.max_generators;
        search.min_generators = std::min(search.min_generators, search.max_generators);
    }

    const TcSearchResult res = mmse_time_consistency_search(seed, static_cast<std::size_t>(trials), search);
    Report rep;
    rep.body["seed"] = seed;
    rep.body["trials"] = trials;
    rep.body["trials_run"] = res.trials_run;
    rep.body["skipped"] = res.skipped;
    rep.body["generator"] = "mt19937_64";
    rep.body["threshold"] = search.threshold;
    rep.body["found"] = res.counterexample.has_value();
    if (res.counterexample) {
        const json instance = io::counterexample_instance(*res.counterexample, search);
        rep.body["trial"] = res.counterexample->trial;
        rep.body["gap"] = real(res.counterexample->chains.gap);
        rep.body["counterexample"] = instance;
        rep.body["instance_digest"] = io::digest(io::parse_instance(instance));
        if (flags.counterexample_out) {
            std::ofstream out(*flags.counterexample_out);
            if (!out)
                throw ValidationError("--counterexample", "cannot write " + *flags.counterexample_out);
            out << instance.dump(2) << '\n';
        }
    } else {
        rep.warnings.emplace_back("no counterexample within the trial budget; this is not a proof of consistency");
    }
    return rep;
}

const char* status_name(int code)
{
    switch (code) {
    case kOk:
        return "ok";
    case kCertificateFailure:
        return "certificate_failure";
    case kValidationError:
        return "validation_error";
    case kNonconvergence:
        return "nonconvergence";
    case kGuardRefusal:
        return "guard_refusal";
    default:
        return "error";
    }
}

} // namespace

Outcome run(const std::string& command, const std::optional<std::string>& instance_path, const Flags& flags)
{
    const auto start = std::chrono::steady_clock::now();
    json file = json::object();
    file["format"] = io::kResultFormat;
    file["command"] = command;
    file["library_version"] = kLibraryVersion;
    file["instance_digest"] = nullptr;

    Outcome outcome;
    Report rep;
    try {
        if (!kCommands.count(command))
            throw ValidationError("command", "unknown command \"" + command + "\"");
        if (command == "tcsearch") {
            if (instance_path)
                file["instance_digest"] = io::digest(io::load_instance(*instance_path));
            rep = cmd_tcsearch(instance_path, flags);
        } else {
            if (!instance_path)
                throw ValidationError("instance", "an instance file is required");
            const Context ctx = load(*instance_path, flags);
            file["instance_digest"] = io::digest(ctx.inst);
            for (const auto& w : ctx.model.ms.warnings())
                rep.warnings.push_back(w);
            Report r = command == "rho"         ? cmd_rho(ctx)
                       : command == "solve"     ? cmd_solve(ctx)
                       : command == "oracle"    ? cmd_oracle(ctx)
                       : command == "stability" ? cmd_stability(ctx)
                                                : cmd_gexp(ctx);
            for (auto& w : r.warnings)
                if (std::find(rep.warnings.begin(), rep.warnings.end(), w) == rep.warnings.end())
                    rep.warnings.push_back(std::move(w));
            rep.code = r.code;
            rep.body = std::move(r.body);
        }
    } catch (const ValidationError& e) {
        rep.code = kValidationError;
        rep.body = json::object();
        file["error"] = {{"path", e.path()}, {"message", e.what()}};
    } catch (const GuardRefusal& e) {
        rep.code = kGuardRefusal;
        rep.body = json::object();
        file["error"] = {{"message", e.what()}};
    } catch (const InternalError& e) {
        rep.code = kCertificateFailure;
        rep.body = json::object();
        file["error"] = {{"message", e.what()}};
    } catch (const Error& e) {
        // Precondition failures on well-formed files (zero-mass blocks, improper sets, ...).
        rep.code = kValidationError;
        rep.body = json::object();
        file["error"] = {{"message", e.what()}};
    }

    file["result"] = std::move(rep.body);
    file["warnings"] = rep.warnings;
    file["status"] = status_name(rep.code);
    file["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    outcome.exit_code = rep.code;
    outcome.result_file = std::move(file);
    return outcome;
}

std::string render(const nlohmann::json& result_file)
{
    return result_file.dump(2) + "\n";
}

} // namespace mmse::cli
