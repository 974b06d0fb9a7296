#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace mmse::cli {

enum ExitCode : int {
    kOk = 0,
    kCertificateFailure = 1,
    kValidationError = 2,
    kNonconvergence = 3,
    kGuardRefusal = 4,
};

/// Command-line settings layered over the instance's options stanza.
struct Flags {
    std::optional<std::string> out;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<double> grid_step;
    std::optional<int> level;
    // tcsearch only
    std::optional<std::size_t> max_generators;
    std::optional<std::string> replay;
    std::optional<std::string> counterexample_out;
};

struct Outcome {
    int exit_code = kOk;
    nlohmann::json result_file;
};

/// Runs one command (solve, rho, oracle, stability, tcsearch, gexp). Never throws for input
/// problems: they are reported through the exit code and the result file.
Outcome run(const std::string& command, const std::optional<std::string>& instance_path, const Flags& flags);

/// Result file text: pretty-printed JSON with sorted keys and a trailing newline.
std::string render(const nlohmann::json& result_file);

} // namespace mmse::cli
