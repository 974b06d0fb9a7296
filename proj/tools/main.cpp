#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Minimum mean square estimation under sublinear expectations"};
    app.require_subcommand(1);

    std::optional<std::string> instance;
    mmse::cli::Flags flags;

    for (const char* name : {"solve", "rho", "oracle", "stability", "tcsearch", "gexp"}) {
        CLI::App* sub = app.add_subcommand(name);
        auto* pos = sub->add_option("instance", instance, "instance JSON file");
        if (std::string(name) != "tcsearch")
            pos->required();
        sub->add_option("--out", flags.out, "write the result file here instead of stdout");
        sub->add_option("--tol", flags.tol, "solver gap tolerance");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--trials", flags.trials, "search trials");
        sub->add_option("--grid-step", flags.grid_step, "oracle resolution");
        sub->add_option("--level", flags.level, "filtration or tree level to estimate against");
        if (std::string(name) == "tcsearch") {
            sub->add_option("--max-generators", flags.max_generators, "largest generator count drawn");
            sub->add_option("--replay", flags.replay, "re-evaluate a saved counterexample instance");
            sub->add_option("--counterexample", flags.counterexample_out, "write the counterexample instance here");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mmse::cli::kValidationError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const mmse::cli::Outcome outcome = mmse::cli::run(command, instance, flags);
    const std::string text = mmse::cli::render(outcome.result_file);

    if (outcome.result_file.contains("error")) {
        const auto& err = outcome.result_file["error"];
        std::cerr << "mmse " << command << ": " << err["message"].get<std::string>() << '\n';
    }

    if (flags.out) {
        std::ofstream out(*flags.out);
        if (!out) {
            std::cerr << "mmse: cannot write " << *flags.out << '\n';
            return mmse::cli::kValidationError;
        }
        out << text;
    } else {
        std::cout << text;
    }
    return outcome.exit_code;
}
