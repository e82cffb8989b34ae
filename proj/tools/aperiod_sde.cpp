// Command-line front end: aperiod_sde <command> --config FILE --out DIR [--seed N] [--threads N]

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "aperiod/commands.hpp"
#include "aperiod/error.hpp"

namespace {

unsigned threads_from_env() {
    const char* text = std::getenv("APERIOD_SDE_THREADS");
    if (text == nullptr || *text == '\0') return 1;
    char* end = nullptr;
    const unsigned long value = std::strtoul(text, &end, 10);
    if (*end != '\0' || value == 0) throw aperiod::InputError("APERIOD_SDE_THREADS must be a positive integer");
    return static_cast<unsigned>(value);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Almost periodic solutions of Hilbert-space SDEs: solve, scan and test"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    const char* descriptions[][2] = {
        {"check", "Check the contraction hypotheses"},
        {"solve", "Compute the bounded solution ensemble"},
        {"scan", "Scan noise-coupled shift distances for almost periods"},
        {"distribution", "Distributional almost-periodicity distances and tightness diagnostics"},
        {"counterexample", "Reproduce the Ursell-type separation"},
    };
    for (const auto& [name, description] : descriptions) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "INI configuration file")->required();
        sub->add_option("--out", out_dir, "Output directory (default: [output] dir)");
        sub->add_option("--seed", seed, "Override [ensemble] seed");
        sub->add_option("--threads", threads, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    aperiod::CommandContext ctx;
    try {
        ctx.config = aperiod::load_config(config_path);
        ctx.threads = threads ? *threads : threads_from_env();
    } catch (const aperiod::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    if (seed) ctx.config.ensemble.seed = *seed;
    ctx.out_dir = out_dir.empty() ? ctx.config.output.dir : out_dir;
    if (ctx.out_dir.empty() && command != "check") {
        std::cerr << "error: no output directory (--out or [output] dir)\n";
        return 2;
    }
    return aperiod::run_command(command, ctx, std::cout, std::cerr);
}
