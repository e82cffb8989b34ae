#pragma once

// Batch commands behind the command-line tool. Each returns the process exit
// status: 0 success or positive verdict, 1 negative verdict, non-convergence
// or solver refusal, 2 invalid input. Output files are written only after all
// computation has finished.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "aperiod/config.hpp"

namespace aperiod {

struct CommandContext {
    RunConfig config;
    std::filesystem::path out_dir;
    unsigned threads = 1;
};

int cmd_check(const CommandContext& ctx, std::ostream& log);
int cmd_solve(const CommandContext& ctx, std::ostream& log);
int cmd_scan(const CommandContext& ctx, std::ostream& log);
int cmd_distribution(const CommandContext& ctx, std::ostream& log);
int cmd_counterexample(const CommandContext& ctx, std::ostream& log);

/// Dispatches by name and maps exceptions to exit statuses, printing the diagnostic to `err`.
int run_command(const std::string& name, const CommandContext& ctx, std::ostream& log, std::ostream& err);

}  // namespace aperiod
