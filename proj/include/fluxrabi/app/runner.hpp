#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fluxrabi::app {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_not_converged = 3, exit_io = 4 };

struct RunOptions {
    std::string config_path;
    std::optional<std::vector<std::string>> tasks;  // overrides the config's list
    std::optional<std::string> out_dir;             // overrides output.dir
    int workers = 0;                                // 0 keeps the OpenMP default
    bool seedless = false;                          // accepted; nothing is random
};

/// Runs every requested task, writing <task>.csv and <task>.json. Progress and
/// errors go to `log`.
int run(const RunOptions& options, std::ostream& log);

}  // namespace fluxrabi::app
