#include "fluxrabi/app/runner.hpp"
#include "fluxrabi/linalg.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"Flux qubit - LC oscillator circuit versus quantum Rabi model"};
    app.set_version_flag("--version", FLUXRABI_VERSION);
    app.require_subcommand(1);

    fluxrabi::app::RunOptions opt;
    std::string tasks, out;
    CLI::App* run = app.add_subcommand("run", "Run the tasks of a JSON configuration");
    run->add_option("--config", opt.config_path, "Configuration file")->required();
    run->add_option("--tasks", tasks, "Comma-separated task list overriding the configuration");
    run->add_option("--out", out, "Output directory overriding the configuration");
    run->add_option("--workers", opt.workers, "Worker threads for grid sweeps (0 = OpenMP default)");
    run->add_flag("--seedless", opt.seedless, "Accepted for compatibility; no computation is random");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fluxrabi::app::exit_config;
    }

    if (!tasks.empty()) {
        std::vector<std::string> list;
        std::stringstream ss(tasks);
        for (std::string t; std::getline(ss, t, ',');) {
            if (!t.empty()) list.push_back(t);
        }
        opt.tasks = list;
    }
    if (!out.empty()) opt.out_dir = out;

    fluxrabi::set_blas_threads(1);
    return fluxrabi::app::run(opt, std::cerr);
}
