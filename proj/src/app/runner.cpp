#include "fluxrabi/app/runner.hpp"

#include "fluxrabi/app/config.hpp"
#include "fluxrabi/app/table.hpp"
#include "fluxrabi/app/tasks.hpp"
#include "fluxrabi/parallel.hpp"

#include <filesystem>
#include <ostream>

namespace fluxrabi::app {

int run(const RunOptions& options, std::ostream& log) {
    RunConfig cfg;
    try {
        cfg = load_config(options.config_path);
        if (options.tasks) cfg.tasks = *options.tasks;
        if (options.out_dir) cfg.out_dir = *options.out_dir;
        validate_tasks(cfg.tasks);
        if (options.workers < 0) throw ConfigError("--workers must be >= 0");
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return exit_config;
    }
    cfg.effective["tasks"] = cfg.tasks;
    cfg.effective["output"]["dir"] = cfg.out_dir;
    if (options.workers > 0) set_worker_count(options.workers);

    namespace fs = std::filesystem;
    try {
        fs::create_directories(cfg.out_dir);
    } catch (const fs::filesystem_error& e) {
        log << "i/o error: " << e.what() << '\n';
        return exit_io;
    }

    bool converged = true;
    for (const std::string& name : cfg.tasks) {
        TaskOutput out;
        try {
            out = run_task(name, cfg, ExecPolicy::parallel);
        } catch (const ConfigError& e) {
            log << "config error in " << name << ": " << e.what() << '\n';
            return exit_config;
        } catch (const std::exception& e) {
            out = TaskOutput{};
            out.csv = to_csv({});
            out.flags.push_back(std::string("task aborted: ") + e.what());
            out.converged = false;
        }
        try {
            const fs::path base = fs::path(cfg.out_dir) / name;
            write_file(base.string() + ".csv", out.csv);
            write_file(base.string() + ".json", task_metadata(name, cfg, out).dump(2) + "\n");
        } catch (const IoError& e) {
            log << "i/o error: " << e.what() << '\n';
            return exit_io;
        }
        log << name << ": " << (out.converged ? "ok" : "NOT CONVERGED") << '\n';
        for (const std::string& f : out.flags) log << "  " << f << '\n';
        converged = converged && out.converged;
    }
    return converged ? exit_ok : exit_not_converged;
}

}  // namespace fluxrabi::app
