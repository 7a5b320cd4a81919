#pragma once

// CLI tasks. Each produces one table and one metadata document.

#include "fluxrabi/app/config.hpp"
#include "fluxrabi/app/table.hpp"
#include "fluxrabi/parallel.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fluxrabi::app {

struct TaskOutput {
    std::vector<Row> rows;
    std::string csv;                   // set directly by tasks with their own schema
    nlohmann::ordered_json settings = nlohmann::ordered_json::object();
    std::vector<std::string> flags;    // non-convergence and range warnings
    bool converged = true;
};

TaskOutput run_task(const std::string& name, const RunConfig& cfg,
                    ExecPolicy policy = ExecPolicy::parallel);

/// Design defaults of the numerical methods, recorded in every metadata file.
nlohmann::ordered_json design_defaults(const RunConfig& cfg);

/// Metadata document written next to the task CSV.
nlohmann::ordered_json task_metadata(const std::string& name, const RunConfig& cfg,
                                     const TaskOutput& out);

}  // namespace fluxrabi::app
