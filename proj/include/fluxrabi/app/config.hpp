#pragma once

// JSON run configuration. Every physical quantity carries a unit suffix in its
// key; unknown keys are rejected.

#include "fluxrabi/coupled.hpp"
#include "fluxrabi/fitting.hpp"
#include "fluxrabi/plane_wave.hpp"
#include "fluxrabi/units.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace fluxrabi::app {

inline constexpr int schema_version = 1;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double start = 0.494;
    double stop = 0.506;
    int points = 41;

    std::vector<double> values() const { return linspace(start, stop, static_cast<std::size_t>(points)); }
};

struct RunConfig {
    RawCircuit circuit;                  // Phix unused; biases come from the grid
    GridSpec phix;
    std::vector<double> Lc_list;         // pH
    double sum1 = 0.0, sum2 = 0.0;       // Lc + L1, Lc + L2 held fixed over Lc_list
    std::vector<double> wavefunction_phix{0.5};

    PlaneWaveBasis qubit_basis = PlaneWaveBasis::qubit_default();
    Truncation trunc_flux = default_truncation(Gauge::flux);
    Truncation trunc_charge = default_truncation(Gauge::charge);
    double convergence_tol = 1e-3;       // GHz
    int qubit_levels = 6;
    int coupled_levels = 8;
    int observable_states = 4;
    std::vector<int> fit_levels{3};
    FitOptions fit;
    int pert_max_m = 5;
    int pert_qubit_levels = 6;

    std::vector<std::string> tasks;
    std::string out_dir = "out";

    std::vector<std::string> defaults_used;  // dotted keys filled from defaults
    nlohmann::ordered_json effective;        // the configuration actually used

    Truncation truncation(Gauge g) const { return g == Gauge::flux ? trunc_flux : trunc_charge; }
    /// One circuit per entry of Lc_list at the fixed sums.
    std::vector<RawCircuit> circuits() const;
};

/// Known task names in canonical order.
const std::vector<std::string>& task_names();

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Re-validates after command-line overrides of tasks or output directory.
void validate_tasks(const std::vector<std::string>& tasks);

}  // namespace fluxrabi::app
