#pragma once

// Least-squares fit of circuit transition frequencies with the Rabi model.

#include "fluxrabi/coupled.hpp"
#include "fluxrabi/parallel.hpp"
#include "fluxrabi/rabi.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fluxrabi {

struct FitProblem {
    std::vector<double> phix;
    Eigen::MatrixXd energies;     // points x (>= levels_included + 1), GHz, energy order
    Gauge model_variant = Gauge::flux;
    int levels_included = 3;      // 3 or 7
    RabiParams initial_guess;
    std::vector<double> weights;  // per point; empty means uniform
    int n_fock = 0;               // 0 picks default_fock_size(initial_guess)

    void validate() const;
};

struct FitOptions {
    int restarts = 3;
    int max_evals_per_run = 2000;
    double tolerance = 1e-10;     // relative simplex size
    double initial_step = 0.02;   // relative
};

struct FitResult {
    RabiParams params;
    double residual = 0.0;        // mean [delta omega_0i]^2 in MHz^2
    double objective = 0.0;       // value minimized (includes omega_12, omega_13 for 3 levels)
    int iterations = 0;
    bool converged = false;
};

/// Transitions compared per flux point: omega_0i for i <= levels, plus
/// omega_12 and omega_13 when levels == 3.
std::vector<std::pair<int, int>> fit_transitions(int levels_included);

/// Model minus data for every (point, transition), GHz; transitions as in fit_transitions.
Eigen::MatrixXd fit_deviations(const FitProblem& problem, const RabiParams& params,
                               ExecPolicy policy = ExecPolicy::parallel);

/// Mean squared omega_0i deviation in MHz^2.
double residual_mhz2(const FitProblem& problem, const RabiParams& params,
                     ExecPolicy policy = ExecPolicy::parallel);

/// Nelder-Mead over (omega, Delta_q, g, Ip) with restarts around the best point.
FitResult fit(const FitProblem& problem, const FitOptions& options = {},
              ExecPolicy policy = ExecPolicy::parallel);

/// Same optimizer with the charge-gauge Rabi variant.
FitResult fit_charge_variant(FitProblem problem, const FitOptions& options = {},
                             ExecPolicy policy = ExecPolicy::parallel);

/// Default fit grid: 41 points over [0.494, 0.506].
std::vector<double> default_fit_grid();

/// Lowest levels of the flux-gauge circuit over the grid (points x count).
Eigen::MatrixXd circuit_levels(const RawCircuit& raw, const std::vector<double>& phix,
                               Truncation trunc, Eigen::Index count,
                               ExecPolicy policy = ExecPolicy::parallel,
                               const PlaneWaveBasis& qubit_basis = PlaneWaveBasis::qubit_default());

struct MappedParams {
    RabiParams flux;
    RabiParams charge;
    TwoLevelFit qubit_flux;
    TwoLevelFit qubit_charge;
};

MappedParams mapped_parameters(const RawCircuit& raw, ExecPolicy policy = ExecPolicy::parallel,
                               const PlaneWaveBasis& qubit_basis = PlaneWaveBasis::qubit_default());

/// Fit problem on circuit data with the mapped parameters as initial guess.
FitProblem circuit_fit_problem(const MappedParams& mapped, Gauge variant,
                               int levels_included, const std::vector<double>& phix,
                               const Eigen::MatrixXd& levels);

struct SweepFitRow {
    double Lc = 0.0;
    MappedParams mapped;
    FitResult fitted;
    bool failed = false;
};

/// Lc sweep at fixed Lc + L1, Lc + L2 of the reference circuit.
std::vector<SweepFitRow> sweep_fit(const std::vector<double>& Lc_list, int levels_included,
                                   const std::vector<double>& phix = default_fit_grid(),
                                   ExecPolicy policy = ExecPolicy::parallel);

}  // namespace fluxrabi
