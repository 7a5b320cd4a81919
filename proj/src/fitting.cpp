#include "fluxrabi/fitting.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fluxrabi {
namespace {

using Vec4 = std::array<double, 4>;

RabiParams from_scaled(const RabiParams& base, const Vec4& scale, const gsl_vector* x) {
    RabiParams p = base;
    p.omega = gsl_vector_get(x, 0) * scale[0];
    p.Delta_q = gsl_vector_get(x, 1) * scale[1];
    p.g = gsl_vector_get(x, 2) * scale[2];
    p.Ip = gsl_vector_get(x, 3) * scale[3];
    return p;
}

struct Objective {
    const FitProblem* problem;
    RabiParams base;
    Vec4 scale;
    ExecPolicy policy;
    int evals = 0;
};

double weighted_mean_square(const FitProblem& problem, const Eigen::MatrixXd& dev, int columns) {
    double num = 0.0, den = 0.0;
    for (Eigen::Index r = 0; r < dev.rows(); ++r) {
        const double w = problem.weights.empty() ? 1.0 : problem.weights[static_cast<std::size_t>(r)];
        num += w * dev.row(r).head(columns).squaredNorm();
        den += w * columns;
    }
    return 1e6 * num / den;
}

double objective_fn(const gsl_vector* x, void* params) {
    auto& obj = *static_cast<Objective*>(params);
    ++obj.evals;
    const RabiParams p = from_scaled(obj.base, obj.scale, x);
    if (!(p.omega > 0.0) || !(p.Ip > 0.0)) return std::numeric_limits<double>::max();
    const Eigen::MatrixXd dev = fit_deviations(*obj.problem, p, obj.policy);
    return weighted_mean_square(*obj.problem, dev, static_cast<int>(dev.cols()));
}

}  // namespace

void FitProblem::validate() const {
    if (levels_included < 1) throw std::invalid_argument("levels_included must be positive");
    if (phix.size() * static_cast<std::size_t>(levels_included) < 12) {
        throw std::invalid_argument("fit needs at least 12 data points for 4 parameters");
    }
    if (energies.rows() != static_cast<Eigen::Index>(phix.size()) ||
        energies.cols() < levels_included + 1) {
        throw std::invalid_argument("fit data table has the wrong shape");
    }
    if (!weights.empty() && weights.size() != phix.size()) {
        throw std::invalid_argument("fit weights must match the grid");
    }
    for (Eigen::Index r = 0; r < energies.rows(); ++r) {
        for (int i = 1; i <= levels_included; ++i) {
            if (!(energies(r, i) - energies(r, 0) > 0.0)) {
                throw std::invalid_argument("fit data frequencies must be positive");
            }
        }
    }
}

std::vector<std::pair<int, int>> fit_transitions(int levels_included) {
    std::vector<std::pair<int, int>> t;
    for (int i = 1; i <= levels_included; ++i) t.emplace_back(0, i);
    if (levels_included == 3) {
        t.emplace_back(1, 2);
        t.emplace_back(1, 3);
    }
    return t;
}

Eigen::MatrixXd fit_deviations(const FitProblem& problem, const RabiParams& params,
                               ExecPolicy policy) {
    const auto pairs = fit_transitions(problem.levels_included);
    const int n_fock = problem.n_fock > 0 ? problem.n_fock : default_fock_size(problem.initial_guess);
    const Eigen::Index count = problem.levels_included + 1;
    auto rows = map_grid(policy, problem.phix.size(), [&](std::size_t i) {
        const RabiSpectrum s =
            diagonalize_rabi(params, params.epsilon(problem.phix[i]), n_fock, count);
        const auto r = static_cast<Eigen::Index>(i);
        Eigen::VectorXd d(static_cast<Eigen::Index>(pairs.size()));
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto [a, b] = pairs[k];
            d(static_cast<Eigen::Index>(k)) = (s.energies(b) - s.energies(a)) -
                                              (problem.energies(r, b) - problem.energies(r, a));
        }
        return d;
    });
    Eigen::MatrixXd dev(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) dev.row(static_cast<Eigen::Index>(i)) = rows[i];
    return dev;
}

double residual_mhz2(const FitProblem& problem, const RabiParams& params, ExecPolicy policy) {
    const Eigen::MatrixXd dev = fit_deviations(problem, params, policy);
    return weighted_mean_square(problem, dev, problem.levels_included);
}

FitResult fit(const FitProblem& problem, const FitOptions& options, ExecPolicy policy) {
    problem.validate();
    const RabiParams& p0 = problem.initial_guess;
    if (p0.variant != problem.model_variant) {
        throw std::invalid_argument("initial guess variant does not match the fit problem");
    }
    Objective obj{&problem, p0,
                  {p0.omega, p0.Delta_q, std::max(std::abs(p0.g), 0.05 * p0.omega), p0.Ip},
                  policy};
    gsl_multimin_function fn{objective_fn, 4, &obj};

    gsl_vector* x = gsl_vector_alloc(4);
    gsl_vector* step = gsl_vector_alloc(4);
    gsl_vector_set(x, 0, 1.0);
    gsl_vector_set(x, 1, 1.0);
    gsl_vector_set(x, 2, p0.g / obj.scale[2]);
    gsl_vector_set(x, 3, 1.0);
    gsl_vector_set_all(step, options.initial_step);
    gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4);

    FitResult result;
    bool last_converged = false;
    double last_move = 0.0;
    for (int run = 0; run <= options.restarts; ++run) {
        Vec4 start{};
        for (std::size_t k = 0; k < 4; ++k) start[k] = gsl_vector_get(x, k);
        gsl_multimin_fminimizer_set(m, &fn, x, step);
        const int evals_at_start = obj.evals;
        last_converged = false;
        while (obj.evals - evals_at_start < options.max_evals_per_run) {
            ++result.iterations;
            if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
            if (gsl_multimin_fminimizer_size(m) < options.tolerance) {
                last_converged = true;
                break;
            }
        }
        gsl_vector_memcpy(x, gsl_multimin_fminimizer_x(m));
        last_move = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            const double now = gsl_vector_get(x, k);
            last_move = std::max(last_move, std::abs(now - start[k]) / std::max(std::abs(now), 1e-300));
        }
        if (run > 0 && last_converged && last_move < 1e-8) break;
        // restart from a fresh simplex around the best point, shrinking the step
        gsl_vector_set_all(step, options.initial_step * std::pow(0.1, run + 1));
    }
    result.params = from_scaled(p0, obj.scale, x);
    result.params.g = std::abs(result.params.g);
    result.params.Delta_q = std::abs(result.params.Delta_q);
    result.objective = gsl_multimin_fminimizer_minimum(m);
    result.converged = last_converged && last_move < 1e-8;

    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(step);
    gsl_vector_free(x);
    result.residual = residual_mhz2(problem, result.params, policy);
    return result;
}

FitResult fit_charge_variant(FitProblem problem, const FitOptions& options, ExecPolicy policy) {
    problem.model_variant = Gauge::charge;
    problem.initial_guess.variant = Gauge::charge;
    return fit(problem, options, policy);
}

std::vector<double> default_fit_grid() { return linspace(0.494, 0.506, 41); }

Eigen::MatrixXd circuit_levels(const RawCircuit& raw, const std::vector<double>& phix,
                               Truncation trunc, Eigen::Index count, ExecPolicy policy,
                               const PlaneWaveBasis& qubit_basis) {
    auto rows = map_grid(policy, phix.size(), [&](std::size_t i) {
        const DerivedCircuit c = derive_circuit(raw.with_flux(phix[i]));
        return build_coupled_eigenbasis(c, Gauge::flux, trunc, count, false, qubit_basis)
            .spectrum.energies;
    });
    Eigen::MatrixXd out(static_cast<Eigen::Index>(phix.size()), count);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return out;
}

MappedParams mapped_parameters(const RawCircuit& raw, ExecPolicy policy,
                               const PlaneWaveBasis& qubit_basis) {
    const DerivedCircuit c = derive_circuit(raw.with_flux(0.5));
    MappedParams out;
    out.qubit_flux = analyze_qubit(qubit_params(c, Gauge::flux), default_qubit_grid(),
                                   qubit_basis, policy)
                         .fit;
    out.qubit_charge = analyze_qubit(qubit_params(c, Gauge::charge), default_qubit_grid(),
                                     qubit_basis, policy)
                           .fit;
    out.flux = map_circuit_to_rabi(c, out.qubit_flux);
    out.charge = map_circuit_to_rabi_charge(c, out.qubit_charge);
    return out;
}

FitProblem circuit_fit_problem(const MappedParams& mapped, Gauge variant,
                               int levels_included, const std::vector<double>& phix,
                               const Eigen::MatrixXd& levels) {
    FitProblem p;
    p.phix = phix;
    p.energies = levels;
    p.model_variant = variant;
    p.levels_included = levels_included;
    p.initial_guess = variant == Gauge::flux ? mapped.flux : mapped.charge;
    return p;
}

std::vector<SweepFitRow> sweep_fit(const std::vector<double>& Lc_list, int levels_included,
                                   const std::vector<double>& phix, ExecPolicy policy) {
    std::vector<SweepFitRow> rows;
    for (double Lc : Lc_list) {
        SweepFitRow row;
        row.Lc = Lc;
        try {
            const RawCircuit raw = reference_circuit(Lc);
            row.mapped = mapped_parameters(raw, policy);
            const Eigen::MatrixXd levels = circuit_levels(
                raw, phix, default_truncation(Gauge::flux), levels_included + 1, policy);
            const FitProblem problem =
                circuit_fit_problem(row.mapped, Gauge::flux, levels_included, phix, levels);
            row.fitted = fit(problem, {}, policy);
        } catch (const std::exception&) {
            row.failed = true;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fluxrabi
