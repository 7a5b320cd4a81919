#include "fluxrabi/app/tasks.hpp"

#include "fluxrabi/app/checks.hpp"
#include "fluxrabi/coupled.hpp"
#include "fluxrabi/fitting.hpp"
#include "fluxrabi/perturbation.hpp"
#include "fluxrabi/qubit_model.hpp"
#include "fluxrabi/rabi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#ifndef FLUXRABI_VERSION
#define FLUXRABI_VERSION "unknown"
#endif

namespace fluxrabi::app {
namespace {

using nlohmann::ordered_json;

const std::vector<std::pair<int, int>> fig4_pairs{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}};

int pair_index(std::pair<int, int> p) { return 10 * p.first + p.second; }

std::string gname(Gauge g) { return to_string(g); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Emit {
    TaskOutput& out;
    double Lc;

    void scalar(const std::string& q, int index, double value, const std::string& unit,
                const std::string& gauge = "") const {
        out.rows.push_back({Lc, std::nullopt, q, index, value, unit, gauge});
    }
    void point(double x, const std::string& q, int index, double value, const std::string& unit,
               const std::string& gauge = "") const {
        out.rows.push_back({Lc, x, q, index, value, unit, gauge});
    }
    void flag(const std::string& msg) const {
        out.flags.push_back("Lc=" + fmt(Lc) + " pH: " + msg);
        out.converged = false;
    }
    // Runs fn; numerical failures are recorded and the task carries on.
    void guard(const std::string& what, const std::function<void()>& fn) const {
        try {
            fn();
        } catch (const std::exception& e) {
            flag(what + " failed: " + e.what());
        }
    }
};

std::vector<std::size_t> check_points(std::size_t n) {
    std::set<std::size_t> s{0, n / 2, n - 1};
    return {s.begin(), s.end()};
}

std::vector<double> check_phix(const std::vector<double>& grid) {
    std::vector<double> out;
    for (std::size_t i : check_points(grid.size())) out.push_back(grid[i]);
    return out;
}

void emit_params(const Emit& e, const std::string& prefix, int index, const RabiParams& p) {
    const std::string g = gname(p.variant);
    e.scalar(prefix + "omega", index, p.omega, "GHz", g);
    e.scalar(prefix + "Delta_q", index, p.Delta_q, "GHz", g);
    e.scalar(prefix + "g", index, p.g, "GHz", g);
    e.scalar(prefix + "Ip", index, p.Ip, "nA", g);
    e.scalar(prefix + "g_over_omega", index, p.g / p.omega, "1", g);
}

void emit_fit(const Emit& e, int index, const FitResult& r) {
    emit_params(e, "fitted_", index, r.params);
    const std::string g = gname(r.params.variant);
    e.scalar("fit_residual", index, r.residual, "MHz^2", g);
    e.scalar("fit_objective", index, r.objective, "MHz^2", g);
    e.scalar("fit_iterations", index, r.iterations, "1", g);
    e.scalar("fit_converged", index, r.converged ? 1.0 : 0.0, "1", g);
    if (!r.converged) e.flag(g + "-variant fit with " + std::to_string(index) + " levels did not converge");
}

std::vector<double> rabi_transitions(const RabiParams& p, double x,
                                     const std::vector<std::pair<int, int>>& pairs) {
    int top = 0;
    for (auto [i, j] : pairs) top = std::max({top, i, j});
    const RabiSpectrum s = diagonalize_rabi(p, p.epsilon(x), default_fock_size(p), top + 1);
    std::vector<double> w;
    for (auto [i, j] : pairs) w.push_back(s.energies(j) - s.energies(i));
    return w;
}

void check_fock(const Emit& e, const RunConfig& cfg, const RabiParams& p, int levels,
                const std::vector<double>& grid) {
    for (double x : check_phix(grid)) {
        const RabiSpectrum s =
            check_fock_convergence(p, p.epsilon(x), default_fock_size(p), levels, cfg.convergence_tol);
        if (!s.converged) {
            e.flag(gname(p.variant) + "-variant Rabi spectrum not converged in photon number at phix=" + fmt(x));
        }
    }
}

FitResult run_fit(const RunConfig& cfg, const MappedParams& m, Gauge variant, int levels,
                  const std::vector<double>& grid, const Eigen::MatrixXd& data, ExecPolicy pol) {
    const FitProblem p = circuit_fit_problem(m, variant, levels, grid, data);
    return variant == Gauge::flux ? fit(p, cfg.fit, pol) : fit_charge_variant(p, cfg.fit, pol);
}

std::vector<CoupledSolution> coupled_sweep(const RunConfig& cfg, const RawCircuit& raw, Gauge g,
                                           const std::vector<double>& grid, Eigen::Index count,
                                           bool vectors, ExecPolicy pol) {
    return map_grid(pol, grid.size(), [&](std::size_t k) {
        const DerivedCircuit c = derive_circuit(raw.with_flux(grid[k]));
        return build_coupled_eigenbasis(c, g, cfg.truncation(g), count, vectors, cfg.qubit_basis);
    });
}

void truncation_checks(const Emit& e, const RunConfig& cfg, const RawCircuit& raw,
                       const std::vector<double>& grid, std::vector<CoupledSolution>& sols) {
    for (std::size_t k : check_points(grid.size())) {
        CoupledSpectrum& s = sols[k].spectrum;
        check_truncation(derive_circuit(raw.with_flux(grid[k])), s, cfg.convergence_tol, cfg.qubit_basis);
        e.point(grid[k], "truncation_doubling_shift", 0, s.doubling_shift, "GHz", gname(s.gauge));
        if (!s.converged) {
            e.flag(gname(s.gauge) + "-gauge levels move by " + fmt(1e3 * s.doubling_shift) +
                   " MHz when truncations double at phix=" + fmt(grid[k]));
        }
    }
    for (std::size_t k = 0; k < sols.size(); ++k) {
        if (sols[k].model.range_warning) {
            e.flag("qubit wavefunction reaches the plane-wave basis edge at phix=" + fmt(grid[k]));
            break;
        }
    }
}

// ---------------------------------------------------------------------------

void qubit_spectrum(const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    const std::vector<double> grid = cfg.phix.values();
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        const DerivedCircuit c = derive_circuit(raw.with_flux(0.5));
        for (Gauge g : {Gauge::flux, Gauge::charge}) {
            const QubitParams q = qubit_params(c, g);
            const std::string gs = gname(g);
            e.scalar("ECJ", 0, q.ECJ, "GHz", gs);
            e.scalar("EJ", 0, q.EJ, "GHz", gs);
            e.scalar("EL", 0, q.EL, "GHz", gs);
            e.guard(gs + " qubit sweep", [&] {
                const QubitSweep s = sweep_qubit(q, grid, cfg.qubit_basis, cfg.qubit_levels, pol);
                if (s.range_warning) e.flag(gs + " qubit wavefunction reaches the plane-wave basis edge");
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    const auto r = static_cast<Eigen::Index>(k);
                    for (Eigen::Index i = 0; i < s.energies.cols(); ++i) {
                        e.point(grid[k], "E", int(i), s.energies(r, i), "GHz", gs);
                    }
                    e.point(grid[k], "phi2_diag", 0, s.flux_diag(r, 0), "Phi0", gs);
                    e.point(grid[k], "phi2_diag", 1, s.flux_diag(r, 1), "Phi0", gs);
                    e.point(grid[k], "q2_ge_abs", 0, s.q_ge[k], "2e", gs);
                }
            });
            e.guard(gs + " two-level fit", [&] {
                const QubitAnalysis a = analyze_qubit(q, default_qubit_grid(), cfg.qubit_basis, pol);
                e.scalar("Delta_q", 0, a.fit.Delta_q, "GHz", gs);
                e.scalar("Ip", 0, a.fit.Ip, "nA", gs);
                e.scalar("omega_os", 0, a.fit.omega_os, "GHz", gs);
                e.scalar("Phi2max", 0, a.phi2max.value, "Phi0", gs);
                e.scalar("Phi2max_from_e", 0, a.phi2max.from_e, "Phi0", gs);
                e.scalar("q2max", 0, a.fit.q2max, "2e", gs);
                e.scalar("two_level_fit_residual", 0, a.fit.fit_residual, "GHz^2", gs);
            });
        }
    }
    out.settings["gauge_column"] = "qubit inductance: flux = L_FQ, charge = Lc + L2";
    out.settings["index"] = "level number for E; 0 = g, 1 = e for phi2_diag";
    out.settings["two_level_fit_grid_Phi0"] = {0.496, 0.504, 41};
}

void inductance_compare(const RunConfig& cfg, ExecPolicy, TaskOutput& out) {
    const double inf = std::numeric_limits<double>::infinity();
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        const DerivedCircuit c = derive_circuit(raw);
        const EffectiveInductances& f = c.eff;
        const EnergyScales& s = c.scales;
        e.scalar("L1", 0, raw.L1, "pH");
        e.scalar("L2", 0, raw.L2, "pH");
        e.scalar("Lg1", 0, c.star.Lg1, "pH");
        e.scalar("Lg2", 0, c.star.Lg2, "pH");
        e.scalar("L12", 0, f.L12.value_or(inf), "pH");
        e.scalar("L_LC", 0, f.L_LC, "pH");
        e.scalar("L_FQ", 0, f.L_FQ, "pH");
        e.scalar("L_FQ_charge", 0, f.L_FQ_charge, "pH");
        e.scalar("coupling_ratio", 0, f.coupling_ratio(), "1");
        e.scalar("separate_oscillator", 0, f.separate.oscillator, "pH");
        e.scalar("separate_qubit", 0, f.separate.qubit, "pH");
        e.scalar("separate_coupling", 0, f.separate.coupling.value_or(inf), "pH");
        e.scalar("EC", 0, s.EC, "GHz");
        e.scalar("ECJ", 0, s.ECJ, "GHz");
        e.scalar("EJ", 0, s.EJ, "GHz");
        e.scalar("EL", 0, s.EL, "GHz");
        e.scalar("ELFQ", 0, s.ELFQ, "GHz");
        e.scalar("ELFQ_charge", 0, s.ELFQ_charge, "GHz");
        e.scalar("EL12", 0, s.EL12, "GHz");
        e.scalar("omega", 0, s.omega, "GHz");
        e.scalar("omega_charge", 0, s.omega_charge, "GHz");
        e.scalar("Izpf", 0, s.Izpf, "nA");
        e.scalar("Vzpf", 0, s.Vzpf, "uV");
        e.scalar("phi_zpf", 0, s.phi_zpf, "1");
        e.scalar("n_zpf", 0, s.n_zpf, "1");
        e.scalar("n_zpf_charge", 0, s.n_zpf_charge, "1");
    }
    out.settings["note"] = "L12 and separate_coupling are inf when Lc = 0";
}

void circuit_spectrum(Gauge g, const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    const std::vector<double> grid = cfg.phix.values();
    const std::string gs = gname(g);
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        e.guard(gs + "-gauge circuit spectrum", [&] {
            std::vector<CoupledSolution> sols = coupled_sweep(cfg, raw, g, grid, cfg.coupled_levels, false, pol);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const Eigen::VectorXd& E = sols[k].spectrum.energies;
                for (Eigen::Index i = 0; i < E.size(); ++i) {
                    e.point(grid[k], "E", int(i), E(i), "GHz", gs);
                    if (i > 0) e.point(grid[k], "omega_0i", int(i), E(i) - E(0), "GHz", gs);
                }
            }
            truncation_checks(e, cfg, raw, grid, sols);
        });
    }
    out.settings["truncation"] = {{"Nq", cfg.truncation(g).Nq}, {"Nph", cfg.truncation(g).Nph}};
    out.settings["truncation_check_phix_Phi0"] = check_phix(grid);
}

void rabi_map(const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        e.guard("mapping", [&] {
            const MappedParams m = mapped_parameters(raw, pol, cfg.qubit_basis);
            emit_params(e, "", 0, m.flux);
            emit_params(e, "", 0, m.charge);
            e.scalar("Phi2max", 0, m.qubit_flux.Phi2max, "Phi0", "flux");
            e.scalar("q2max", 0, m.qubit_charge.q2max, "2e", "charge");
        });
    }
    out.settings["gauge_column"] = "Rabi-model variant";
}

void fit_sweep(const RunConfig& cfg, ExecPolicy pol, TaskOutput& out, const std::vector<int>& levels,
               bool both_variants) {
    const std::vector<double> grid = cfg.phix.values();
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        e.guard("fit", [&] {
            const MappedParams m = mapped_parameters(raw, pol, cfg.qubit_basis);
            emit_params(e, "mapped_", 0, m.flux);
            emit_params(e, "mapped_", 0, m.charge);
            for (int lv : levels) {
                const Eigen::MatrixXd data =
                    circuit_levels(raw, grid, cfg.trunc_flux, lv + 1, pol, cfg.qubit_basis);
                for (Gauge v : {Gauge::flux, Gauge::charge}) {
                    const FitResult r = run_fit(cfg, m, v, lv, grid, data, pol);
                    if (v == Gauge::flux || both_variants) {
                        emit_fit(e, lv, r);
                        check_fock(e, cfg, r.params, lv + 1, grid);
                    } else {
                        e.scalar("fit_residual", lv, r.residual, "MHz^2", "charge");
                    }
                }
            }
        });
    }
    out.settings["index"] = "number of excited levels in the fit data (0 for mapped values)";
    out.settings["gauge_column"] = "Rabi-model variant; data are flux-gauge circuit levels";
    out.settings["fit_levels"] = levels;
}

void fig4(Gauge g, const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    const std::vector<double> grid = cfg.phix.values();
    const std::string gs = gname(g);
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        e.guard("fig4 " + gs, [&] {
            const MappedParams m = mapped_parameters(raw, pol, cfg.qubit_basis);
            std::vector<CoupledSolution> sols = coupled_sweep(cfg, raw, g, grid, 4, false, pol);
            truncation_checks(e, cfg, raw, grid, sols);
            Eigen::MatrixXd data(static_cast<Eigen::Index>(grid.size()), 4);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                data.row(static_cast<Eigen::Index>(k)) = sols[k].spectrum.energies.transpose();
            }
            const FitResult r = run_fit(cfg, m, g, 3, grid, data, pol);
            const RabiParams& mp = g == Gauge::flux ? m.flux : m.charge;
            emit_params(e, "mapped_", 0, mp);
            emit_fit(e, 3, r);
            check_fock(e, cfg, r.params, 4, grid);
            const auto fitted = map_grid(pol, grid.size(), [&](std::size_t k) {
                return rabi_transitions(r.params, grid[k], fig4_pairs);
            });
            const auto mapped = map_grid(pol, grid.size(), [&](std::size_t k) {
                return rabi_transitions(mp, grid[k], fig4_pairs);
            });
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const std::vector<double> w = transitions(sols[k].spectrum, fig4_pairs);
                for (std::size_t p = 0; p < fig4_pairs.size(); ++p) {
                    const int idx = pair_index(fig4_pairs[p]);
                    e.point(grid[k], "circuit_omega", idx, w[p], "GHz", gs);
                    e.point(grid[k], "rabi_fit_omega", idx, fitted[k][p], "GHz", gs);
                    e.point(grid[k], "rabi_map_omega", idx, mapped[k][p], "GHz", gs);
                }
            }
        });
    }
    out.settings["index"] = "transition ij encoded as 10 i + j";
    out.settings["gauge_column"] = "circuit gauge and Rabi-model variant";
}

void matrix_elements_task(const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    const std::vector<double> grid = cfg.phix.values();
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        const DerivedCircuit c = derive_circuit(raw.with_flux(0.5));
        for (Gauge g : {Gauge::flux, Gauge::charge}) {
            const std::string gs = gname(g);
            e.guard(gs + " matrix elements", [&] {
                const QubitParams q = qubit_params(c, g);
                const auto tables = map_grid(pol, grid.size(), [&](std::size_t k) {
                    const SubsystemSpectrum s =
                        diagonalize_flux_qubit(q.ECJ, q.EJ, q.EL, grid[k], cfg.qubit_basis, cfg.qubit_levels);
                    return matrix_elements(s, grid[k]);
                });
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    const QubitMatrixElements& t = tables[k];
                    for (Eigen::Index i = 0; i < t.flux_elems.rows(); ++i) {
                        const std::string lab = qubit_labels[static_cast<std::size_t>(i)];
                        for (Eigen::Index j = 0; j < t.flux_elems.cols(); ++j) {
                            e.point(grid[k], "phi2_elem_" + lab, int(j), t.flux_elems(i, j), "Phi0", gs);
                            e.point(grid[k], "q2_elem_im_" + lab, int(j), t.charge_elems(i, j).imag(), "2e", gs);
                        }
                    }
                }
            });
        }
    }
    out.settings["quantity"] = "phi2_elem_<i> index j = <j|Phi2|i>; q2_elem_im_<i> index j = Im <j|q2|i> (real part zero)";
    out.settings["gauge_column"] = "qubit inductance: flux = L_FQ, charge = Lc + L2";
}

void observables_task(const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    const std::vector<double> grid = cfg.phix.values();
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        for (Gauge g : {Gauge::flux, Gauge::charge}) {
            const std::string gs = gname(g);
            e.guard(gs + "-gauge observables", [&] {
                std::vector<CoupledSolution> sols =
                    coupled_sweep(cfg, raw, g, grid, cfg.observable_states, true, pol);
                const auto obs = map_grid(pol, grid.size(), [&](std::size_t k) {
                    const DerivedCircuit c = derive_circuit(raw.with_flux(grid[k]));
                    std::vector<Observables> v;
                    for (int s = 0; s < cfg.observable_states; ++s) v.push_back(observables(sols[k], c.raw, c.eff, s));
                    return v;
                });
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    for (const Observables& o : obs[k]) {
                        const int s = int(o.state_index);
                        e.point(grid[k], "photon_number", s, o.photon_number, "1", gs);
                        e.point(grid[k], "phase1", s, o.flux_expect_1, "rad", gs);
                        e.point(grid[k], "phase2", s, o.flux_expect_2, "rad", gs);
                        e.point(grid[k], "I1", s, o.current_1, "nA", gs);
                        e.point(grid[k], "I2", s, o.current_2, "nA", gs);
                    }
                }
                truncation_checks(e, cfg, raw, grid, sols);
            });
        }
    }
    out.settings["quantity"] = "phase = 2 pi <Phi>/Phi0 in the gauge's frame; currents from physical node fluxes";
    out.settings["index"] = "coupled eigenstate";
}

void perturbation_task(const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    const std::vector<double> grid = cfg.phix.values();
    const std::array<const char*, 4> targets{"0g", "0e", "1g", "1e"};
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        std::vector<Eigen::VectorXd> exact;
        e.guard("exact transitions", [&] {
            const std::vector<CoupledSolution> sols = coupled_sweep(cfg, raw, Gauge::flux, grid, 4, false, pol);
            for (const CoupledSolution& s : sols) {
                const std::vector<double> w = transitions(s.spectrum, {{0, 2}, {1, 3}});
                exact.push_back(Eigen::Vector2d(w[0], w[1]));
            }
        });
        for (Gauge g : {Gauge::flux, Gauge::charge}) {
            const std::string gs = gname(g);
            e.guard(gs + "-gauge perturbation", [&] {
                const std::vector<DispersiveRow> rows = net_dispersive_shift(
                    raw, g, grid, cfg.pert_max_m, cfg.pert_qubit_levels, pol, cfg.qubit_basis);
                for (std::size_t k = 0; k < grid.size(); ++k) {
                    const DispersiveRow& r = rows[k];
                    const double x = grid[k];
                    e.point(x, "delta_g", 0, r.delta_g, "GHz", gs);
                    e.point(x, "delta_e", 0, r.delta_e, "GHz", gs);
                    const std::array<const ShiftTable*, 4> tabs{&r.chi_0g, &r.chi_0e, &r.chi_1g, &r.chi_1e};
                    for (std::size_t t = 0; t < 4; ++t) {
                        const std::string tag = targets[t];
                        e.point(x, "first_order_" + tag, 0, tabs[t]->first_order, "GHz", gs);
                        e.point(x, "chi_total_" + tag, 0, tabs[t]->total_second_order, "GHz", gs);
                        e.point(x, "excluded_" + tag, 0, tabs[t]->excluded_count, "1", gs);
                        for (const Contributor& c : tabs[t]->contributors) {
                            e.point(x, "chi_" + tag, 10 * c.m + c.j, c.excluded ? 0.0 : c.chi, "GHz", gs);
                        }
                    }
                    if (!exact.empty()) {
                        const DerivedCircuit c = derive_circuit(raw.with_flux(x));
                        const double w = g == Gauge::flux ? c.scales.omega : c.scales.omega_charge;
                        e.point(x, "exact_delta_g", 0, exact[k](0) - w, "GHz", gs);
                        e.point(x, "exact_delta_e", 0, exact[k](1) - w, "GHz", gs);
                    }
                }
            });
        }
    }
    out.settings["index"] = "chi_<n i> index = 10 m + j over contributors |m j>";
    out.settings["exact_delta"] = "omega_02 and omega_13 of the coupled circuit minus the gauge's bare oscillator frequency";
    out.settings["degeneracy_guard_GHz"] = degeneracy_guard_ghz;
}

void wavefunctions(const RunConfig& cfg, ExecPolicy, TaskOutput& out) {
    const int states = std::min<int>(cfg.qubit_levels, int(qubit_labels.size()));
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        const DerivedCircuit c = derive_circuit(raw.with_flux(0.5));
        for (Gauge g : {Gauge::flux, Gauge::charge}) {
            const std::string gs = gname(g);
            const QubitParams q = qubit_params(c, g);
            for (double x : cfg.wavefunction_phix) {
                e.guard(gs + " wavefunctions", [&] {
                    const SubsystemSpectrum s = diagonalize_flux_qubit(q.ECJ, q.EJ, q.EL, x, cfg.qubit_basis, states);
                    const Eigen::VectorXd k = cfg.qubit_basis.wave_numbers();
                    for (Eigen::Index m = 0; m < k.size(); ++m) e.point(x, "phase2_grid", int(m), k(m), "rad", gs);
                    for (int st = 0; st < states; ++st) {
                        e.point(x, "E", st, s.energies(st), "GHz", gs);
                        const Eigen::VectorXd psi = flux_representation(s, st);
                        for (Eigen::Index m = 0; m < psi.size(); ++m) {
                            e.point(x, std::string("psi_") + qubit_labels[std::size_t(st)], int(m), psi(m),
                                    "rad^-1/2", gs);
                        }
                    }
                });
            }
        }
    }
    out.settings["index"] = "grid position of phase2_grid for psi_<label>; level for E";
    out.settings["gauge_column"] = "qubit inductance: flux = L_FQ, charge = Lc + L2";
}

void gauge_check(const RunConfig& cfg, ExecPolicy pol, TaskOutput& out) {
    const std::vector<double> pts = check_phix(cfg.phix.values());
    const Truncation tf = cfg.trunc_flux, tq = cfg.trunc_charge;
    const Truncation hf{std::max(4, tf.Nq / 2), std::max(20, tf.Nph / 2)};
    const Truncation hq{std::max(4, tq.Nq / 2), std::max(20, tq.Nph / 2)};
    for (const RawCircuit& raw : cfg.circuits()) {
        const Emit e{out, raw.Lc};
        e.guard("gauge check", [&] {
            const auto res = map_grid(pol, pts.size(), [&](std::size_t k) {
                const DerivedCircuit c = derive_circuit(raw.with_flux(pts[k]));
                auto solve = [&](Gauge g, Truncation t) {
                    return build_coupled_eigenbasis(c, g, t, cfg.coupled_levels, false, cfg.qubit_basis)
                        .spectrum.energies;
                };
                return std::array<Eigen::VectorXd, 4>{solve(Gauge::flux, tf), solve(Gauge::charge, tq),
                                                      solve(Gauge::flux, hf), solve(Gauge::charge, hq)};
            });
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const auto& [f, q, f2, q2] = res[k];
                for (Eigen::Index i = 0; i < f.size(); ++i) {
                    e.point(pts[k], "E", int(i), f(i), "GHz", "flux");
                    e.point(pts[k], "E", int(i), q(i), "GHz", "charge");
                }
                const double d = (f - q).cwiseAbs().maxCoeff();
                const double dh = (f2 - q2).cwiseAbs().maxCoeff();
                e.point(pts[k], "max_abs_diff", 0, d, "GHz");
                e.point(pts[k], "max_abs_diff_half_truncation", 0, dh, "GHz");
                if (!(d < 0.01)) e.flag("gauges differ by " + fmt(1e3 * d) + " MHz at phix=" + fmt(pts[k]));
                if (!(d < dh)) e.flag("gauge discrepancy does not shrink with truncation at phix=" + fmt(pts[k]));
            }
        });
    }
    out.settings["phix_Phi0"] = pts;
    out.settings["half_truncation_flux"] = {{"Nq", hf.Nq}, {"Nph", hf.Nph}};
    out.settings["half_truncation_charge"] = {{"Nq", hq.Nq}, {"Nph", hq.Nph}};
    out.settings["agreement_limit_GHz"] = 0.01;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + '"';
}

void paper_regression(const RunConfig&, ExecPolicy pol, TaskOutput& out) {
    std::vector<int> ids;
    for (int i = 1; i <= criterion_count; ++i) ids.push_back(i);
    std::vector<std::tuple<int, const Check*>> rows;
    const std::vector<Criterion> crit = evaluate_criteria(ids, pol);
    for (const Criterion& c : crit) {
        for (const Check& k : c.checks) rows.emplace_back(c.id, &k);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        const Check& x = *std::get<1>(a);
        const Check& y = *std::get<1>(b);
        const double lx = std::isnan(x.Lc) ? -1.0 : x.Lc, ly = std::isnan(y.Lc) ? -1.0 : y.Lc;
        return std::tie(std::get<0>(a), lx, x.name) < std::tie(std::get<0>(b), ly, y.name);
    });
    out.csv = "criterion,check,Lc_pH,computed,expected,rel_tolerance,comparison,unit,pass\n";
    for (const auto& [id, k] : rows) {
        out.csv += std::to_string(id) + ',' + csv_field(k->name) + ',' +
                   (std::isnan(k->Lc) ? std::string() : format_number(k->Lc)) + ',' +
                   format_number(k->computed) + ',' + format_number(k->expected) + ',' +
                   format_number(k->tolerance) + ',' + k->kind + ',' + k->unit + ',' +
                   (k->pass ? "1" : "0") + '\n';
    }
    ordered_json summary = ordered_json::object();
    for (const Criterion& c : crit) summary[std::to_string(c.id)] = {{"title", c.title}, {"pass", c.pass()}};
    out.settings["criteria"] = summary;
    out.settings["circuit"] = "reference circuit at the listed Lc; run configuration not used";
    out.settings["row_count"] = rows.size();
}

using TaskFn = std::function<void(const RunConfig&, ExecPolicy, TaskOutput&)>;

const std::map<std::string, TaskFn>& registry() {
    static const std::map<std::string, TaskFn> r{
        {"qubit-spectrum", qubit_spectrum},
        {"inductance-compare", inductance_compare},
        {"circuit-spectrum-flux", [](auto& c, auto p, auto& o) { circuit_spectrum(Gauge::flux, c, p, o); }},
        {"circuit-spectrum-charge", [](auto& c, auto p, auto& o) { circuit_spectrum(Gauge::charge, c, p, o); }},
        {"rabi-map", rabi_map},
        {"rabi-fit", [](auto& c, auto p, auto& o) { fit_sweep(c, p, o, c.fit_levels, true); }},
        {"fig4-flux", [](auto& c, auto p, auto& o) { fig4(Gauge::flux, c, p, o); }},
        {"fig4-charge", [](auto& c, auto p, auto& o) { fig4(Gauge::charge, c, p, o); }},
        {"fig5", [](auto& c, auto p, auto& o) { fit_sweep(c, p, o, {c.fit_levels.front()}, false); }},
        {"matrix-elements", matrix_elements_task},
        {"observables", observables_task},
        {"perturbation", perturbation_task},
        {"wavefunctions", wavefunctions},
        {"gauge-check", gauge_check},
        {"paper-regression", paper_regression},
    };
    return r;
}

}  // namespace

TaskOutput run_task(const std::string& name, const RunConfig& cfg, ExecPolicy policy) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("unknown task '" + name + "'");
    TaskOutput out;
    it->second(cfg, policy, out);
    if (out.csv.empty()) out.csv = to_csv(out.rows);
    return out;
}

ordered_json design_defaults(const RunConfig& cfg) {
    ordered_json d;
    d["physical_constants"] = {{"h_Js", constants.h}, {"e_C", constants.e}};
    d["qubit_basis"] = {{"n_max", cfg.qubit_basis.n_max},
                        {"waves", cfg.qubit_basis.n_waves},
                        {"grid_points", cfg.qubit_basis.grid_points}};
    d["phase_convention"] = "largest-|k| plane-wave coefficient of each eigenvector is positive";
    d["oscillator_basis"] = "64 plane waves, n_max = ceil(10 n_rms)";
    d["coupled_build"] = "product of subsystem eigenbases, index = oscillator * Nq + qubit";
    d["truncation_flux"] = {{"Nq", cfg.trunc_flux.Nq}, {"Nph", cfg.trunc_flux.Nph}};
    d["truncation_charge"] = {{"Nq", cfg.trunc_charge.Nq}, {"Nph", cfg.trunc_charge.Nph}};
    d["truncation_check"] =
        "levels compared with Nq and Nph doubled (Nq capped at the qubit basis size) at the first, "
        "middle and last flux point";
    d["convergence_tol_GHz"] = cfg.convergence_tol;
    d["fock_size"] = "60 photons when g/omega >= 0.2, else 20; checked against twice that";
    d["two_level_fit_grid_Phi0"] = {{"start", 0.496}, {"stop", 0.504}, {"points", 41}};
    d["optimizer"] = {{"method", "Nelder-Mead simplex (GSL nmsimplex2)"},
                      {"restarts", cfg.fit.restarts},
                      {"max_evals_per_run", cfg.fit.max_evals_per_run},
                      {"tolerance", cfg.fit.tolerance},
                      {"initial_step", cfg.fit.initial_step}};
    d["fit_data"] = "omega_0i for i <= levels, plus omega_12 and omega_13 when levels = 3";
    d["fit_residual"] = "mean squared omega_0i deviation, MHz^2";
    d["level_pairing"] = "energy order at each flux point";
    d["perturbation"] = {{"max_m", cfg.pert_max_m},
                         {"qubit_levels", cfg.pert_qubit_levels},
                         {"degeneracy_guard_GHz", degeneracy_guard_ghz}};
    d["randomness"] = "none";
    return d;
}

ordered_json task_metadata(const std::string& name, const RunConfig& cfg, const TaskOutput& out) {
    ordered_json m;
    m["task"] = name;
    m["schema_version"] = schema_version;
    m["code_version"] = FLUXRABI_VERSION;
    m["csv"] = name + ".csv";
    if (name == "paper-regression") {
        m["columns"] = "criterion,check,Lc_pH,computed,expected,rel_tolerance,comparison,unit,pass";
    } else {
        m["columns"] = "Lc_pH,Phix_Phi0,quantity,index,value,unit,gauge";
        m["row_order"] = "Lc, Phix (per-circuit scalars first), quantity, gauge, index";
        m["rows"] = out.rows.size();
    }
    m["status"] = out.converged ? "ok" : "not_converged";
    m["flags"] = out.flags;
    m["settings"] = out.settings;
    m["config"] = cfg.effective;
    m["defaults_used"] = cfg.defaults_used;
    m["design_defaults"] = design_defaults(cfg);
    return m;
}

}  // namespace fluxrabi::app
