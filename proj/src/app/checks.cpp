#include "fluxrabi/app/checks.hpp"

#include "fluxrabi/coupled.hpp"
#include "fluxrabi/fitting.hpp"
#include "fluxrabi/linalg.hpp"
#include "fluxrabi/perturbation.hpp"
#include "fluxrabi/plane_wave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

namespace fluxrabi::app {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr double pi = std::numbers::pi;

Check make(std::string name, double Lc, double computed, double expected, std::string kind,
           std::string unit, double tol = 0.0) {
    Check c{std::move(name), Lc, computed, expected, tol, std::move(kind), std::move(unit), false};
    if (c.kind == "rel") {
        c.pass = std::abs(computed / expected - 1.0) <= tol;
    } else if (c.kind == "lt") {
        c.pass = computed < expected;
    } else if (c.kind == "le") {
        c.pass = computed <= expected;
    } else if (c.kind == "gt") {
        c.pass = computed > expected;
    } else {
        c.pass = computed >= expected;
    }
    return c;
}

void add_params(std::vector<Check>& out, const std::string& prefix, double Lc, const RabiParams& p,
                std::array<double, 4> expected, double tol) {
    out.push_back(make(prefix + "omega", Lc, p.omega, expected[0], "rel", "GHz", tol));
    out.push_back(make(prefix + "Delta_q", Lc, p.Delta_q, expected[1], "rel", "GHz", tol));
    out.push_back(make(prefix + "g", Lc, p.g, expected[2], "rel", "GHz", tol));
    out.push_back(make(prefix + "Ip", Lc, p.Ip, expected[3], "rel", "nA", tol));
}

// 5-point finite differences on a uniform flux grid, Dirichlet walls.
Eigen::VectorXd flux_grid_levels(double EC, const std::function<double(double)>& V,
                                 double half_width, int points, int count) {
    const double h = 2.0 * half_width / (points + 1);
    const double t = 4.0 * EC / (12.0 * h * h);
    BandedSymmetric m(points, 2);
    for (int i = 0; i < points; ++i) {
        const double phi = -half_width + h * (i + 1);
        m.add(i, i, 30.0 * t + V(phi));
        if (i + 1 < points) m.add(i + 1, i, -16.0 * t);
        if (i + 2 < points) m.add(i + 2, i, 1.0 * t);
    }
    return eigh_banded(m, count).values;
}

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

Truncation halved(Truncation t) { return {std::max(4, t.Nq / 2), std::max(20, t.Nph / 2)}; }

class Evaluator {
public:
    explicit Evaluator(ExecPolicy policy) : policy_(policy) {}

    Criterion run(int id) {
        Criterion c;
        c.id = id;
        switch (id) {
            case 1: unit_pins(c); break;
            case 2: mapping(c, 20.0, {6.033, 1.240, 0.424, 281.3}); break;
            case 3: mapping(c, 350.0, {6.272, 2.139, 7.338, 282.5}); break;
            case 4: charge_mapping(c); break;
            case 5: fit_three(c); break;
            case 6: fit_seven(c); break;
            case 7: higher_levels(c); break;
            case 8: gauge_invariance(c); break;
            case 9: observable_props(c); break;
            case 10: oracles(c); break;
            case 11: perturbation_suite(c); break;
            case 12: residual_ordering(c); break;
            default: throw std::out_of_range("no criterion " + std::to_string(id));
        }
        return c;
    }

private:
    const MappedParams& mapped(double Lc) {
        auto it = mapped_.find(Lc);
        if (it == mapped_.end()) it = mapped_.emplace(Lc, mapped_parameters(reference_circuit(Lc), policy_)).first;
        return it->second;
    }

    const Eigen::MatrixXd& levels(double Lc, int count) {
        const auto key = std::make_pair(Lc, count);
        auto it = levels_.find(key);
        if (it == levels_.end()) {
            it = levels_
                     .emplace(key, circuit_levels(reference_circuit(Lc), default_fit_grid(),
                                                  default_truncation(Gauge::flux), count, policy_))
                     .first;
        }
        return it->second;
    }

    const FitResult& fitted(double Lc, int lv, Gauge variant) {
        const auto key = std::make_tuple(Lc, lv, variant);
        auto it = fits_.find(key);
        if (it == fits_.end()) {
            const FitProblem p = circuit_fit_problem(mapped(Lc), variant, lv, default_fit_grid(),
                                                     levels(Lc, lv + 1));
            const FitResult r =
                variant == Gauge::flux ? fit(p, {}, policy_) : fit_charge_variant(p, {}, policy_);
            it = fits_.emplace(key, r).first;
        }
        return it->second;
    }

    void unit_pins(Criterion& c) {
        c.title = "unit conversion pins";
        c.checks.push_back(make("EJ(LJ=990pH)", nan, josephson_energy_ghz(990.0), 165.1, "rel", "GHz", 1e-3));
        c.checks.push_back(make("ECJ(CJ=4.84fF)", nan, charging_energy_ghz(4.84), 4.0, "rel", "GHz", 5e-3));
    }

    void mapping(Criterion& c, double Lc, std::array<double, 4> expected) {
        c.title = "flux-gauge mapping at Lc=" + std::to_string(int(Lc)) + " pH";
        add_params(c.checks, "mapped_", Lc, mapped(Lc).flux, expected, 0.01);
    }

    void charge_mapping(Criterion& c) {
        c.title = "charge-gauge mapping";
        for (auto [Lc, w, g] : {std::tuple{20.0, 6.085, 0.043}, std::tuple{350.0, 15.66, 0.492}}) {
            const RabiParams& p = mapped(Lc).charge;
            c.checks.push_back(make("mapped_omega_charge", Lc, p.omega, w, "rel", "GHz", 0.01));
            c.checks.push_back(make("mapped_g_charge", Lc, p.g, g, "rel", "GHz", 0.01));
        }
    }

    void fit_three(Criterion& c) {
        c.title = "Rabi fit, levels <= 3, Lc=350 pH";
        const FitResult& r = fitted(350.0, 3, Gauge::flux);
        add_params(c.checks, "fitted_", 350.0, r.params, {6.064, 2.388, 7.822, 282.9}, 0.02);
        c.checks.push_back(make("residual", 350.0, r.residual, 25.0, "le", "MHz^2"));
    }

    void fit_seven(Criterion& c) {
        c.title = "Rabi fit, levels <= 7, Lc=350 pH";
        const FitResult& r = fitted(350.0, 7, Gauge::flux);
        add_params(c.checks, "fitted_", 350.0, r.params, {6.054, 2.133, 7.562, 282.2}, 0.02);
        c.checks.push_back(make("residual", 350.0, r.residual, 152.0, "rel", "MHz^2", 0.3));
    }

    void higher_levels(Criterion& c) {
        c.title = "qubit E2 - E1 > 40 GHz over [0.49, 0.51]";
        const DerivedCircuit d = derive_circuit(reference_circuit(20.0));
        for (Gauge g : {Gauge::flux, Gauge::charge}) {
            const QubitSweep s = sweep_qubit(qubit_params(d, g), linspace(0.49, 0.51, 21),
                                             PlaneWaveBasis::qubit_default(), 6, policy_);
            const double gap = (s.energies.col(2) - s.energies.col(1)).minCoeff();
            c.checks.push_back(make("min_E2_minus_E1[" + to_string(g) + "]", 20.0, gap, 40.0, "gt", "GHz"));
        }
    }

    void gauge_invariance(Criterion& c) {
        c.title = "flux vs charge gauge eigenvalues";
        const Truncation tf = default_truncation(Gauge::flux), tq = default_truncation(Gauge::charge);
        for (double Lc : {20.0, 350.0}) {
            for (double x : {0.495, 0.5}) {
                const DerivedCircuit d = derive_circuit(reference_circuit(Lc, x));
                auto diff = [&](Truncation a, Truncation b) {
                    return max_abs_diff(build_coupled_eigenbasis(d, Gauge::flux, a).spectrum.energies,
                                        build_coupled_eigenbasis(d, Gauge::charge, b).spectrum.energies);
                };
                const double full = diff(tf, tq);
                const double half = diff(halved(tf), halved(tq));
                char tag[32];
                std::snprintf(tag, sizeof tag, "@%.4g", x);
                c.checks.push_back(make(std::string("max_diff") + tag, Lc, full, 0.01, "lt", "GHz"));
                c.checks.push_back(make(std::string("max_diff_vs_half_truncation") + tag, Lc, full, half,
                                        "lt", "GHz"));
            }
        }
    }

    void observable_props(Criterion& c) {
        c.title = "observable properties";
        for (double Lc : {20.0, 350.0}) {
            double worst = 0.0;
            for (Gauge g : {Gauge::flux, Gauge::charge}) {
                for (double x : {0.496, 0.498, 0.5, 0.503}) {
                    const DerivedCircuit d = derive_circuit(reference_circuit(Lc, x));
                    const CoupledSolution s = build_coupled_eigenbasis(d, g, default_truncation(g), 4, true);
                    for (Eigen::Index k = 0; k < 4; ++k) {
                        worst = std::max(worst, std::abs(observables(s, d.raw, d.eff, k).current_1));
                    }
                }
            }
            c.checks.push_back(make("max_abs_I1", Lc, worst, 0.01, "lt", "nA"));
        }

        std::vector<double> xs, ys;
        for (double Lc = 0.0; Lc <= 350.0; Lc += 50.0) {
            const DerivedCircuit d = derive_circuit(reference_circuit(Lc, 0.498));
            const CoupledSolution s =
                build_coupled_eigenbasis(d, Gauge::flux, default_truncation(Gauge::flux), 1, true);
            xs.push_back(Lc);
            ys.push_back(observables(s, d.raw, d.eff, 0).flux_expect_1);
        }
        const double n = double(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
            syy += ys[i] * ys[i];
        }
        const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
        c.checks.push_back(make("phi1_linear_in_Lc_R2", nan, r * r, 0.999, "gt", ""));
        c.checks.push_back(make("phi1_at_Lc0", 0.0, std::abs(ys.front()), 1e-12, "lt", "rad"));

        double charge_phi1 = 0.0;
        for (double x : {0.496, 0.498, 0.5, 0.503}) {
            const DerivedCircuit d = derive_circuit(reference_circuit(350.0, x));
            const CoupledSolution s =
                build_coupled_eigenbasis(d, Gauge::charge, default_truncation(Gauge::charge), 4, true);
            for (Eigen::Index k = 0; k < 4; ++k) {
                charge_phi1 = std::max(charge_phi1, std::abs(observables(s, d.raw, d.eff, k).flux_expect_1));
            }
        }
        c.checks.push_back(make("max_abs_phi1_charge", 350.0, charge_phi1, 1e-6, "lt", "rad"));

        const DerivedCircuit d = derive_circuit(reference_circuit(350.0, 0.5));
        const double nf = observables(build_coupled_eigenbasis(d, Gauge::flux, default_truncation(Gauge::flux), 1, true),
                                      d.raw, d.eff, 0)
                              .photon_number;
        const double nq =
            observables(build_coupled_eigenbasis(d, Gauge::charge, default_truncation(Gauge::charge), 1, true),
                        d.raw, d.eff, 0)
                .photon_number;
        c.checks.push_back(make("photon_ratio_charge_over_flux", 350.0, nq / nf, 0.2, "lt", ""));
    }

    void oracles(Criterion& c) {
        c.title = "oracle equivalence";
        for (double Lc : {20.0, 350.0}) {
            double worst = 0.0;
            for (double x : {0.499, 0.5}) {
                const DerivedCircuit d = derive_circuit(reference_circuit(Lc, x));
                const Eigen::VectorXd eb =
                    build_coupled_eigenbasis(d, Gauge::flux, default_truncation(Gauge::flux)).spectrum.energies;
                const Eigen::VectorXd pw =
                    build_coupled_planewave(d, Gauge::flux, default_oscillator_basis(d, Gauge::flux)).energies;
                worst = std::max(worst, max_abs_diff(eb, pw));
            }
            c.checks.push_back(make("eigenbasis_vs_planewave", Lc, worst, 1e-3, "lt", "GHz"));
        }

        for (double Lc : {20.0, 350.0}) {
            const DerivedCircuit d = derive_circuit(reference_circuit(Lc));
            const EnergyScales& s = d.scales;
            double worst = 0.0;
            for (Gauge g : {Gauge::flux, Gauge::charge}) {
                const QubitParams q = qubit_params(d, g);
                for (double x : {0.497, 0.5}) {
                    const SubsystemSpectrum pw =
                        diagonalize_flux_qubit(q.ECJ, q.EJ, q.EL, x, PlaneWaveBasis::qubit_default(), 6);
                    const auto V = [&](double phi) {
                        return -q.EJ * std::cos(phi - 2 * pi * x) + 0.5 * q.EL * phi * phi;
                    };
                    worst = std::max(worst, max_abs_diff(pw.energies, flux_grid_levels(q.ECJ, V, 3 * pi, 6000, 6)));
                }
            }
            c.checks.push_back(make("qubit_planewave_vs_flux_grid", Lc, worst, 1e-3, "lt", "GHz"));

            const SubsystemSpectrum osc =
                diagonalize_oscillator(s.EC, s.EL, PlaneWaveBasis::oscillator_default(s.EC, s.EL), 6);
            const double rms = std::pow(2.0 * s.EC / s.EL, 0.25);
            const auto V = [&](double phi) { return 0.5 * s.EL * phi * phi; };
            c.checks.push_back(make("oscillator_planewave_vs_flux_grid", Lc,
                                    max_abs_diff(osc.energies, flux_grid_levels(s.EC, V, 10 * rms, 4000, 6)),
                                    1e-3, "lt", "GHz"));
        }
    }

    void perturbation_suite(Criterion& c) {
        c.title = "perturbation suite at Lc=20 pH";
        const RawCircuit raw = reference_circuit(20.0);
        double first = 0.0;
        for (Gauge g : {Gauge::flux, Gauge::charge}) {
            for (double x : {0.496, 0.5, 0.503}) {
                const UncoupledSystem sys = uncoupled_system(derive_circuit(raw.with_flux(x)), g);
                for (int n = 0; n <= 3; ++n) {
                    for (int i = 0; i <= 1; ++i) first = std::max(first, std::abs(first_order(sys, n, i)));
                }
            }
        }
        c.checks.push_back(make("max_abs_first_order", 20.0, first, 1e-12, "lt", "GHz"));

        const std::vector<double> grid = linspace(0.498, 0.502, 21);
        const std::vector<DispersiveRow> rows = net_dispersive_shift(raw, Gauge::flux, grid, 5, 6, policy_);
        const std::vector<Eigen::VectorXd> exact = map_grid(policy_, grid.size(), [&](std::size_t k) {
            const DerivedCircuit d = derive_circuit(raw.with_flux(grid[k]));
            const CoupledSolution s = build_coupled_eigenbasis(d, Gauge::flux, default_truncation(Gauge::flux), 4);
            const std::vector<double> w = transitions(s.spectrum, {{0, 2}, {1, 3}});
            Eigen::VectorXd v(2);
            v << w[0] - d.scales.omega, w[1] - d.scales.omega;
            return v;
        });
        double worst_g = 0.0, worst_e = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            worst_g = std::max(worst_g, std::abs(rows[k].delta_g / exact[k](0) - 1.0));
            worst_e = std::max(worst_e, std::abs(rows[k].delta_e / exact[k](1) - 1.0));
        }
        c.checks.push_back(make("max_rel_dev_delta_g_vs_omega02", 20.0, worst_g, 0.1, "le", ""));
        c.checks.push_back(make("max_rel_dev_delta_e_vs_omega13", 20.0, worst_e, 0.1, "le", ""));

        const std::vector<double> fine = linspace(0.498, 0.502, 41);
        const std::vector<DispersiveRow> q = net_dispersive_shift(raw, Gauge::charge, fine, 5, 6, policy_);
        int dominated = 0;
        for (const DispersiveRow& r : q) dominated += summed_abs_chi(r, 2, 3) > summed_abs_chi(r, 0, 1);
        c.checks.push_back(make("charge_fh_dominance_fraction", 20.0, double(dominated) / double(q.size()),
                                0.8, "ge", ""));
    }

    void residual_ordering(Criterion& c) {
        c.title = "flux fit residual below charge-variant residual";
        for (double Lc : {20.0, 100.0, 200.0, 350.0}) {
            c.checks.push_back(make("flux_residual_vs_charge_variant", Lc, fitted(Lc, 3, Gauge::flux).residual,
                                    fitted(Lc, 3, Gauge::charge).residual, "lt", "MHz^2"));
        }
    }

    ExecPolicy policy_;
    std::map<double, MappedParams> mapped_;
    std::map<std::pair<double, int>, Eigen::MatrixXd> levels_;
    std::map<std::tuple<double, int, Gauge>, FitResult> fits_;
};

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

bool Criterion::pass() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<Criterion> evaluate_criteria(const std::vector<int>& ids, ExecPolicy policy) {
    Evaluator ev(policy);
    std::vector<Criterion> out;
    for (int id : ids) out.push_back(ev.run(id));
    return out;
}

std::string summary_line(const Criterion& criterion) {
    std::string s = criterion.pass() ? "PASS" : "FAIL";
    s += "  C" + std::to_string(criterion.id) + "  " + criterion.title + " |";
    for (const Check& c : criterion.checks) {
        s += ' ';
        if (!c.pass) s += '!';
        s += c.name;
        if (!std::isnan(c.Lc)) s += "[Lc=" + short_number(c.Lc) + "]";
        s += '=' + short_number(c.computed);
        if (c.kind == "rel") {
            s += " (" + short_number(c.expected) + " +-" + short_number(100 * c.tolerance) + "%)";
        } else {
            const std::string op = c.kind == "lt" ? "<" : c.kind == "le" ? "<=" : c.kind == "gt" ? ">" : ">=";
            s += " (" + op + ' ' + short_number(c.expected) + ")";
        }
        if (!c.unit.empty()) s += ' ' + c.unit;
    }
    return s;
}

}  // namespace fluxrabi::app
