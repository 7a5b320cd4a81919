#include "fluxrabi/qubit_model.hpp"

#include "fluxrabi/linalg.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluxrabi {
namespace {

constexpr double ip_scale = 100.0;  // Ip is fitted in units of 100 nA

struct TwoLevelData {
    const std::vector<double>* phix;
    const Eigen::VectorXd* E0;
    const Eigen::VectorXd* E1;
};

int two_level_residual(const gsl_vector* x, void* params, gsl_vector* f) {
    const auto& d = *static_cast<TwoLevelData*>(params);
    const double os = gsl_vector_get(x, 0);
    const double delta = gsl_vector_get(x, 1);
    const double ip = gsl_vector_get(x, 2) * ip_scale;
    const std::size_t n = d.phix->size();
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = energy_bias_ghz(ip, (*d.phix)[i]);
        const double half = 0.5 * std::sqrt(eps * eps + delta * delta);
        const auto idx = static_cast<Eigen::Index>(i);
        gsl_vector_set(f, i, (*d.E0)(idx) - (os - half));
        gsl_vector_set(f, n + i, (*d.E1)(idx) - (os + half));
    }
    return GSL_SUCCESS;
}

}  // namespace

std::string to_string(Gauge gauge) { return gauge == Gauge::flux ? "flux" : "charge"; }

QubitParams qubit_params(const DerivedCircuit& circuit, Gauge gauge) {
    const EnergyScales& s = circuit.scales;
    return {s.ECJ, s.EJ, gauge == Gauge::flux ? s.ELFQ : s.ELFQ_charge};
}

QubitSweep sweep_qubit(const QubitParams& q, const std::vector<double>& phix,
                       const PlaneWaveBasis& basis, Eigen::Index levels, ExecPolicy policy) {
    struct Point {
        Eigen::VectorXd energies;
        double fg = 0.0, fe = 0.0, qge = 0.0;
        bool warn = false;
    };
    const Eigen::Index count = std::max<Eigen::Index>(levels, 2);
    auto points = map_grid(policy, phix.size(), [&](std::size_t i) {
        const SubsystemSpectrum s = diagonalize_flux_qubit(q.ECJ, q.EJ, q.EL, phix[i], basis, count);
        const Eigen::MatrixXd p = phase_matrix(s);
        const Eigen::MatrixXcd n = number_matrix(s);
        Point pt;
        pt.energies = s.energies;
        pt.fg = p(0, 0) / (2.0 * std::numbers::pi);
        pt.fe = p(1, 1) / (2.0 * std::numbers::pi);
        pt.qge = std::abs(n(1, 0));
        pt.warn = s.range_warning;
        return pt;
    });

    QubitSweep out;
    out.phix = phix;
    out.energies.resize(static_cast<Eigen::Index>(phix.size()), count);
    out.flux_diag.resize(static_cast<Eigen::Index>(phix.size()), 2);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out.energies.row(r) = points[i].energies.transpose();
        out.flux_diag(r, 0) = points[i].fg;
        out.flux_diag(r, 1) = points[i].fe;
        out.q_ge.push_back(points[i].qge);
        out.range_warning = out.range_warning || points[i].warn;
    }
    return out;
}

TwoLevelFit fit_two_level(const std::vector<double>& phix, const Eigen::VectorXd& E0,
                          const Eigen::VectorXd& E1) {
    const std::size_t n = phix.size();
    if (n < 9 || static_cast<std::size_t>(E0.size()) != n || static_cast<std::size_t>(E1.size()) != n) {
        throw std::invalid_argument("fit_two_level: need at least 9 points with matching levels");
    }

    // Initial guess: minimum gap for Delta_q, the widest-bias gap for Ip.
    const Eigen::VectorXd gap = E1 - E0;
    Eigen::Index imin = 0, ifar = 0;
    gap.minCoeff(&imin);
    double far = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(phix[i] - 0.5) > far) {
            far = std::abs(phix[i] - 0.5);
            ifar = static_cast<Eigen::Index>(i);
        }
    }
    if (far == 0.0) throw std::invalid_argument("fit_two_level: grid has no flux-bias spread");
    const double delta0 = gap(imin);
    const double eps_far = std::sqrt(std::max(gap(ifar) * gap(ifar) - delta0 * delta0, 1e-12));
    const double ip0 = eps_far / energy_bias_ghz(1.0, 0.5 + far);
    const double os0 = 0.5 * (E0 + E1).mean();

    TwoLevelData data{&phix, &E0, &E1};
    gsl_multifit_nlinear_fdf fdf{};
    fdf.f = two_level_residual;
    fdf.df = nullptr;
    fdf.fvv = nullptr;
    fdf.n = 2 * n;
    fdf.p = 3;
    fdf.params = &data;

    gsl_multifit_nlinear_parameters fparams = gsl_multifit_nlinear_default_parameters();
    gsl_multifit_nlinear_workspace* w =
        gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &fparams, 2 * n, 3);
    gsl_vector* x = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, os0);
    gsl_vector_set(x, 1, delta0);
    gsl_vector_set(x, 2, ip0 / ip_scale);
    gsl_multifit_nlinear_init(x, &fdf, w);

    double chi0 = 0.0;
    gsl_blas_ddot(gsl_multifit_nlinear_residual(w), gsl_multifit_nlinear_residual(w), &chi0);
    int info = 0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const int status = gsl_multifit_nlinear_driver(500, 1e-14, 1e-14, 0.0, nullptr, nullptr, &info, w);
    gsl_set_error_handler(old);

    const gsl_vector* best = gsl_multifit_nlinear_position(w);
    double chi = 0.0;
    gsl_blas_ddot(gsl_multifit_nlinear_residual(w), gsl_multifit_nlinear_residual(w), &chi);

    TwoLevelFit fit;
    fit.omega_os = gsl_vector_get(best, 0);
    fit.Delta_q = std::abs(gsl_vector_get(best, 1));
    fit.Ip = std::abs(gsl_vector_get(best, 2)) * ip_scale;
    fit.fit_residual = chi / static_cast<double>(2 * n);
    gsl_vector_free(x);
    gsl_multifit_nlinear_free(w);

    if (status != GSL_SUCCESS && !(chi < 0.1 * chi0)) {
        throw ConvergenceError("two-level fit diverged: " + std::string(gsl_strerror(status)));
    }
    return fit;
}

Phi2maxEstimate extract_phi2max(const std::vector<double>& phix, const Eigen::VectorXd& flux_g,
                                const Eigen::VectorXd& flux_e, const TwoLevelFit& fit) {
    double sgg = 0.0, sge = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < phix.size(); ++i) {
        const double eps = energy_bias_ghz(fit.Ip, phix[i]);
        const double sx = eps / std::sqrt(eps * eps + fit.Delta_q * fit.Delta_q);
        const auto r = static_cast<Eigen::Index>(i);
        sgg += -flux_g(r) * sx;
        sge += flux_e(r) * sx;
        ss += sx * sx;
    }
    if (ss == 0.0) throw std::invalid_argument("extract_phi2max: grid has no flux-bias spread");
    Phi2maxEstimate out;
    out.from_g = sgg / ss;
    out.from_e = sge / ss;
    out.value = out.from_g;
    if (std::abs(out.from_g - out.from_e) > 0.01 * std::abs(out.from_g)) {
        throw std::runtime_error("Phi2max estimates from g and e disagree by more than 1%");
    }
    return out;
}

QubitMatrixElements matrix_elements(const SubsystemSpectrum& spectrum, double phix) {
    if (spectrum.size() < 6) throw std::invalid_argument("matrix_elements: need 6 qubit states");
    const Eigen::MatrixXd p = phase_matrix(spectrum) / (2.0 * std::numbers::pi);
    const Eigen::MatrixXcd n = number_matrix(spectrum);
    QubitMatrixElements out;
    out.flux_bias = phix;
    out.flux_elems.resize(2, 6);
    out.charge_elems.resize(2, 6);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 6; ++j) {
            out.flux_elems(i, j) = p(j, i);
            out.charge_elems(i, j) = n(j, i);
        }
    }
    return out;
}

std::vector<double> default_qubit_grid() { return linspace(0.496, 0.504, 41); }

QubitAnalysis analyze_qubit(const QubitParams& q, const std::vector<double>& phix,
                            const PlaneWaveBasis& basis, ExecPolicy policy) {
    QubitAnalysis out;
    out.sweep = sweep_qubit(q, phix, basis, 6, policy);
    out.fit = fit_two_level(phix, out.sweep.energies.col(0), out.sweep.energies.col(1));
    out.phi2max = extract_phi2max(phix, out.sweep.flux_diag.col(0), out.sweep.flux_diag.col(1),
                                  out.fit);
    out.fit.Phi2max = out.phi2max.value;
    const SubsystemSpectrum sym = diagonalize_flux_qubit(q.ECJ, q.EJ, q.EL, 0.5, basis, 2);
    out.fit.q2max = std::abs(number_matrix(sym)(1, 0));
    return out;
}

}  // namespace fluxrabi
