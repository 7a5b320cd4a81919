#include "fluxrabi/rabi.hpp"

#include "fluxrabi/linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluxrabi {

RabiParams map_circuit_to_rabi(const DerivedCircuit& circuit, const TwoLevelFit& qubit) {
    const EnergyScales& s = circuit.scales;
    RabiParams p;
    p.variant = Gauge::flux;
    p.omega = s.omega;
    p.Delta_q = qubit.Delta_q;
    p.Ip = qubit.Ip;
    p.g = s.EL12 * s.phi_zpf * 2.0 * std::numbers::pi * qubit.Phi2max;
    return p;
}

RabiParams map_circuit_to_rabi_charge(const DerivedCircuit& circuit, const TwoLevelFit& qubit) {
    const EnergyScales& s = circuit.scales;
    RabiParams p;
    p.variant = Gauge::charge;
    p.omega = s.omega_charge;
    p.Delta_q = qubit.Delta_q;
    p.Ip = qubit.Ip;
    p.g = 8.0 * s.ECJ * circuit.eff.coupling_ratio() * s.n_zpf_charge * qubit.q2max;
    return p;
}

int default_fock_size(const RabiParams& params) {
    return std::abs(params.g) >= 0.2 * params.omega ? 60 : 20;
}

BandedSymmetric rabi_hamiltonian(const RabiParams& params, double eps, int n_fock) {
    if (n_fock < 8) throw std::invalid_argument("n_fock must be at least 8");
    BandedSymmetric h(2 * static_cast<Eigen::Index>(n_fock), 3);
    const double sign = params.variant == Gauge::flux ? 1.0 : -1.0;
    for (int n = 0; n < n_fock; ++n) {
        const Eigen::Index up = 2 * n, down = 2 * n + 1;
        const double osc = params.omega * (n + 0.5);
        h.add(up, up, osc - 0.5 * params.Delta_q);
        h.add(down, down, osc + 0.5 * params.Delta_q);
        h.add(down, up, -0.5 * eps);
        if (n + 1 < n_fock) {
            const double c = params.g * std::sqrt(n + 1.0);
            // flux: g sx (a + a^dag); charge: i g sy (a - a^dag), real in this basis
            h.add(2 * (n + 1) + 1, up, c);
            h.add(2 * (n + 1), down, sign * c);
        }
    }
    return h;
}

RabiSpectrum diagonalize_rabi(const RabiParams& params, double eps, int n_fock,
                              Eigen::Index count, bool vectors) {
    EigenSystem es = eigh_banded(rabi_hamiltonian(params, eps, n_fock), count, vectors);
    RabiSpectrum out;
    out.energies = std::move(es.values);
    out.vectors = std::move(es.vectors);
    out.n_fock = n_fock;
    return out;
}

RabiSpectrum check_fock_convergence(const RabiParams& params, double eps, int n_fock,
                                    Eigen::Index count, double tol_ghz) {
    RabiSpectrum base = diagonalize_rabi(params, eps, n_fock, count);
    const RabiSpectrum twice = diagonalize_rabi(params, eps, 2 * n_fock, count);
    base.converged = (base.energies - twice.energies).cwiseAbs().maxCoeff() < tol_ghz;
    return base;
}

double rabi_photon_number(const RabiSpectrum& spectrum, Eigen::Index state) {
    if (spectrum.vectors.cols() <= state) {
        throw std::out_of_range("rabi_photon_number: eigenvector not available");
    }
    double n = 0.0;
    for (Eigen::Index i = 0; i < spectrum.vectors.rows(); ++i) {
        const double c = spectrum.vectors(i, state);
        n += static_cast<double>(i / 2) * c * c;
    }
    return n;
}

}  // namespace fluxrabi
