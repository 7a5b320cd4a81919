#pragma once

// Generalized quantum Rabi model
//   H = omega (a^dag a + 1/2) - (eps sx + Delta sz)/2 + g sx (a + a^dag)
// and its charge-gauge variant with coupling i g sy (a - a^dag).
// Product basis index = 2 * n + s, qubit index s fastest, s = 0 for sz = +1.

#include "fluxrabi/linalg.hpp"
#include "fluxrabi/qubit_model.hpp"
#include "fluxrabi/units.hpp"

#include <Eigen/Dense>

namespace fluxrabi {

struct RabiParams {
    Gauge variant = Gauge::flux;
    double omega = 0.0;    // GHz; omega' for the charge variant
    double Delta_q = 0.0;  // GHz
    double Ip = 0.0;       // nA
    double g = 0.0;        // GHz; g' for the charge variant

    double epsilon(double phix) const { return energy_bias_ghz(Ip, phix); }
};

struct RabiSpectrum {
    Eigen::VectorXd energies;  // GHz, ascending
    Eigen::MatrixXd vectors;   // 2 n_fock x count, empty unless requested
    int n_fock = 0;
    bool converged = true;     // set by check_fock_convergence
};

/// Flux-gauge mapping: g = (L_LC/L12) Izpf Phi2max / h. Zero when Lc = 0.
RabiParams map_circuit_to_rabi(const DerivedCircuit& circuit, const TwoLevelFit& qubit);

/// Charge-gauge mapping: omega' from 1/C' = 1/C + (L_LC/L12)^2/CJ and
/// g' = 8 ECJ (L_LC/L12) n_zpf' q2max. `qubit` must be the fit of H2' (Lc + L2).
RabiParams map_circuit_to_rabi_charge(const DerivedCircuit& circuit, const TwoLevelFit& qubit);

/// 60 photons in deep-strong coupling (g/omega >= 0.2), 20 otherwise.
int default_fock_size(const RabiParams& params);

/// Banded Hamiltonian at energy bias eps (GHz).
BandedSymmetric rabi_hamiltonian(const RabiParams& params, double eps, int n_fock);

RabiSpectrum diagonalize_rabi(const RabiParams& params, double eps, int n_fock,
                              Eigen::Index count = 8, bool vectors = false);

/// Compares the lowest `count` levels at n_fock and 2 n_fock; converged when
/// every shift is below tol_ghz. Returns the n_fock result with the flag set.
RabiSpectrum check_fock_convergence(const RabiParams& params, double eps, int n_fock,
                                    Eigen::Index count = 8, double tol_ghz = 1e-3);

/// <a^dag a> in eigenstate `state` (vectors required).
double rabi_photon_number(const RabiSpectrum& spectrum, Eigen::Index state);

}  // namespace fluxrabi
