#pragma once

// Full qubit-oscillator circuit Hamiltonian in flux gauge
//   H = H1 + H2 - Phi1 Phi2 / L12
// or charge gauge
//   H' = H1' + H2' - (L_LC / CJ L12) q1 q2,
// built either in a product of subsystem eigenbases (canonical) or on the
// product plane-wave grid (oracle). Product index = osc * Nq + qubit.

#include "fluxrabi/plane_wave.hpp"
#include "fluxrabi/qubit_model.hpp"
#include "fluxrabi/units.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace fluxrabi {

enum class Provenance { eigenbasis_product, planewave_product };
std::string to_string(Provenance provenance);

struct Truncation {
    int Nq = 10;   // qubit eigenstates kept
    int Nph = 40;  // oscillator Fock states kept

    Truncation doubled() const { return {2 * Nq, 2 * Nph}; }
};

/// (10, 40) in flux gauge, (24, 80) in charge gauge.
Truncation default_truncation(Gauge gauge);

/// Subsystem data of the eigenbasis-product build at one flux bias. The
/// coupling is -coupling * X (x) Q with X = a + a^dag, Q = phi2 (flux gauge) or
/// X = a - a^dag, Q = Im<j|n2|i> (charge gauge); both products are real.
struct ProductModel {
    Gauge gauge = Gauge::flux;
    double phix = 0.5;
    Truncation trunc;
    double omega = 0.0;          // GHz, omega or omega'
    double coupling = 0.0;       // GHz
    double phi1_zpf = 0.0;       // phi1 = phi1_zpf (a + a^dag) in the working frame
    Eigen::VectorXd qubit_energies;
    Eigen::MatrixXd qubit_phase;   // <j|phi2|i>
    Eigen::MatrixXd coupling_op;   // Q above
    bool range_warning = false;
};

ProductModel product_model(const DerivedCircuit& circuit, Gauge gauge, Truncation trunc,
                           const PlaneWaveBasis& qubit_basis = PlaneWaveBasis::qubit_default());

Eigen::MatrixXd product_hamiltonian(const ProductModel& model);

struct CoupledSpectrum {
    Eigen::VectorXd energies;  // GHz, ascending
    Eigen::MatrixXd vectors;   // empty unless requested
    Gauge gauge = Gauge::flux;
    Provenance provenance = Provenance::eigenbasis_product;
    Truncation trunc;                  // eigenbasis product
    PlaneWaveBasis basis1, basis2;     // plane-wave product
    double phix = 0.5;
    bool converged = true;
    double doubling_shift = 0.0;       // GHz, 0 until checked
};

struct CoupledSolution {
    ProductModel model;
    CoupledSpectrum spectrum;
};

CoupledSolution build_coupled_eigenbasis(const DerivedCircuit& circuit, Gauge gauge,
                                         Truncation trunc, Eigen::Index count = 8,
                                         bool vectors = false,
                                         const PlaneWaveBasis& qubit_basis =
                                             PlaneWaveBasis::qubit_default());

/// Re-solves with both truncations doubled; marks the spectrum unconverged when
/// any of the lowest levels moves by more than tol_ghz.
void check_truncation(const DerivedCircuit& circuit, CoupledSpectrum& spectrum,
                      double tol_ghz = 1e-3,
                      const PlaneWaveBasis& qubit_basis = PlaneWaveBasis::qubit_default());

/// Oscillator default: 64 waves, n_max = ceil(10 n_rms) of the gauge's oscillator.
PlaneWaveBasis default_oscillator_basis(const DerivedCircuit& circuit, Gauge gauge);

Eigen::MatrixXd planewave_hamiltonian(const DerivedCircuit& circuit, Gauge gauge,
                                      const PlaneWaveBasis& basis1, const PlaneWaveBasis& basis2);

CoupledSpectrum build_coupled_planewave(const DerivedCircuit& circuit, Gauge gauge,
                                        const PlaneWaveBasis& basis1,
                                        const PlaneWaveBasis& basis2 =
                                            PlaneWaveBasis::qubit_default(),
                                        Eigen::Index count = 8);

/// omega_ij = E_j - E_i for each pair.
std::vector<double> transitions(const CoupledSpectrum& spectrum,
                                const std::vector<std::pair<int, int>>& pairs);

struct Observables {
    Eigen::Index state_index = 0;
    double photon_number = 0.0;
    double flux_expect_1 = 0.0;  // 2 pi <Phi1> / Phi0 in the working frame
    double flux_expect_2 = 0.0;  // 2 pi <Phi2> / Phi0
    double current_1 = 0.0;      // nA
    double current_2 = 0.0;      // nA
};

/// Requires a spectrum built with vectors. Currents use the physical node
/// fluxes, which in charge gauge are phi1' + (L_LC/L12) phi2' and phi2'.
Observables observables(const CoupledSolution& solution, const RawCircuit& raw,
                        const EffectiveInductances& eff, Eigen::Index state_index);

}  // namespace fluxrabi
