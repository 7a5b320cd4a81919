#pragma once

// Two-level description of the flux qubit extracted from its plane-wave
// spectrum, plus tables of flux and charge matrix elements.

#include "fluxrabi/parallel.hpp"
#include "fluxrabi/plane_wave.hpp"
#include "fluxrabi/units.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace fluxrabi {

/// Qubit level labels used in tables: g, e, f, h, k, l.
inline constexpr std::array<const char*, 6> qubit_labels{"g", "e", "f", "h", "k", "l"};

/// Which inductance enters the qubit Hamiltonian: L_FQ (flux gauge) or Lc + L2 (charge gauge).
enum class Gauge { flux, charge };
std::string to_string(Gauge gauge);

struct QubitParams {
    double ECJ = 0.0;  // GHz
    double EJ = 0.0;   // GHz
    double EL = 0.0;   // GHz
};

QubitParams qubit_params(const DerivedCircuit& circuit, Gauge gauge);

struct QubitSweep {
    std::vector<double> phix;
    Eigen::MatrixXd energies;   // points x levels, GHz
    Eigen::MatrixXd flux_diag;  // points x 2: <g|Phi2|g>, <e|Phi2|e> in Phi0 units
    std::vector<double> q_ge;   // |<g|q2|e>| in 2e units
    bool range_warning = false;
};

QubitSweep sweep_qubit(const QubitParams& q, const std::vector<double>& phix,
                       const PlaneWaveBasis& basis = PlaneWaveBasis::qubit_default(),
                       Eigen::Index levels = 6, ExecPolicy policy = ExecPolicy::parallel);

struct TwoLevelFit {
    double Delta_q = 0.0;       // GHz
    double Ip = 0.0;            // nA
    double omega_os = 0.0;      // GHz
    double Phi2max = 0.0;       // Phi0
    double q2max = 0.0;         // 2e
    double fit_residual = 0.0;  // GHz^2
};

/// Least-squares fit of E0, E1 to omega_os -/+ sqrt(eps^2 + Delta_q^2)/2.
/// Fills Delta_q, Ip, omega_os and fit_residual.
TwoLevelFit fit_two_level(const std::vector<double>& phix, const Eigen::VectorXd& E0,
                          const Eigen::VectorXd& E1);

struct Phi2maxEstimate {
    double value = 0.0;   // canonical: from the ground state
    double from_g = 0.0;
    double from_e = 0.0;
};

/// Scale such that <g|Phi2|g> ~ -Phi2max sx and <e|Phi2|e> ~ +Phi2max sx,
/// sx = eps / sqrt(eps^2 + Delta_q^2). Throws std::runtime_error when the two
/// estimates differ by more than 1%.
Phi2maxEstimate extract_phi2max(const std::vector<double>& phix, const Eigen::VectorXd& flux_g,
                                const Eigen::VectorXd& flux_e, const TwoLevelFit& fit);

struct QubitMatrixElements {
    double flux_bias = 0.5;
    Eigen::MatrixXd flux_elems;     // 2 x 6: row i in {g,e}, col j; <j|Phi2|i> in Phi0
    Eigen::MatrixXcd charge_elems;  // 2 x 6: <j|q2|i> in 2e
};

QubitMatrixElements matrix_elements(const SubsystemSpectrum& spectrum, double phix);

struct QubitAnalysis {
    QubitSweep sweep;
    TwoLevelFit fit;
    Phi2maxEstimate phi2max;
};

/// Default fit grid: 41 points over [0.496, 0.504].
std::vector<double> default_qubit_grid();

/// Sweep, two-level fit, Phi2max and q2max (|<g|q2|e>| at 0.5) in one call.
QubitAnalysis analyze_qubit(const QubitParams& q,
                            const std::vector<double>& phix = default_qubit_grid(),
                            const PlaneWaveBasis& basis = PlaneWaveBasis::qubit_default(),
                            ExecPolicy policy = ExecPolicy::parallel);

}  // namespace fluxrabi
