#pragma once

// Perturbative level shifts of the uncoupled qubit-oscillator product states
// |n i> under the coupling H12 = -coupling * A (x) B, with A acting on Fock
// states and B on qubit eigenstates.

#include "fluxrabi/parallel.hpp"
#include "fluxrabi/qubit_model.hpp"
#include "fluxrabi/units.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace fluxrabi {

struct UncoupledSystem {
    Gauge gauge = Gauge::flux;
    double omega = 0.0;               // GHz
    Eigen::VectorXd qubit_energies;   // GHz
    Eigen::MatrixXcd osc_op;          // <m|A|n>
    Eigen::MatrixXcd qubit_op;        // <j|B|i>
    double coupling = 0.0;            // GHz

    double energy(int n, int i) const { return omega * (n + 0.5) + qubit_energies(i); }
    std::complex<double> element(int m, int j, int n, int i) const {
        return -coupling * osc_op(m, n) * qubit_op(j, i);
    }
};

/// Flux gauge: A = a + a^dag, B = phi2. Charge gauge: A = -i (a - a^dag), B = n2.
UncoupledSystem uncoupled_system(const DerivedCircuit& circuit, Gauge gauge, int fock_states = 8,
                                 int qubit_states = 8,
                                 const PlaneWaveBasis& basis = PlaneWaveBasis::qubit_default());

struct Contributor {
    int m = 0;
    int j = 0;
    double chi = 0.0;       // GHz
    bool excluded = false;  // |E_ni - E_mj| < degeneracy_guard
};

struct ShiftTable {
    int n = 0;
    int i = 0;
    Gauge gauge = Gauge::flux;
    double first_order = 0.0;         // GHz
    double total_second_order = 0.0;  // GHz, excluded contributors left out
    std::vector<Contributor> contributors;
    int excluded_count = 0;
};

inline constexpr double degeneracy_guard_ghz = 1e-3;

double first_order(const UncoupledSystem& system, int n, int i);

/// chi_{ni,mj} = |<mj|H12|ni>|^2 / (E_ni - E_mj) for m <= max_m, j < qubit_levels.
ShiftTable second_order_breakdown(const UncoupledSystem& system, int n, int i, int max_m = 5,
                                  int qubit_levels = 6);

struct DispersiveRow {
    double phix = 0.5;
    double delta_g = 0.0;  // chi_1g - chi_0g, GHz
    double delta_e = 0.0;  // chi_1e - chi_0e, GHz
    ShiftTable chi_0g, chi_0e, chi_1g, chi_1e;
};

std::vector<DispersiveRow> net_dispersive_shift(const RawCircuit& raw, Gauge gauge,
                                                const std::vector<double>& phix, int max_m = 5,
                                                int qubit_levels = 6,
                                                ExecPolicy policy = ExecPolicy::parallel,
                                                const PlaneWaveBasis& basis =
                                                    PlaneWaveBasis::qubit_default());

/// Summed |chi| over the four target states restricted to qubit levels [j_lo, j_hi].
double summed_abs_chi(const DispersiveRow& row, int j_lo, int j_hi);

}  // namespace fluxrabi
