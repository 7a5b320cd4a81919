#pragma once

// Physical constants, unit conventions and the purely algebraic reductions of
// the flux qubit / LC oscillator network.
//
// Unit system used throughout the library:
//   energies and frequencies  GHz (quantity divided by h)
//   inductances               pH
//   capacitances              pF for the oscillator, fF for the junction
//   flux                      units of the flux quantum
//   currents                  nA

#include <numbers>
#include <optional>

namespace fluxrabi {

struct PhysicalConstants {
    double h = 6.62607015e-34;       // J s
    double e = 1.602176634e-19;      // C
    double hbar = h / (2.0 * std::numbers::pi);
    double Phi0 = h / (2.0 * e);     // Wb
};

inline constexpr PhysicalConstants constants{};

/// (Phi0 / 2pi)^2 / L expressed in GHz for L in pH.
double inductive_energy_ghz(double inductance_pH);

/// e^2 / (2 C) expressed in GHz for C in fF.
double charging_energy_ghz(double capacitance_fF);

/// Junction inductance (pH) equivalent to a Josephson energy EJ/h (GHz).
double josephson_inductance_pH(double EJ_GHz);

/// Josephson energy EJ/h (GHz) equivalent to a junction inductance (pH).
double josephson_energy_ghz(double LJ_pH);

/// The seven physical parameters of the single-junction flux qubit inductively
/// coupled to an LC oscillator through the shared inductor Lc.
struct RawCircuit {
    double Lc = 0.0;     // pH, shared inductor
    double L1 = 0.0;     // pH, oscillator-only branch
    double L2 = 0.0;     // pH, qubit-only branch
    double C = 0.0;      // pF
    double CJ = 0.0;     // fF
    double EJ = 0.0;     // GHz
    double Phix = 0.5;   // Phi0

    /// Throws std::invalid_argument when a parameter is out of range.
    void validate() const;

    double LJ() const { return josephson_inductance_pH(EJ); }

    RawCircuit with_flux(double phix) const {
        RawCircuit copy = *this;
        copy.Phix = phix;
        return copy;
    }

    /// Circuit with Lc + L1 and Lc + L2 held at fixed sums.
    static RawCircuit with_fixed_sums(double Lc, double sum1, double sum2, double C_pF,
                                      double CJ_fF, double EJ_GHz, double phix = 0.5);
};

/// Default circuit of the reference study: Lc + L1 = 800 pH, Lc + L2 = 2050 pH,
/// C = 0.87 pF, LJ = 990 pH, CJ = 4.84 fF.
RawCircuit reference_circuit(double Lc, double phix = 0.5);

/// Star (Y) equivalent of the inductor triangle. A missing L12 marks the
/// decoupled case Lc = 0, so every coupling term derived from it is exactly zero.
struct StarInductances {
    double Lg1 = 0.0;                 // pH
    double Lg2 = 0.0;                 // pH
    std::optional<double> L12;        // pH; nullopt when Lc = 0

    bool coupled() const { return L12.has_value(); }
    double inverse_L12() const { return L12 ? 1.0 / *L12 : 0.0; }
};

/// Inductances of the naive "two separate components" picture, kept for the
/// comparison against the exact network reduction.
struct SeparateTreatment {
    double oscillator = 0.0;          // Lc + L1
    double qubit = 0.0;               // Lc + L2
    std::optional<double> coupling;   // (Lc + L1)(Lc + L2)/Lc, nullopt when Lc = 0
};

struct EffectiveInductances {
    double L_LC = 0.0;                // pH
    double L_FQ = 0.0;                // pH
    double L_FQ_charge = 0.0;         // pH, always Lc + L2
    std::optional<double> L12;        // pH
    SeparateTreatment separate;

    /// L_LC / L12, zero when decoupled.
    double coupling_ratio() const { return L12 ? L_LC / *L12 : 0.0; }
};

struct EnergyScales {
    double EC = 0.0;           // e^2/2C, GHz
    double ECJ = 0.0;          // e^2/2CJ, GHz
    double EJ = 0.0;           // GHz
    double EL = 0.0;           // (Phi0/2pi)^2 / L_LC, GHz
    double ELFQ = 0.0;         // (Phi0/2pi)^2 / L_FQ, GHz
    double ELFQ_charge = 0.0;  // (Phi0/2pi)^2 / (Lc + L2), GHz
    double EL12 = 0.0;         // (Phi0/2pi)^2 / L12, GHz; zero when decoupled
    double omega = 0.0;        // 1/(2pi sqrt(L_LC C)), GHz
    double Izpf = 0.0;         // nA
    double Vzpf = 0.0;         // uV
    double phi_zpf = 0.0;      // dimensionless flux zero-point amplitude of H1
    double n_zpf = 0.0;        // dimensionless charge zero-point amplitude of H1

    // Oscillator of the charge-gauge Hamiltonian, with 1/C' = 1/C + (L_LC/L12)^2 / CJ.
    double EC_charge = 0.0;    // e^2/2C', GHz
    double omega_charge = 0.0; // GHz
    double n_zpf_charge = 0.0; // dimensionless
};

StarInductances y_delta(const RawCircuit& raw);
EffectiveInductances effective_inductances(const StarInductances& star, const RawCircuit& raw);
EnergyScales energy_scales(const RawCircuit& raw, const EffectiveInductances& eff);

/// Everything derivable from a RawCircuit without diagonalizing anything.
struct DerivedCircuit {
    RawCircuit raw;
    StarInductances star;
    EffectiveInductances eff;
    EnergyScales scales;
};

DerivedCircuit derive_circuit(const RawCircuit& raw);

/// Energy bias epsilon/2pi (GHz) for persistent current Ip (nA) at flux bias phix.
double energy_bias_ghz(double Ip_nA, double phix);

/// Node currents (nA) from node fluxes given as 2pi Phi/Phi0, solving
/// [[Lc+L1, Lc], [Lc, Lc+L2]] (I1, I2) = (Phi1, Phi2).
struct NodeCurrents {
    double I1 = 0.0;
    double I2 = 0.0;
};
NodeCurrents node_currents(const RawCircuit& raw, double phase1, double phase2);

}  // namespace fluxrabi
