#include "fluxrabi/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fluxrabi {
namespace {

constexpr double kPico = 1e-12;
constexpr double kFemto = 1e-15;
constexpr double kGiga = 1e9;

double reduced_flux_quantum() { return constants.Phi0 / (2.0 * std::numbers::pi); }

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

double inductive_energy_ghz(double inductance_pH) {
    const double phi = reduced_flux_quantum();
    return phi * phi / (inductance_pH * kPico) / constants.h / kGiga;
}

double charging_energy_ghz(double capacitance_fF) {
    return constants.e * constants.e / (2.0 * capacitance_fF * kFemto) / constants.h / kGiga;
}

double josephson_inductance_pH(double EJ_GHz) {
    const double phi = reduced_flux_quantum();
    return phi * phi / (EJ_GHz * kGiga * constants.h) / kPico;
}

double josephson_energy_ghz(double LJ_pH) { return inductive_energy_ghz(LJ_pH); }

void RawCircuit::validate() const {
    if (!(Lc >= 0.0) || !std::isfinite(Lc)) {
        throw std::invalid_argument("Lc must be non-negative and finite");
    }
    require_positive(L1, "L1");
    require_positive(L2, "L2");
    require_positive(C, "C");
    require_positive(CJ, "CJ");
    require_positive(EJ, "EJ");
    if (!std::isfinite(Phix)) {
        throw std::invalid_argument("Phix must be finite");
    }
}

RawCircuit RawCircuit::with_fixed_sums(double Lc, double sum1, double sum2, double C_pF,
                                       double CJ_fF, double EJ_GHz, double phix) {
    RawCircuit raw{Lc, sum1 - Lc, sum2 - Lc, C_pF, CJ_fF, EJ_GHz, phix};
    raw.validate();
    return raw;
}

RawCircuit reference_circuit(double Lc, double phix) {
    return RawCircuit::with_fixed_sums(Lc, 800.0, 2050.0, 0.87, 4.84, josephson_energy_ghz(990.0),
                                       phix);
}

StarInductances y_delta(const RawCircuit& raw) {
    raw.validate();
    const double numerator = raw.Lc * raw.L1 + raw.Lc * raw.L2 + raw.L1 * raw.L2;
    StarInductances star;
    star.Lg1 = numerator / raw.L2;
    star.Lg2 = numerator / raw.L1;
    if (raw.Lc > 0.0) {
        star.L12 = numerator / raw.Lc;
    }
    return star;
}

EffectiveInductances effective_inductances(const StarInductances& star, const RawCircuit& raw) {
    EffectiveInductances eff;
    const double inv12 = star.inverse_L12();
    eff.L_LC = 1.0 / (1.0 / star.Lg1 + inv12);
    eff.L_FQ = 1.0 / (1.0 / star.Lg2 + inv12);
    eff.L_FQ_charge = raw.Lc + raw.L2;
    eff.L12 = star.L12;
    eff.separate.oscillator = raw.Lc + raw.L1;
    eff.separate.qubit = raw.Lc + raw.L2;
    if (raw.Lc > 0.0) {
        eff.separate.coupling = (raw.Lc + raw.L1) * (raw.Lc + raw.L2) / raw.Lc;
    }
    return eff;
}

EnergyScales energy_scales(const RawCircuit& raw, const EffectiveInductances& eff) {
    EnergyScales s;
    s.EC = charging_energy_ghz(raw.C * 1e3);
    s.ECJ = charging_energy_ghz(raw.CJ);
    s.EJ = raw.EJ;
    s.EL = inductive_energy_ghz(eff.L_LC);
    s.ELFQ = inductive_energy_ghz(eff.L_FQ);
    s.ELFQ_charge = inductive_energy_ghz(eff.L_FQ_charge);
    s.EL12 = eff.L12 ? inductive_energy_ghz(*eff.L12) : 0.0;

    const double L = eff.L_LC * kPico;
    const double C = raw.C * kPico;
    const double omega_rad = 1.0 / std::sqrt(L * C);
    s.omega = omega_rad / (2.0 * std::numbers::pi) / kGiga;
    s.Izpf = std::sqrt(constants.hbar * omega_rad / (2.0 * L)) * 1e9;
    s.Vzpf = std::sqrt(constants.hbar * omega_rad / (2.0 * C)) * 1e6;
    s.phi_zpf = std::pow(2.0 * s.EC / s.EL, 0.25);
    s.n_zpf = 0.5 / s.phi_zpf;

    const double alpha = eff.coupling_ratio();
    s.EC_charge = s.EC + alpha * alpha * s.ECJ;
    s.omega_charge = std::sqrt(8.0 * s.EC_charge * s.EL);
    s.n_zpf_charge = std::pow(s.EL / (32.0 * s.EC_charge), 0.25);
    return s;
}

DerivedCircuit derive_circuit(const RawCircuit& raw) {
    DerivedCircuit c;
    c.raw = raw;
    c.star = y_delta(raw);
    c.eff = effective_inductances(c.star, raw);
    c.scales = energy_scales(raw, c.eff);
    return c;
}

double energy_bias_ghz(double Ip_nA, double phix) {
    return 2.0 * Ip_nA * 1e-9 * constants.Phi0 * (phix - 0.5) / constants.h / kGiga;
}

NodeCurrents node_currents(const RawCircuit& raw, double phase1, double phase2) {
    const double a = raw.Lc + raw.L1;
    const double b = raw.Lc;
    const double d = raw.Lc + raw.L2;
    const double det = a * d - b * b;
    if (!(a > 0.0) || !(d > 0.0) || !(det > 0.0)) {
        throw std::invalid_argument("singular inductance matrix");
    }
    // Phi in Wb, L in H, I in nA.
    const double phi1 = reduced_flux_quantum() * phase1;
    const double phi2 = reduced_flux_quantum() * phase2;
    NodeCurrents out;
    out.I1 = (d * phi1 - b * phi2) / (det * kPico) * 1e9;
    out.I2 = (a * phi2 - b * phi1) / (det * kPico) * 1e9;
    return out;
}

}  // namespace fluxrabi
