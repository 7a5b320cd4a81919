#include "fluxrabi/perturbation.hpp"

#include <cmath>
#include <stdexcept>

namespace fluxrabi {

UncoupledSystem uncoupled_system(const DerivedCircuit& circuit, Gauge gauge, int fock_states,
                                 int qubit_states, const PlaneWaveBasis& basis) {
    const EnergyScales& s = circuit.scales;
    const QubitParams qp = qubit_params(circuit, gauge);
    const SubsystemSpectrum q =
        diagonalize_flux_qubit(qp.ECJ, qp.EJ, qp.EL, circuit.raw.Phix, basis, qubit_states);

    UncoupledSystem sys;
    sys.gauge = gauge;
    sys.qubit_energies = q.energies;
    sys.osc_op = Eigen::MatrixXcd::Zero(fock_states, fock_states);
    const std::complex<double> minus_i(0.0, -1.0);
    for (int n = 0; n + 1 < fock_states; ++n) {
        const double r = std::sqrt(n + 1.0);
        if (gauge == Gauge::flux) {
            sys.osc_op(n, n + 1) = r;
            sys.osc_op(n + 1, n) = r;
        } else {
            sys.osc_op(n, n + 1) = minus_i * r;
            sys.osc_op(n + 1, n) = -minus_i * r;
        }
    }
    if (gauge == Gauge::flux) {
        sys.omega = s.omega;
        sys.coupling = s.EL12 * s.phi_zpf;
        sys.qubit_op = phase_matrix(q).cast<std::complex<double>>();
    } else {
        sys.omega = s.omega_charge;
        sys.coupling = 8.0 * s.ECJ * circuit.eff.coupling_ratio() * s.n_zpf_charge;
        sys.qubit_op = number_matrix(q);
    }
    return sys;
}

double first_order(const UncoupledSystem& system, int n, int i) {
    return system.element(n, i, n, i).real();
}

ShiftTable second_order_breakdown(const UncoupledSystem& system, int n, int i, int max_m,
                                  int qubit_levels) {
    if (max_m + 1 > system.osc_op.rows() || n >= system.osc_op.rows()) {
        throw std::out_of_range("second_order_breakdown: Fock range exceeds the oscillator table");
    }
    if (qubit_levels > system.qubit_op.rows() || i >= system.qubit_op.rows()) {
        throw std::out_of_range("second_order_breakdown: qubit range exceeds the computed states");
    }
    ShiftTable t;
    t.n = n;
    t.i = i;
    t.gauge = system.gauge;
    t.first_order = first_order(system, n, i);
    const double e0 = system.energy(n, i);
    for (int m = 0; m <= max_m; ++m) {
        for (int j = 0; j < qubit_levels; ++j) {
            if (m == n && j == i) continue;
            Contributor c{m, j, 0.0, false};
            const double gap = e0 - system.energy(m, j);
            const double weight = std::norm(system.element(m, j, n, i));
            if (std::abs(gap) < degeneracy_guard_ghz) {
                c.excluded = weight != 0.0;
                if (c.excluded) ++t.excluded_count;
            } else {
                c.chi = weight / gap;
                t.total_second_order += c.chi;
            }
            t.contributors.push_back(c);
        }
    }
    return t;
}

std::vector<DispersiveRow> net_dispersive_shift(const RawCircuit& raw, Gauge gauge,
                                                const std::vector<double>& phix, int max_m,
                                                int qubit_levels, ExecPolicy policy,
                                                const PlaneWaveBasis& basis) {
    const int fock = std::max(max_m, 1) + 2;
    const int qubits = std::max(qubit_levels, 2);
    return map_grid(policy, phix.size(), [&](std::size_t k) {
        const DerivedCircuit c = derive_circuit(raw.with_flux(phix[k]));
        const UncoupledSystem sys = uncoupled_system(c, gauge, fock, qubits, basis);
        DispersiveRow row;
        row.phix = phix[k];
        row.chi_0g = second_order_breakdown(sys, 0, 0, max_m, qubit_levels);
        row.chi_0e = second_order_breakdown(sys, 0, 1, max_m, qubit_levels);
        row.chi_1g = second_order_breakdown(sys, 1, 0, max_m, qubit_levels);
        row.chi_1e = second_order_breakdown(sys, 1, 1, max_m, qubit_levels);
        row.delta_g = row.chi_1g.total_second_order - row.chi_0g.total_second_order;
        row.delta_e = row.chi_1e.total_second_order - row.chi_0e.total_second_order;
        return row;
    });
}

double summed_abs_chi(const DispersiveRow& row, int j_lo, int j_hi) {
    double sum = 0.0;
    for (const ShiftTable* t : {&row.chi_0g, &row.chi_0e, &row.chi_1g, &row.chi_1e}) {
        for (const Contributor& c : t->contributors) {
            if (c.j >= j_lo && c.j <= j_hi) sum += std::abs(c.chi);
        }
    }
    return sum;
}

}  // namespace fluxrabi
