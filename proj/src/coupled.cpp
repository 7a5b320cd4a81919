#include "fluxrabi/coupled.hpp"

#include "fluxrabi/linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fluxrabi {

std::string to_string(Provenance provenance) {
    return provenance == Provenance::eigenbasis_product ? "eigenbasis-product"
                                                        : "planewave-product";
}

Truncation default_truncation(Gauge gauge) {
    return gauge == Gauge::flux ? Truncation{10, 40} : Truncation{24, 80};
}

ProductModel product_model(const DerivedCircuit& circuit, Gauge gauge, Truncation trunc,
                           const PlaneWaveBasis& qubit_basis) {
    if (trunc.Nq < 4 || trunc.Nph < 20) {
        throw std::invalid_argument("truncation requires Nq >= 4 and Nph >= 20");
    }
    if (trunc.Nq > qubit_basis.n_waves) {
        throw std::invalid_argument("Nq exceeds the qubit plane-wave basis size");
    }
    const EnergyScales& s = circuit.scales;
    const QubitParams qp = qubit_params(circuit, gauge);
    const SubsystemSpectrum q =
        diagonalize_flux_qubit(qp.ECJ, qp.EJ, qp.EL, circuit.raw.Phix, qubit_basis, trunc.Nq);

    ProductModel m;
    m.gauge = gauge;
    m.phix = circuit.raw.Phix;
    m.trunc = trunc;
    m.qubit_energies = q.energies;
    m.qubit_phase = phase_matrix(q);
    m.range_warning = q.range_warning;
    if (gauge == Gauge::flux) {
        m.omega = s.omega;
        m.coupling = s.EL12 * s.phi_zpf;
        m.phi1_zpf = s.phi_zpf;
        m.coupling_op = m.qubit_phase;
    } else {
        m.omega = s.omega_charge;
        m.coupling = 8.0 * s.ECJ * circuit.eff.coupling_ratio() * s.n_zpf_charge;
        m.phi1_zpf = 0.5 / s.n_zpf_charge;
        m.coupling_op = number_matrix(q).imag();
    }
    return m;
}

Eigen::MatrixXd product_hamiltonian(const ProductModel& m) {
    const int nq = m.trunc.Nq, nph = m.trunc.Nph;
    const Eigen::Index dim = static_cast<Eigen::Index>(nq) * nph;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int o = 0; o < nph; ++o) {
        for (int q = 0; q < nq; ++q) {
            h(o * nq + q, o * nq + q) = m.omega * (o + 0.5) + m.qubit_energies(q);
        }
    }
    // X(o+1, o) = sqrt(o+1) and X(o, o+1) = +/- sqrt(o+1)
    const double lower_sign = m.gauge == Gauge::flux ? 1.0 : -1.0;
    for (int o = 0; o + 1 < nph; ++o) {
        const double amp = m.coupling * std::sqrt(o + 1.0);
        h.block((o + 1) * nq, o * nq, nq, nq) -= lower_sign * amp * m.coupling_op;
        h.block(o * nq, (o + 1) * nq, nq, nq) -= amp * m.coupling_op;
    }
    return h;
}

CoupledSolution build_coupled_eigenbasis(const DerivedCircuit& circuit, Gauge gauge,
                                         Truncation trunc, Eigen::Index count, bool vectors,
                                         const PlaneWaveBasis& qubit_basis) {
    CoupledSolution out;
    out.model = product_model(circuit, gauge, trunc, qubit_basis);
    EigenSystem es = eigh(product_hamiltonian(out.model), count, vectors);
    CoupledSpectrum& s = out.spectrum;
    s.energies = std::move(es.values);
    s.vectors = std::move(es.vectors);
    s.gauge = gauge;
    s.provenance = Provenance::eigenbasis_product;
    s.trunc = trunc;
    s.basis2 = qubit_basis;
    s.phix = circuit.raw.Phix;
    return out;
}

void check_truncation(const DerivedCircuit& circuit, CoupledSpectrum& spectrum, double tol_ghz,
                      const PlaneWaveBasis& qubit_basis) {
    Truncation big = spectrum.trunc.doubled();
    big.Nq = std::min(big.Nq, qubit_basis.n_waves);
    const CoupledSolution ref =
        build_coupled_eigenbasis(circuit, spectrum.gauge, big, spectrum.energies.size(), false,
                                 qubit_basis);
    spectrum.doubling_shift = (ref.spectrum.energies - spectrum.energies).cwiseAbs().maxCoeff();
    spectrum.converged = spectrum.doubling_shift < tol_ghz;
}

PlaneWaveBasis default_oscillator_basis(const DerivedCircuit& circuit, Gauge gauge) {
    const EnergyScales& s = circuit.scales;
    return PlaneWaveBasis::oscillator_default(gauge == Gauge::flux ? s.EC : s.EC_charge, s.EL);
}

Eigen::MatrixXd planewave_hamiltonian(const DerivedCircuit& circuit, Gauge gauge,
                                      const PlaneWaveBasis& b1, const PlaneWaveBasis& b2) {
    const EnergyScales& s = circuit.scales;
    const Eigen::Index n1 = b1.n_waves, n2 = b2.n_waves;
    if (n1 * n2 > 4096) throw std::invalid_argument("plane-wave product dimension exceeds 4096");

    const double ec1 = gauge == Gauge::flux ? s.EC : s.EC_charge;
    const double el2 = gauge == Gauge::flux ? s.ELFQ : s.ELFQ_charge;
    const Eigen::MatrixXd t1 = 4.0 * ec1 * quadratic_kernel(b1);
    const Eigen::MatrixXd t2 = 4.0 * s.ECJ * quadratic_kernel(b2);
    const Eigen::VectorXd k1 = b1.wave_numbers(), k2 = b2.wave_numbers();
    const double kx = 2.0 * std::numbers::pi * circuit.raw.Phix;

    const Eigen::Index dim = n1 * n2;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n1; ++i) {
        h.block(i * n2, i * n2, n2, n2) += t2;
        for (Eigen::Index j = 0; j < n1; ++j) {
            if (t1(i, j) != 0.0) h.block(i * n2, j * n2, n2, n2).diagonal().array() += t1(i, j);
        }
    }
    for (Eigen::Index i = 0; i < n1; ++i) {
        for (Eigen::Index j = 0; j < n2; ++j) {
            double v = 0.5 * s.EL * k1(i) * k1(i) + 0.5 * el2 * k2(j) * k2(j) -
                       s.EJ * std::cos(k2(j) - kx);
            if (gauge == Gauge::flux) v -= s.EL12 * k1(i) * k2(j);
            h(i * n2 + j, i * n2 + j) += v;
        }
    }
    if (gauge == Gauge::charge && circuit.eff.L12) {
        // -8 ECJ alpha (iA) (x) (iB) = +8 ECJ alpha A (x) B
        const Eigen::MatrixXd a = linear_kernel(b1).imag();
        const Eigen::MatrixXd b = linear_kernel(b2).imag();
        const double c = 8.0 * s.ECJ * circuit.eff.coupling_ratio();
        for (Eigen::Index i = 0; i < n1; ++i) {
            for (Eigen::Index j = 0; j < n1; ++j) {
                if (a(i, j) != 0.0) h.block(i * n2, j * n2, n2, n2) += c * a(i, j) * b;
            }
        }
    }
    return h;
}

CoupledSpectrum build_coupled_planewave(const DerivedCircuit& circuit, Gauge gauge,
                                        const PlaneWaveBasis& basis1, const PlaneWaveBasis& basis2,
                                        Eigen::Index count) {
    EigenSystem es = eigh(planewave_hamiltonian(circuit, gauge, basis1, basis2), count, false);
    CoupledSpectrum s;
    s.energies = std::move(es.values);
    s.gauge = gauge;
    s.provenance = Provenance::planewave_product;
    s.basis1 = basis1;
    s.basis2 = basis2;
    s.phix = circuit.raw.Phix;
    return s;
}

std::vector<double> transitions(const CoupledSpectrum& spectrum,
                                const std::vector<std::pair<int, int>>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        if (i < 0 || j < 0 || i >= spectrum.energies.size() || j >= spectrum.energies.size()) {
            throw std::out_of_range("transitions: state index out of range");
        }
        out.push_back(spectrum.energies(j) - spectrum.energies(i));
    }
    return out;
}

Observables observables(const CoupledSolution& solution, const RawCircuit& raw,
                        const EffectiveInductances& eff, Eigen::Index state_index) {
    const ProductModel& m = solution.model;
    const CoupledSpectrum& s = solution.spectrum;
    if (state_index < 0 || state_index >= s.vectors.cols()) {
        throw std::out_of_range("observables: eigenvector not available");
    }
    const int nq = m.trunc.Nq, nph = m.trunc.Nph;
    const Eigen::VectorXd v = s.vectors.col(state_index);
    const Eigen::Map<const Eigen::MatrixXd> psi(v.data(), nq, nph);  // psi(q, o)

    const Eigen::MatrixXd overlap = psi.transpose() * psi;  // (o', o)
    double photons = 0.0, x = 0.0;
    for (int o = 0; o < nph; ++o) {
        photons += o * overlap(o, o);
        if (o + 1 < nph) x += 2.0 * std::sqrt(o + 1.0) * overlap(o + 1, o);
    }
    const double phi2 = (psi.transpose() * m.qubit_phase * psi).trace();

    Observables out;
    out.state_index = state_index;
    out.photon_number = photons;
    out.flux_expect_1 = m.phi1_zpf * x;
    out.flux_expect_2 = phi2;
    const double physical1 =
        m.gauge == Gauge::flux ? out.flux_expect_1
                               : out.flux_expect_1 + eff.coupling_ratio() * out.flux_expect_2;
    const NodeCurrents c = node_currents(raw, physical1, out.flux_expect_2);
    out.current_1 = c.I1;
    out.current_2 = c.I2;
    return out;
}

}  // namespace fluxrabi
