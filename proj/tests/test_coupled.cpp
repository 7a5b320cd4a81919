#include "fluxrabi/coupled.hpp"
#include "fluxrabi/linalg.hpp"
#include "fluxrabi/rabi.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace fluxrabi;

namespace {

constexpr double h = 6.62607015e-34;
constexpr double e = 1.602176634e-19;
constexpr double Phi0 = h / (2.0 * e);
constexpr double two_pi = 2.0 * std::numbers::pi;

DerivedCircuit circuit(double Lc, double phix = 0.5) {
    return derive_circuit(reference_circuit(Lc, phix));
}

std::vector<double> direct_sum(double omega, const Eigen::VectorXd& q, int count) {
    std::vector<double> all;
    for (int n = 0; n < 20; ++n) {
        for (Eigen::Index i = 0; i < q.size(); ++i) all.push_back(omega * (n + 0.5) + q(i));
    }
    std::sort(all.begin(), all.end());
    all.resize(static_cast<size_t>(count));
    return all;
}

// Node currents in nA from 2 pi <Phi>/Phi0, solving the inductance matrix directly.
std::pair<double, double> currents_oracle(const RawCircuit& r, double p1, double p2) {
    const double f1 = p1 * Phi0 / two_pi, f2 = p2 * Phi0 / two_pi;
    const double a = (r.Lc + r.L1) * 1e-12, b = r.Lc * 1e-12, d = (r.Lc + r.L2) * 1e-12;
    const double det = a * d - b * b;
    return {(d * f1 - b * f2) / det * 1e9, (a * f2 - b * f1) / det * 1e9};
}

}  // namespace

TEST(Eigenbasis, DecoupledIsDirectSum) {
    const DerivedCircuit c = circuit(0, 0.499);
    for (Gauge g : {Gauge::flux, Gauge::charge}) {
        const QubitParams qp = qubit_params(c, g);
        const SubsystemSpectrum q =
            diagonalize_flux_qubit(qp.ECJ, qp.EJ, qp.EL, 0.499, PlaneWaveBasis::qubit_default(), 10);
        const double omega = g == Gauge::flux ? c.scales.omega : c.scales.omega_charge;
        const std::vector<double> ref = direct_sum(omega, q.energies, 8);
        const CoupledSolution s = build_coupled_eigenbasis(c, g, default_truncation(g));
        for (int i = 0; i < 8; ++i) EXPECT_NEAR(s.spectrum.energies(i), ref[size_t(i)], 1e-10);
    }
}

TEST(Eigenbasis, SymmetricMatrixAndOrthonormalVectors) {
    const DerivedCircuit c = circuit(350, 0.498);
    for (Gauge g : {Gauge::flux, Gauge::charge}) {
        const ProductModel m = product_model(c, g, {6, 20});
        const Eigen::MatrixXd H = product_hamiltonian(m);
        EXPECT_EQ(H.rows(), 120);
        EXPECT_LT(hermiticity_defect(H), 1e-12);
        const CoupledSolution s = build_coupled_eigenbasis(c, g, {6, 20}, 8, true);
        EXPECT_LT(orthonormality_defect(s.spectrum.vectors), 1e-10);
        for (int i = 1; i < 8; ++i) EXPECT_LE(s.spectrum.energies(i - 1), s.spectrum.energies(i));
    }
}

TEST(Eigenbasis, Preconditions) {
    const DerivedCircuit c = circuit(20);
    EXPECT_THROW(build_coupled_eigenbasis(c, Gauge::flux, {3, 40}), std::invalid_argument);
    EXPECT_THROW(build_coupled_eigenbasis(c, Gauge::flux, {10, 19}), std::invalid_argument);
    EXPECT_THROW(build_coupled_eigenbasis(c, Gauge::flux, {40, 40}), std::invalid_argument);
    EXPECT_EQ(default_truncation(Gauge::flux).Nq, 10);
    EXPECT_EQ(default_truncation(Gauge::charge).Nph, 80);
}

TEST(PlaneWave, AgreesWithEigenbasisInDeepStrongCoupling) {
    const DerivedCircuit c = circuit(350, 0.499);
    const CoupledSolution eb = build_coupled_eigenbasis(c, Gauge::flux, {16, 60});
    const CoupledSpectrum pw =
        build_coupled_planewave(c, Gauge::flux, default_oscillator_basis(c, Gauge::flux));
    EXPECT_EQ(pw.provenance, Provenance::planewave_product);
    EXPECT_LT((eb.spectrum.energies - pw.energies).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(PlaneWave, HermitianAndDecoupledSum) {
    const DerivedCircuit c = circuit(0, 0.5);
    const PlaneWaveBasis b1 = default_oscillator_basis(c, Gauge::flux);
    const PlaneWaveBasis b2{8.0, 16, 64};
    const Eigen::MatrixXd H = planewave_hamiltonian(c, Gauge::flux, b1, b2);
    EXPECT_LT(hermiticity_defect(H), 1e-12);
    const SubsystemSpectrum osc = diagonalize_oscillator(c.scales.EC, c.scales.EL, b1, 8);
    const SubsystemSpectrum q =
        diagonalize_flux_qubit(c.scales.ECJ, c.scales.EJ, c.scales.ELFQ, 0.5, b2, 8);
    std::vector<double> sums;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) sums.push_back(osc.energies(i) + q.energies(j));
    }
    std::sort(sums.begin(), sums.end());
    const CoupledSpectrum pw = build_coupled_planewave(c, Gauge::flux, b1, b2);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(pw.energies(i), sums[size_t(i)], 1e-9);
    EXPECT_THROW(build_coupled_planewave(c, Gauge::flux, b1, PlaneWaveBasis{8.0, 128, 512}),
                 std::invalid_argument);
}

TEST(Transitions, TelescopingAndRange) {
    const CoupledSolution s = build_coupled_eigenbasis(circuit(20, 0.499), Gauge::flux, {10, 40});
    const std::vector<double> w = transitions(s.spectrum, {{0, 1}, {1, 2}, {0, 2}, {2, 5}});
    EXPECT_NEAR(w[0] + w[1], w[2], 1e-10);
    EXPECT_GT(w[3], 0.0);
    EXPECT_THROW(transitions(s.spectrum, {{0, 8}}), std::out_of_range);
    EXPECT_THROW(transitions(s.spectrum, {{-1, 2}}), std::out_of_range);
}

TEST(Transitions, DispersiveOffsetsAtSymmetryPoint) {
    const DerivedCircuit c = circuit(20, 0.5);
    const CoupledSolution s = build_coupled_eigenbasis(c, Gauge::flux, {10, 40});
    const std::vector<double> w = transitions(s.spectrum, {{0, 2}, {1, 3}});
    const double d02 = w[0] - c.scales.omega, d13 = w[1] - c.scales.omega;
    EXPECT_LT(std::abs(d02), 0.05);
    EXPECT_LT(std::abs(d13), 0.05);
    EXPECT_LT(d02 * d13, 0.0);
}

TEST(Gauges, SameEigenenergies) {
    for (double Lc : {20.0, 350.0}) {
        for (double x : {0.495, 0.5}) {
            const DerivedCircuit c = circuit(Lc, x);
            const CoupledSolution f = build_coupled_eigenbasis(c, Gauge::flux, default_truncation(Gauge::flux));
            const CoupledSolution q =
                build_coupled_eigenbasis(c, Gauge::charge, default_truncation(Gauge::charge));
            EXPECT_LT((f.spectrum.energies - q.spectrum.energies).cwiseAbs().maxCoeff(), 1e-2)
                << Lc << " " << x;
        }
    }
}

TEST(Gauges, DiscrepancyShrinksWithTruncation) {
    const DerivedCircuit c = circuit(350, 0.5);
    const Eigen::VectorXd f = build_coupled_eigenbasis(c, Gauge::flux, {16, 60}).spectrum.energies;
    double prev = 1e9;
    for (Truncation t : {Truncation{10, 40}, Truncation{16, 60}, Truncation{24, 80}}) {
        const Eigen::VectorXd q = build_coupled_eigenbasis(c, Gauge::charge, t).spectrum.energies;
        const double d = (f - q).cwiseAbs().maxCoeff();
        EXPECT_LT(d, prev);
        prev = d;
    }
}

TEST(Eigenbasis, FluxBiasMirrorSymmetry) {
    for (double d : {0.001, 0.004}) {
        const Eigen::VectorXd lo =
            build_coupled_eigenbasis(circuit(350, 0.5 - d), Gauge::flux, {10, 40}).spectrum.energies;
        const Eigen::VectorXd hi =
            build_coupled_eigenbasis(circuit(350, 0.5 + d), Gauge::flux, {10, 40}).spectrum.energies;
        EXPECT_LT((lo - hi).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(Eigenbasis, TruncationCheck) {
    const DerivedCircuit c = circuit(350, 0.5);
    CoupledSolution good = build_coupled_eigenbasis(c, Gauge::flux, {10, 40});
    check_truncation(c, good.spectrum);
    EXPECT_TRUE(good.spectrum.converged);
    EXPECT_LT(good.spectrum.doubling_shift, 1e-3);
    CoupledSolution poor = build_coupled_eigenbasis(c, Gauge::flux, {4, 20});
    check_truncation(c, poor.spectrum);
    EXPECT_FALSE(poor.spectrum.converged);
    EXPECT_GT(poor.spectrum.doubling_shift, 1e-3);
}

TEST(Observables, OscillatorBranchCurrentVanishes) {
    for (Gauge g : {Gauge::flux, Gauge::charge}) {
        for (double x : {0.496, 0.5, 0.503}) {
            const DerivedCircuit c = circuit(350, x);
            const CoupledSolution s = build_coupled_eigenbasis(c, g, default_truncation(g), 4, true);
            for (Eigen::Index k = 0; k < 4; ++k) {
                const Observables o = observables(s, c.raw, c.eff, k);
                EXPECT_LT(std::abs(o.current_1), 0.01) << to_string(g) << " " << x << " " << k;
                EXPECT_GE(o.photon_number, -1e-9);
            }
        }
    }
}

TEST(Observables, CurrentsSolveInductanceMatrix) {
    for (double Lc : {0.0, 120.0}) {
        const DerivedCircuit c = circuit(Lc, 0.497);
        const CoupledSolution s = build_coupled_eigenbasis(c, Gauge::flux, {10, 40}, 2, true);
        const Observables o = observables(s, c.raw, c.eff, 1);
        const auto [i1, i2] = currents_oracle(c.raw, o.flux_expect_1, o.flux_expect_2);
        EXPECT_NEAR(o.current_1, i1, 1e-9 * std::max(1.0, std::abs(i2)));
        EXPECT_NEAR(o.current_2, i2, 1e-9 * std::max(1.0, std::abs(i2)));
    }
    // Lc = 0: I1 = Phi1 / L1
    const DerivedCircuit c = circuit(0, 0.497);
    const CoupledSolution s = build_coupled_eigenbasis(c, Gauge::flux, {10, 40}, 2, true);
    const Observables o = observables(s, c.raw, c.eff, 0);
    EXPECT_NEAR(o.current_1, o.flux_expect_1 * Phi0 / two_pi / (c.raw.L1 * 1e-12) * 1e9, 1e-12);
    EXPECT_THROW(observables(build_coupled_eigenbasis(c, Gauge::flux, {10, 40}), c.raw, c.eff, 0),
                 std::out_of_range);
}

TEST(Observables, ChargeGaugeOscillatorFluxIsZero) {
    for (double x : {0.496, 0.498, 0.5}) {
        const DerivedCircuit c = circuit(350, x);
        const CoupledSolution s =
            build_coupled_eigenbasis(c, Gauge::charge, default_truncation(Gauge::charge), 2, true);
        EXPECT_LT(std::abs(observables(s, c.raw, c.eff, 0).flux_expect_1), 1e-6) << x;
    }
}

TEST(Observables, ChargeGaugeHasFewerPhotons) {
    const DerivedCircuit c = circuit(350, 0.5);
    const CoupledSolution f =
        build_coupled_eigenbasis(c, Gauge::flux, default_truncation(Gauge::flux), 1, true);
    const CoupledSolution q =
        build_coupled_eigenbasis(c, Gauge::charge, default_truncation(Gauge::charge), 1, true);
    const double nf = observables(f, c.raw, c.eff, 0).photon_number;
    const double nq = observables(q, c.raw, c.eff, 0).photon_number;
    EXPECT_GT(nf, 1.0);
    EXPECT_LT(nq / nf, 0.2);
}

TEST(Observables, OscillatorFluxProportionalToCoupling) {
    std::vector<double> x, y;
    for (double Lc = 0.0; Lc <= 350.0; Lc += 50.0) {
        const DerivedCircuit c = circuit(Lc, 0.498);
        const CoupledSolution s = build_coupled_eigenbasis(c, Gauge::flux, {10, 40}, 1, true);
        x.push_back(Lc);
        y.push_back(observables(s, c.raw, c.eff, 0).flux_expect_1);
    }
    EXPECT_EQ(y.front(), 0.0);
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    EXPECT_GT(r * r, 0.999);
    EXPECT_GT(std::abs(y.back()), 1e-3);
}

TEST(Observables, PhotonNumberTracksDisplacedOscillator) {
    for (double Lc : {100.0, 350.0}) {
        RawCircuit r = reference_circuit(Lc, 0.5);
        r.EJ *= 1.8;
        const DerivedCircuit c = derive_circuit(r);
        const RabiParams p = map_circuit_to_rabi(c, analyze_qubit(qubit_params(c, Gauge::flux)).fit);
        ASSERT_LT(p.Delta_q, 0.01 * p.omega);
        const CoupledSolution s = build_coupled_eigenbasis(c, Gauge::flux, {10, 40}, 1, true);
        const double n = observables(s, r, c.eff, 0).photon_number;
        EXPECT_NEAR(n / ((p.g / p.omega) * (p.g / p.omega)), 1.0, 0.1) << Lc;
    }
}

TEST(Provenance, Names) {
    EXPECT_NE(to_string(Provenance::eigenbasis_product), to_string(Provenance::planewave_product));
}
