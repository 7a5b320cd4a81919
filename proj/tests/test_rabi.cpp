#include "fluxrabi/rabi.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace fluxrabi;

namespace {

constexpr double h = 6.62607015e-34;
constexpr double e = 1.602176634e-19;
constexpr double hbar = h / (2.0 * std::numbers::pi);
constexpr double Phi0 = h / (2.0 * e);

// Dense oracle: Fock (x) qubit, built from Pauli matrices.
Eigen::VectorXd dense_oracle(const RabiParams& p, double eps, int n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    Eigen::Matrix2d sx, sz, isy, id2;
    sx << 0, 1, 1, 0;
    sz << 1, 0, 0, -1;
    isy << 0, 1, -1, 0;
    id2.setIdentity();
    Eigen::MatrixXd num = a.transpose() * a + 0.5 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd H = p.omega * Eigen::kroneckerProduct(num, id2).eval();
    H -= 0.5 * Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(n, n), (eps * sx + p.Delta_q * sz).eval());
    if (p.variant == Gauge::flux) {
        H += p.g * Eigen::kroneckerProduct((a + a.transpose()).eval(), sx).eval();
    } else {
        H += p.g * Eigen::kroneckerProduct((a - a.transpose()).eval(), isy).eval();
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H, Eigen::EigenvaluesOnly).eigenvalues();
}

struct Mapped {
    DerivedCircuit c;
    RabiParams flux, charge;
    TwoLevelFit qf, qc;
};

Mapped mapped(double Lc) {
    Mapped m{derive_circuit(reference_circuit(Lc)), {}, {}, {}, {}};
    m.qf = analyze_qubit(qubit_params(m.c, Gauge::flux)).fit;
    m.qc = analyze_qubit(qubit_params(m.c, Gauge::charge)).fit;
    m.flux = map_circuit_to_rabi(m.c, m.qf);
    m.charge = map_circuit_to_rabi_charge(m.c, m.qc);
    return m;
}

const Mapped& m20() {
    static const Mapped m = mapped(20);
    return m;
}
const Mapped& m350() {
    static const Mapped m = mapped(350);
    return m;
}

}  // namespace

TEST(RabiSpectrum, DecoupledLadder) {
    const RabiParams p{Gauge::flux, 6.0, 1.3, 280.0, 0.0};
    const RabiSpectrum s = diagonalize_rabi(p, 0.0, 20, 8);
    std::vector<double> expect;
    for (int n = 0; n < 10; ++n) {
        expect.push_back(6.0 * (n + 0.5) - 0.65);
        expect.push_back(6.0 * (n + 0.5) + 0.65);
    }
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(s.energies(i), expect[static_cast<size_t>(i)], 1e-12);
}

TEST(RabiSpectrum, DisplacedOscillatorLimit) {
    for (double g : {0.5, 3.0, 7.0}) {
        const RabiParams p{Gauge::flux, 6.0, 0.0, 280.0, g};
        const RabiSpectrum s = diagonalize_rabi(p, 0.0, 80, 2, true);
        EXPECT_NEAR(s.energies(0), 3.0 - g * g / 6.0, 1e-9) << g;
        EXPECT_NEAR(s.energies(1), s.energies(0), 1e-9) << g;
        const double n_expect = (g / 6.0) * (g / 6.0);
        EXPECT_NEAR(rabi_photon_number(s, 0), n_expect, 1e-8) << g;
    }
}

TEST(RabiSpectrum, BandedMatchesDenseOracle) {
    for (Gauge v : {Gauge::flux, Gauge::charge}) {
        const RabiParams p{v, 6.27, 2.14, 282.5, 3.1};
        const Eigen::VectorXd ref = dense_oracle(p, 1.7, 40);
        const RabiSpectrum s = diagonalize_rabi(p, 1.7, 40, 12);
        EXPECT_LT((s.energies - ref.head(12)).cwiseAbs().maxCoeff(), 1e-10) << to_string(v);
    }
}

TEST(RabiSpectrum, CouplingSignAndBiasSymmetry) {
    const RabiParams p = m350().flux;
    RabiParams q = p;
    q.g = -p.g;
    for (double eps : {0.0, 2.5, -4.0}) {
        const RabiSpectrum a = diagonalize_rabi(p, eps, 60, 8);
        const RabiSpectrum b = diagonalize_rabi(q, eps, 60, 8);
        const RabiSpectrum c = diagonalize_rabi(p, -eps, 60, 8);
        EXPECT_LT((a.energies - b.energies).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LT((a.energies - c.energies).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(RabiSpectrum, ChargeVariantIsADifferentModel) {
    const RabiSpectrum f = diagonalize_rabi(m350().flux, 0.0, 60, 4);
    const RabiSpectrum c = diagonalize_rabi(m350().charge, 0.0, 60, 4);
    EXPECT_GT((f.energies - c.energies).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(RabiSpectrum, FockConvergenceInDeepStrongCoupling) {
    const RabiParams p = m350().flux;
    ASSERT_GT(p.g / p.omega, 1.0);
    for (double eps : {0.0, p.epsilon(0.494)}) {
        const RabiSpectrum a = diagonalize_rabi(p, eps, 40, 8);
        const RabiSpectrum b = diagonalize_rabi(p, eps, 80, 8);
        EXPECT_LT((a.energies - b.energies).cwiseAbs().maxCoeff(), 1e-3);
    }
    EXPECT_TRUE(check_fock_convergence(p, 0.0, 40).converged);
    EXPECT_FALSE(check_fock_convergence(p, 0.0, 10).converged);
    EXPECT_EQ(default_fock_size(p), 60);
    EXPECT_EQ(default_fock_size(m20().flux), 20);
}

TEST(RabiSpectrum, AvoidedCrossingsAtSmallCoupling) {
    const RabiParams p = m20().flux;
    // |e,0> and |g,1> meet where sqrt(eps^2 + Delta^2) = omega
    const double eps_cross = std::sqrt(p.omega * p.omega - p.Delta_q * p.Delta_q);
    const double phix_cross = 0.5 - eps_cross * 1e9 * e / (p.Ip * 1e-9);
    double best = 1e9, where = 0.0;
    for (double x = 0.495; x <= 0.4985; x += 1e-6) {
        const RabiSpectrum s = diagonalize_rabi(p, p.epsilon(x), 20, 3);
        const double gap = s.energies(2) - s.energies(1);
        if (gap < best) {
            best = gap;
            where = x;
        }
    }
    EXPECT_NEAR(where, 0.497, 5e-4);
    EXPECT_NEAR(where, phix_cross, 2e-5);
    EXPECT_NEAR(best / (2.0 * p.g * p.Delta_q / p.omega), 1.0, 0.02);
    const RabiSpectrum mirror = diagonalize_rabi(p, p.epsilon(1.0 - where), 20, 3);
    EXPECT_NEAR(mirror.energies(2) - mirror.energies(1), best, 1e-9);
}

TEST(Mapping, FluxGaugeTuples) {
    const RabiParams a = m20().flux;
    EXPECT_NEAR(a.omega, 6.033, 0.06033);
    EXPECT_NEAR(a.Delta_q, 1.240, 0.0124);
    EXPECT_NEAR(a.g, 0.424, 0.00424);
    EXPECT_NEAR(a.Ip, 281.3, 2.813);
    const RabiParams b = m350().flux;
    EXPECT_NEAR(b.omega, 6.272, 0.06272);
    EXPECT_NEAR(b.Delta_q, 2.139, 0.02139);
    EXPECT_NEAR(b.g, 7.338, 0.07338);
    EXPECT_NEAR(b.Ip, 282.5, 2.825);
}

TEST(Mapping, CouplingFromSIOracle) {
    for (const Mapped* m : {&m20(), &m350()}) {
        const double LLC = m->c.eff.L_LC * 1e-12;
        const double L12 = *m->c.eff.L12 * 1e-12;
        const double C = m->c.raw.C * 1e-12;
        const double CJ = m->c.raw.CJ * 1e-15;
        const double w = 1.0 / std::sqrt(LLC * C);
        const double Izpf = std::sqrt(hbar * w / (2.0 * LLC));
        const double g = (LLC / L12) * Izpf * m->qf.Phi2max * Phi0 / h * 1e-9;
        EXPECT_NEAR(m->flux.g / g, 1.0, 1e-9);
        EXPECT_NEAR(m->flux.omega / (w / (2 * std::numbers::pi) * 1e-9), 1.0, 1e-9);

        const double inv_Cp = 1.0 / C + (LLC / L12) * (LLC / L12) / CJ;
        const double wp = std::sqrt(inv_Cp / LLC);
        const double q1zpf = std::sqrt(hbar * wp / (2.0 * inv_Cp));
        const double gp = q1zpf * (2.0 * e * m->qc.q2max) * LLC / (CJ * L12) / h * 1e-9;
        EXPECT_NEAR(m->charge.g / gp, 1.0, 1e-9);
        EXPECT_NEAR(m->charge.omega / (wp / (2 * std::numbers::pi) * 1e-9), 1.0, 1e-9);
    }
}

TEST(Mapping, ChargeGaugeFrequencyAndSplitting) {
    EXPECT_NEAR(m20().charge.omega, 6.085, 0.06085);
    EXPECT_NEAR(m350().charge.omega, 15.66, 0.1566);
    EXPECT_NEAR(m20().charge.Delta_q, 1.238, 0.01238);
    // H2' uses Lc + L2, which the fixed sums hold constant
    EXPECT_NEAR(m350().charge.Delta_q, m20().charge.Delta_q, 1e-9);
}

TEST(Mapping, DecoupledCircuit) {
    const Mapped m = mapped(0);
    EXPECT_EQ(m.flux.g, 0.0);
    EXPECT_EQ(m.charge.g, 0.0);
    EXPECT_NEAR(m.charge.omega, m.flux.omega, 1e-12);
}

TEST(RabiSpectrum, Preconditions) {
    const RabiParams p{Gauge::flux, 6.0, 1.0, 280.0, 0.1};
    EXPECT_THROW(diagonalize_rabi(p, 0.0, 7), std::invalid_argument);
    const RabiSpectrum s = diagonalize_rabi(p, 0.0, 20, 4);
    EXPECT_THROW(rabi_photon_number(s, 0), std::out_of_range);
    EXPECT_EQ(rabi_hamiltonian(p, 0.0, 10).dense().rows(), 20);
}
