#pragma once

// Plane-wave eigensolver for single-node circuit Hamiltonians.
//
// A wavefunction in the dimensionless charge n on the periodic domain
// [-n_max, n_max) is expanded as psi(n) = sum_k psi_k exp(i k n) / sqrt(2 n_max)
// with k = pi * eta / n_max. In this basis the dimensionless flux phi = k is
// diagonal and n^2 becomes the Toeplitz kernel
//   f_{k-k'}(n^2) = 1/(2 n_max) * integral exp(-i (k-k') n) n^2 dn.
// Both the n^2 and n kernels are real-symmetric / imaginary-antisymmetric, so
// the Hamiltonians assembled here are real symmetric and their eigenvectors are
// stored as real coefficient vectors (which are also the flux-representation
// wavefunctions sampled at the wave numbers).

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace fluxrabi {

struct PlaneWaveBasis {
    double n_max = 8.0;
    int n_waves = 32;
    int grid_points = 128;

    void validate() const;

    /// eta of wave index i, in [-n_waves/2, n_waves/2).
    int eta(int index) const { return index - n_waves / 2; }
    double dk() const;
    Eigen::VectorXd wave_numbers() const;
    /// Sample points n_j = -n_max + j * 2 n_max / grid_points.
    Eigen::VectorXd grid() const;
    double grid_spacing() const { return 2.0 * n_max / grid_points; }

    /// 32 waves, n_max = 8: k spans [-2pi, 2pi) around the double well.
    static PlaneWaveBasis qubit_default();
    /// 64 waves, n_max = ceil(10 * n_rms) with n_rms = (EL / 32 EC)^(1/4).
    static PlaneWaveBasis oscillator_default(double EC, double EL, int n_waves = 64);
};

enum class SubsystemKind { oscillator, qubit };

struct SubsystemSpectrum {
    Eigen::VectorXd energies;        // GHz, ascending
    Eigen::MatrixXd coefficients;    // n_waves x count, unit-norm columns
    PlaneWaveBasis basis;
    SubsystemKind label = SubsystemKind::qubit;
    std::vector<bool> degenerate;    // state i is within 1 Hz of a neighbour
    double edge_weight = 0.0;        // ground-state weight on the outermost waves
    bool range_warning = false;      // edge_weight > 1e-6

    Eigen::Index size() const { return energies.size(); }
};

/// f_{k-k'}(n^2) from the closed form: n_max^2/3 on the diagonal and
/// 2 (-1)^m n_max^2 / (m pi)^2 for eta - eta' = m.
Eigen::MatrixXd quadratic_kernel(const PlaneWaveBasis& basis);

/// f_{k-k'}(n): zero on the diagonal and i (-1)^m n_max / (m pi) off it.
Eigen::MatrixXcd linear_kernel(const PlaneWaveBasis& basis);

/// Kernel of an arbitrary function sampled on basis.grid(), built by FFT:
/// f_m = (1/G) sum_j g(n_j) exp(-i m pi n_j / n_max). Used to validate the
/// closed forms; aliasing makes it approximate for non-smooth g.
Eigen::MatrixXcd discrete_kernel(const PlaneWaveBasis& basis, std::span<const double> samples);

Eigen::MatrixXd oscillator_hamiltonian(double EC, double EL, const PlaneWaveBasis& basis);
Eigen::MatrixXd flux_qubit_hamiltonian(double ECJ, double EJ, double EL, double phix,
                                       const PlaneWaveBasis& basis);

/// 4 EC n^2 + EL phi^2 / 2.
SubsystemSpectrum diagonalize_oscillator(double EC, double EL, const PlaneWaveBasis& basis,
                                         Eigen::Index count = 16);

/// 4 ECJ n^2 - EJ cos(phi - 2 pi phix) + EL phi^2 / 2.
SubsystemSpectrum diagonalize_flux_qubit(double ECJ, double EJ, double EL, double phix,
                                         const PlaneWaveBasis& basis, Eigen::Index count = 12);

/// psi(n_j) on basis.grid(), normalized so that sum |psi|^2 dn = 1.
Eigen::VectorXcd n_representation(const SubsystemSpectrum& spectrum, Eigen::Index state);

/// Wavefunction against the dimensionless flux phi = k, normalized so that
/// sum |psi|^2 dk = 1.
Eigen::VectorXd flux_representation(const SubsystemSpectrum& spectrum, Eigen::Index state);

/// <j| phi |i> over the computed states (real symmetric).
Eigen::MatrixXd phase_matrix(const SubsystemSpectrum& spectrum);

/// <j| n |i> over the computed states (Hermitian, purely imaginary).
Eigen::MatrixXcd number_matrix(const SubsystemSpectrum& spectrum);

/// Sign changes of a sampled function, ignoring samples below
/// threshold * max|f|.
int count_nodes(std::span<const double> samples, double threshold = 1e-3);

}  // namespace fluxrabi
