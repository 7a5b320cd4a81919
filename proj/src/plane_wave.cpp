#include "fluxrabi/plane_wave.hpp"

#include "fluxrabi/linalg.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace fluxrabi {
namespace {

using std::numbers::pi;

double alternating(long m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// Real eigenvectors are defined up to sign; make the largest-magnitude flux
// sample positive. Ties (parity-symmetric states) resolve to the lowest wave
// index within a relative 1e-8 of the maximum.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= peak * (1.0 - 1e-8)) {
            if (v(i) < 0.0) v = -v;
            return;
        }
    }
}

SubsystemSpectrum solve(const Eigen::MatrixXd& h, const PlaneWaveBasis& basis,
                        Eigen::Index count, SubsystemKind label) {
    count = std::min<Eigen::Index>(count, basis.n_waves);
    if (count < 1) throw std::invalid_argument("requested state count must be positive");
    EigenSystem es = eigh(h, count, true);

    SubsystemSpectrum out;
    out.energies = std::move(es.values);
    out.coefficients = std::move(es.vectors);
    out.basis = basis;
    out.label = label;
    for (Eigen::Index s = 0; s < count; ++s) fix_sign(out.coefficients.col(s));

    out.degenerate.assign(static_cast<std::size_t>(count), false);
    constexpr double one_hertz = 1e-9;  // GHz
    for (Eigen::Index s = 0; s + 1 < count; ++s) {
        if (out.energies(s + 1) - out.energies(s) < one_hertz) {
            out.degenerate[static_cast<std::size_t>(s)] = true;
            out.degenerate[static_cast<std::size_t>(s + 1)] = true;
        }
    }

    const auto& g = out.coefficients.col(0);
    out.edge_weight = g(0) * g(0) + g(basis.n_waves - 1) * g(basis.n_waves - 1);
    out.range_warning = out.edge_weight > 1e-6;
    return out;
}

}  // namespace

void PlaneWaveBasis::validate() const {
    if (!(n_max > 0.0)) throw std::invalid_argument("n_max must be positive");
    if (n_waves < 8 || n_waves % 2 != 0) {
        throw std::invalid_argument("n_waves must be even and at least 8");
    }
    if (grid_points < 4 * n_waves) {
        throw std::invalid_argument("grid_points must be at least 4 * n_waves");
    }
}

double PlaneWaveBasis::dk() const { return pi / n_max; }

Eigen::VectorXd PlaneWaveBasis::wave_numbers() const {
    Eigen::VectorXd k(n_waves);
    for (int i = 0; i < n_waves; ++i) k(i) = dk() * eta(i);
    return k;
}

Eigen::VectorXd PlaneWaveBasis::grid() const {
    Eigen::VectorXd n(grid_points);
    for (int j = 0; j < grid_points; ++j) n(j) = -n_max + grid_spacing() * j;
    return n;
}

PlaneWaveBasis PlaneWaveBasis::qubit_default() { return {8.0, 32, 128}; }

PlaneWaveBasis PlaneWaveBasis::oscillator_default(double EC, double EL, int n_waves) {
    const double n_rms = std::pow(EL / (32.0 * EC), 0.25);
    return {std::ceil(10.0 * n_rms), n_waves, 4 * n_waves};
}

Eigen::MatrixXd quadratic_kernel(const PlaneWaveBasis& basis) {
    basis.validate();
    const int n = basis.n_waves;
    const double a2 = basis.n_max * basis.n_max;
    Eigen::MatrixXd f(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const long m = i - j;
            f(i, j) = (m == 0) ? a2 / 3.0
                               : 2.0 * alternating(m) * a2 / (pi * pi * static_cast<double>(m * m));
        }
    }
    return f;
}

Eigen::MatrixXcd linear_kernel(const PlaneWaveBasis& basis) {
    basis.validate();
    const int n = basis.n_waves;
    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const long m = i - j;
            if (m != 0) {
                f(i, j) = {0.0, alternating(m) * basis.n_max / (pi * static_cast<double>(m))};
            }
        }
    }
    return f;
}

Eigen::MatrixXcd discrete_kernel(const PlaneWaveBasis& basis, std::span<const double> samples) {
    basis.validate();
    const int g = basis.grid_points;
    if (static_cast<int>(samples.size()) != g) {
        throw std::invalid_argument("discrete_kernel: sample count must equal grid_points");
    }
    std::vector<std::complex<double>> in(samples.begin(), samples.end());
    std::vector<std::complex<double>> out(static_cast<std::size_t>(g));
    fftw_plan plan = fftw_plan_dft_1d(g, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    // exp(-i m pi n_j / n_max) = (-1)^m exp(-2 pi i m j / G)
    const int n = basis.n_waves;
    Eigen::MatrixXcd f(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int m = i - j;
            const int idx = ((m % g) + g) % g;
            f(i, j) = alternating(m) * out[static_cast<std::size_t>(idx)] / static_cast<double>(g);
        }
    }
    return f;
}

Eigen::MatrixXd oscillator_hamiltonian(double EC, double EL, const PlaneWaveBasis& basis) {
    Eigen::MatrixXd h = 4.0 * EC * quadratic_kernel(basis);
    const Eigen::VectorXd k = basis.wave_numbers();
    h.diagonal().array() += 0.5 * EL * k.array().square();
    return h;
}

Eigen::MatrixXd flux_qubit_hamiltonian(double ECJ, double EJ, double EL, double phix,
                                       const PlaneWaveBasis& basis) {
    Eigen::MatrixXd h = 4.0 * ECJ * quadratic_kernel(basis);
    const Eigen::VectorXd k = basis.wave_numbers();
    const double kx = 2.0 * pi * phix;
    for (int i = 0; i < basis.n_waves; ++i) {
        h(i, i) += -EJ * std::cos(k(i) - kx) + 0.5 * EL * k(i) * k(i);
    }
    return h;
}

SubsystemSpectrum diagonalize_oscillator(double EC, double EL, const PlaneWaveBasis& basis,
                                         Eigen::Index count) {
    if (!(EC > 0.0) || !(EL > 0.0)) throw std::invalid_argument("EC and EL must be positive");
    return solve(oscillator_hamiltonian(EC, EL, basis), basis, count, SubsystemKind::oscillator);
}

SubsystemSpectrum diagonalize_flux_qubit(double ECJ, double EJ, double EL, double phix,
                                         const PlaneWaveBasis& basis, Eigen::Index count) {
    if (!(ECJ > 0.0) || !(EJ > 0.0) || !(EL > 0.0)) {
        throw std::invalid_argument("ECJ, EJ and EL must be positive");
    }
    return solve(flux_qubit_hamiltonian(ECJ, EJ, EL, phix, basis), basis, count,
                 SubsystemKind::qubit);
}

Eigen::VectorXcd n_representation(const SubsystemSpectrum& spectrum, Eigen::Index state) {
    if (state < 0 || state >= spectrum.size()) {
        throw std::out_of_range("n_representation: state index out of range");
    }
    const PlaneWaveBasis& basis = spectrum.basis;
    const int g = basis.grid_points;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(g), 0.0);
    for (int i = 0; i < basis.n_waves; ++i) {
        const int eta = basis.eta(i);
        const int idx = ((eta % g) + g) % g;
        in[static_cast<std::size_t>(idx)] = alternating(eta) * spectrum.coefficients(i, state);
    }
    std::vector<std::complex<double>> out(static_cast<std::size_t>(g));
    fftw_plan plan = fftw_plan_dft_1d(g, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double norm = 1.0 / std::sqrt(2.0 * basis.n_max);
    Eigen::VectorXcd psi(g);
    for (int j = 0; j < g; ++j) psi(j) = out[static_cast<std::size_t>(j)] * norm;
    return psi;
}

Eigen::VectorXd flux_representation(const SubsystemSpectrum& spectrum, Eigen::Index state) {
    if (state < 0 || state >= spectrum.size()) {
        throw std::out_of_range("flux_representation: state index out of range");
    }
    return spectrum.coefficients.col(state) / std::sqrt(spectrum.basis.dk());
}

Eigen::MatrixXd phase_matrix(const SubsystemSpectrum& spectrum) {
    const Eigen::VectorXd k = spectrum.basis.wave_numbers();
    return spectrum.coefficients.transpose() * k.asDiagonal() * spectrum.coefficients;
}

Eigen::MatrixXcd number_matrix(const SubsystemSpectrum& spectrum) {
    // The kernel is i * (real antisymmetric); keep the product real until the end.
    const Eigen::MatrixXd imag = linear_kernel(spectrum.basis).imag();
    const Eigen::MatrixXd m = spectrum.coefficients.transpose() * imag * spectrum.coefficients;
    return std::complex<double>(0.0, 1.0) * m.cast<std::complex<double>>();
}

int count_nodes(std::span<const double> samples, double threshold) {
    double peak = 0.0;
    for (double s : samples) peak = std::max(peak, std::abs(s));
    int nodes = 0;
    int last_sign = 0;
    for (double s : samples) {
        if (std::abs(s) < threshold * peak) continue;
        const int sign = s > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++nodes;
        last_sign = sign;
    }
    return nodes;
}

}  // namespace fluxrabi
