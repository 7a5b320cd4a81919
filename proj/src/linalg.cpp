#include "fluxrabi/linalg.hpp"

#include <lapacke.h>

#include <vector>

extern "C" void openblas_set_num_threads(int);

namespace fluxrabi {

void set_blas_threads(int n) {
    if (n > 0) openblas_set_num_threads(n);
}

EigenSystem eigh(const Eigen::MatrixXd& matrix, Eigen::Index count, bool vectors) {
    const Eigen::Index n = matrix.rows();
    if (matrix.cols() != n) {
        throw std::invalid_argument("eigh: matrix is not square");
    }
    if (count <= 0 || count > n) count = n;

    Eigen::MatrixXd work = matrix;
    Eigen::VectorXd values(n);
    Eigen::MatrixXd z(vectors ? n : 1, vectors ? count : 1);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, vectors ? 'V' : 'N', count == n ? 'A' : 'I', 'L',
        static_cast<lapack_int>(n), work.data(), static_cast<lapack_int>(n), 0.0, 0.0, 1,
        static_cast<lapack_int>(count), 0.0, &found, values.data(), z.data(),
        static_cast<lapack_int>(z.rows()), support.data());
    if (info != 0 || found != count) {
        throw ConvergenceError("dsyevr failed (info=" + std::to_string(info) + ")");
    }

    EigenSystem out;
    out.values = values.head(count);
    if (vectors) out.vectors = std::move(z);
    return out;
}

Eigen::MatrixXd BandedSymmetric::dense() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size_, size_);
    for (Eigen::Index j = 0; j < size_; ++j) {
        for (Eigen::Index d = 0; d <= bandwidth_ && j + d < size_; ++d) {
            a(j + d, j) = band_(d, j);
            a(j, j + d) = band_(d, j);
        }
    }
    return a;
}

EigenSystem eigh_banded(const BandedSymmetric& matrix, Eigen::Index count, bool vectors) {
    const Eigen::Index n = matrix.size();
    if (count <= 0 || count > n) count = n;
    const auto kd = static_cast<lapack_int>(matrix.bandwidth());

    Eigen::MatrixXd band = matrix.storage();
    Eigen::MatrixXd q(vectors ? n : 1, vectors ? n : 1);
    Eigen::VectorXd values(n);
    Eigen::MatrixXd z(vectors ? n : 1, vectors ? count : 1);
    std::vector<lapack_int> fail(static_cast<std::size_t>(n));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dsbevx(
        LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'I', 'L', static_cast<lapack_int>(n), kd,
        band.data(), kd + 1, q.data(), static_cast<lapack_int>(q.rows()), 0.0, 0.0, 1,
        static_cast<lapack_int>(count), 0.0, &found, values.data(), z.data(),
        static_cast<lapack_int>(z.rows()), fail.data());
    if (info != 0 || found != count) {
        throw ConvergenceError("dsbevx failed (info=" + std::to_string(info) + ")");
    }

    EigenSystem out;
    out.values = values.head(count);
    if (vectors) out.vectors = std::move(z);
    return out;
}

double hermiticity_defect(const Eigen::MatrixXcd& matrix) {
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double hermiticity_defect(const Eigen::MatrixXd& matrix) {
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    return (matrix - matrix.transpose()).cwiseAbs().maxCoeff() / scale;
}

double orthonormality_defect(const Eigen::MatrixXcd& vectors) {
    const Eigen::Index m = vectors.cols();
    return (vectors.adjoint() * vectors - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff();
}

double orthonormality_defect(const Eigen::MatrixXd& vectors) {
    const Eigen::Index m = vectors.cols();
    return (vectors.transpose() * vectors - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
}

}  // namespace fluxrabi
