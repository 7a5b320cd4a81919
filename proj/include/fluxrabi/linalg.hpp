#pragma once

// Dense and banded real-symmetric eigensolvers. Every Hamiltonian assembled by
// the library is real symmetric in its working basis; complex matrices only
// appear as operator tables (for instance the charge operator).

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fluxrabi {

class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Threads used inside a single BLAS/LAPACK call. Grid-level OpenMP
/// parallelism expects 1 here.
void set_blas_threads(int n);

struct EigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // one column per eigenvalue; empty when not requested
};

/// Lowest `count` eigenpairs of a real symmetric matrix (only the lower
/// triangle is read). count <= 0 requests the full spectrum.
EigenSystem eigh(const Eigen::MatrixXd& matrix, Eigen::Index count = 0, bool vectors = true);

/// Symmetric band matrix in LAPACK lower band storage: band(i - j, j) = A(i, j)
/// for 0 <= i - j <= bandwidth.
class BandedSymmetric {
public:
    BandedSymmetric(Eigen::Index size, Eigen::Index bandwidth)
        : size_(size), bandwidth_(bandwidth), band_(Eigen::MatrixXd::Zero(bandwidth + 1, size)) {}

    Eigen::Index size() const { return size_; }
    Eigen::Index bandwidth() const { return bandwidth_; }

    /// Adds `value` to A(row, col) (and implicitly A(col, row)).
    void add(Eigen::Index row, Eigen::Index col, double value) {
        if (row < col) std::swap(row, col);
        band_(row - col, col) += value;
    }

    Eigen::MatrixXd dense() const;
    const Eigen::MatrixXd& storage() const { return band_; }

private:
    Eigen::Index size_;
    Eigen::Index bandwidth_;
    Eigen::MatrixXd band_;
};

EigenSystem eigh_banded(const BandedSymmetric& matrix, Eigen::Index count, bool vectors = false);

/// max |A - A^H| / max(1, max |A|).
double hermiticity_defect(const Eigen::MatrixXcd& matrix);
double hermiticity_defect(const Eigen::MatrixXd& matrix);

/// max |V^H V - 1|.
double orthonormality_defect(const Eigen::MatrixXcd& vectors);
double orthonormality_defect(const Eigen::MatrixXd& vectors);

}  // namespace fluxrabi
