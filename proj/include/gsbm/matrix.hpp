#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace gsbm {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Square symmetric matrix with finite entries.
///
/// The wrapped storage is dense; symmetry is checked once at construction
/// and preserved because the only access afterwards is read-only.
class SymMatrix {
public:
    SymMatrix() = default;

    /// Zero matrix of order n.
    explicit SymMatrix(Eigen::Index n) : m_(DenseMatrix::Zero(n, n)) {}

    /// Validates squareness, finiteness and symmetry up to `tol` (absolute).
    /// Throws ShapeError or InputError. The lower triangle is mirrored from
    /// the upper one so the stored matrix is exactly symmetric.
    explicit SymMatrix(DenseMatrix m, double tol = 0.0);

    Eigen::Index n() const noexcept { return m_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const DenseMatrix& dense() const noexcept { return m_; }

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    DenseMatrix m_;
};

/// Largest absolute asymmetry max |M_ij - M_ji|.
double asymmetry(const DenseMatrix& m);

/// Sum of squares accumulated in extended precision.
double sum_squares(const DenseMatrix& m);

/// Frobenius inner product accumulated in extended precision.
double inner(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace gsbm
