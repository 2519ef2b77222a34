#pragma once

#include "gsbm/matrix.hpp"

#include <cstdint>

namespace gsbm {

/// Omega .* (A - L - S - S^T). Throws ShapeError unless all operands are n x n.
DenseMatrix masked_residual(const SymMatrix& adjacency, const SymMatrix& mask,
                            const DenseMatrix& low_rank, const DenseMatrix& sparse);

/// Sum of the Euclidean norms of the columns.
double group_norm_21(const DenseMatrix& m);

/// Euclidean norm of every column.
Vector column_norms(const DenseMatrix& m);

/// Sum of singular values (dense SVD).
double nuclear_norm(const DenseMatrix& m);

/// Flips the sign of `v` so that its first coordinate with magnitude above
/// 1e-8 * max|v| is positive. Returns the applied sign (+1 or -1).
double normalize_sign(Vector& v);

struct SingularTriplet {
    double sigma = 0.0;
    Vector u;
    Vector v;
    int iterations = 0;
    double residual = 0.0;
};

struct PowerIterationOptions {
    double tol = 1e-9;
    int max_iter = 1000;
    /// Seed for the deterministic start vector.
    std::uint64_t seed = 0x5eedf00dULL;
    /// Optional start vector (e.g. the previous right singular vector).
    /// Ignored when empty, of the wrong size, or zero.
    const Vector* warm_start = nullptr;
};

/// Dominant singular triplet by thick-restarted Lanczos on M^T M (a Krylov
/// accelerated power iteration) from a seeded or warm start vector.
/// `iterations` counts steps, each one product with M and one with M^T.
///
/// Stops when ||M^T u - sigma v|| <= tol * max(1, sigma), where u = Mv/||Mv||.
/// u and v are unit vectors with the first significant coordinate of u
/// positive. A zero matrix yields (0, e1, e1). Throws ConvergenceError with
/// the last residual when max_iter is exhausted.
SingularTriplet top_singular_pair(const DenseMatrix& m, const PowerIterationOptions& opts = {});

inline SingularTriplet top_singular_pair(const DenseMatrix& m, double tol, int max_iter) {
    PowerIterationOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return top_singular_pair(m, opts);
}

struct Eigenpair {
    double value = 0.0;
    Vector vector;
    /// The eigenvalue is repeated (within tol * max(1, |lambda_max|)), so the
    /// returned vector is one arbitrary member of its eigenspace.
    bool degenerate = false;
};

/// Eigenvector of the k-th largest eigenvalue (1-based) of a symmetric matrix.
/// Throws InputError for k outside [1, n] and ConvergenceError when the
/// eigensolver fails or the residual ||Mv - lambda v|| exceeds tol.
Eigenpair eigenvector_k(const SymMatrix& m, int k, double tol = 1e-9);

}  // namespace gsbm
