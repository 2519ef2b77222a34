#include "gsbm/linalg.hpp"

#include "gsbm/errors.hpp"
#include "gsbm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace gsbm {

SymMatrix::SymMatrix(DenseMatrix m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw ShapeError("symmetric matrix must be square, got " + std::to_string(m_.rows()) +
                         "x" + std::to_string(m_.cols()));
    }
    if (!m_.allFinite()) throw InputError("matrix has non-finite entries");
    const double gap = asymmetry(m_);
    if (gap > tol) {
        throw InputError("matrix is not symmetric (max asymmetry " + std::to_string(gap) + ")");
    }
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
        for (Eigen::Index i = j + 1; i < m_.rows(); ++i) m_(i, j) = m_(j, i);
}

double asymmetry(const DenseMatrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    double gap = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = j + 1; i < m.rows(); ++i)
            gap = std::max(gap, std::abs(m(i, j) - m(j, i)));
    return gap;
}

double sum_squares(const DenseMatrix& m) {
    long double acc = 0.0L;
    const double* p = m.data();
    for (Eigen::Index k = 0; k < m.size(); ++k) acc += static_cast<long double>(p[k]) * p[k];
    return static_cast<double>(acc);
}

double inner(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("inner: shape mismatch");
    long double acc = 0.0L;
    const double* pa = a.data();
    const double* pb = b.data();
    for (Eigen::Index k = 0; k < a.size(); ++k) acc += static_cast<long double>(pa[k]) * pb[k];
    return static_cast<double>(acc);
}

DenseMatrix masked_residual(const SymMatrix& adjacency, const SymMatrix& mask,
                            const DenseMatrix& low_rank, const DenseMatrix& sparse) {
    const Eigen::Index n = adjacency.n();
    if (mask.n() != n || low_rank.rows() != n || low_rank.cols() != n || sparse.rows() != n ||
        sparse.cols() != n) {
        throw ShapeError("masked_residual: all operands must be " + std::to_string(n) + "x" +
                         std::to_string(n));
    }
    const DenseMatrix& a = adjacency.dense();
    const DenseMatrix& w = mask.dense();
    DenseMatrix out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            // S_ij + S_ji is evaluated in the same order for (i,j) and (j,i)
            // so a symmetric L gives a bit-for-bit symmetric residual.
            const double s_sym = i <= j ? sparse(i, j) + sparse(j, i) : sparse(j, i) + sparse(i, j);
            out(i, j) = w(i, j) == 0.0 ? 0.0 : w(i, j) * (a(i, j) - low_rank(i, j) - s_sym);
        }
    }
    return out;
}

double group_norm_21(const DenseMatrix& m) {
    long double acc = 0.0L;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        long double sq = 0.0L;
        for (Eigen::Index i = 0; i < m.rows(); ++i) sq += static_cast<long double>(m(i, j)) * m(i, j);
        acc += std::sqrt(sq);
    }
    return static_cast<double>(acc);
}

Vector column_norms(const DenseMatrix& m) {
    Vector out(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        long double sq = 0.0L;
        for (Eigen::Index i = 0; i < m.rows(); ++i) sq += static_cast<long double>(m(i, j)) * m(i, j);
        out(j) = static_cast<double>(std::sqrt(sq));
    }
    return out;
}

double nuclear_norm(const DenseMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<DenseMatrix> svd(m);
    return svd.singularValues().sum();
}

double normalize_sign(Vector& v) {
    if (v.size() == 0) return 1.0;
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-8 * scale) {
            if (v(i) < 0.0) {
                v = -v;
                return -1.0;
            }
            return 1.0;
        }
    }
    return 1.0;
}

namespace {

Vector seeded_unit_vector(Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform() - 0.5;
    const double norm = v.norm();
    if (norm == 0.0) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    return v / norm;
}


/// Removes from `x` its components along the first `count` columns of the
/// orthonormal `basis` (classical Gram-Schmidt applied twice).
void orthogonalize(Vector& x, const DenseMatrix& basis, Eigen::Index count) {
    if (count == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const Vector coef = basis.leftCols(count).transpose() * x;
        x.noalias() -= basis.leftCols(count) * coef;
    }
}

}  // namespace

SingularTriplet top_singular_pair(const DenseMatrix& m, const PowerIterationOptions& opts) {
    if (!(opts.tol > 0.0)) throw ConfigError("top_singular_pair: tol must be positive");
    if (m.rows() == 0 || m.cols() == 0) throw ShapeError("top_singular_pair: empty matrix");
    if (!m.allFinite()) throw InputError("top_singular_pair: non-finite entries");

    SingularTriplet out;
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        out.u = Vector::Unit(m.rows(), 0);
        out.v = Vector::Unit(m.cols(), 0);
        return out;
    }

    // Thick-restarted Lanczos on M^T M. Q holds an orthonormal basis of right
    // vectors, W = M Q and Z = M^T W. Each step expands Q by the residual of
    // the top Ritz pair, which spans the same Krylov space as a power
    // iteration but separates clustered leading singular values far faster.
    // On restart the leading Ritz vectors are kept, so a cluster is not lost.
    const Eigen::Index cols = m.cols();
    const Eigen::Index cycle = std::min<Eigen::Index>(cols, 48);
    const Eigen::Index keep = std::min<Eigen::Index>(cycle - 1, 24);
    const double tiny = 1e-14 * scale * std::sqrt(static_cast<double>(cols));

    DenseMatrix q(cols, cycle), w(m.rows(), cycle), z(cols, cycle);
    DenseMatrix gram = DenseMatrix::Zero(cycle, cycle);  // W^T W, filled column by column
    Vector next;
    if (opts.warm_start && opts.warm_start->size() == cols && opts.warm_start->norm() > 0.0)
        next = opts.warm_start->normalized();
    else
        next = seeded_unit_vector(cols, opts.seed);

    Eigen::Index j = 0;
    int steps = 0;
    int reseeds = 0;
    double residual = INFINITY;
    while (steps < opts.max_iter) {
        if (j == cycle) {
            // Thick restart onto the `keep` leading Ritz vectors.
            Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram);
            const DenseMatrix y = eig.eigenvectors().rightCols(keep).rowwise().reverse();
            gram.setZero();
            gram.topLeftCorner(keep, keep).diagonal() = eig.eigenvalues().tail(keep).reverse();
            const DenseMatrix q_kept = q * y;
            const DenseMatrix w_kept = w * y;
            const DenseMatrix z_kept = z * y;
            q.leftCols(keep) = q_kept;
            w.leftCols(keep) = w_kept;
            z.leftCols(keep) = z_kept;
            j = keep;
        }
        orthogonalize(next, q, j);
        const double norm = next.norm();
        if (norm <= 1e-12) break;
        q.col(j) = next / norm;
        w.col(j) = m * q.col(j);
        z.col(j) = m.transpose() * w.col(j);
        const Vector g = w.leftCols(j + 1).transpose() * w.col(j);
        gram.col(j).head(j + 1) = g;
        gram.row(j).head(j + 1) = g.transpose();
        ++j;
        ++steps;

        Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram.topLeftCorner(j, j));
        const Vector y = eig.eigenvectors().col(j - 1);
        const double theta = std::max(0.0, eig.eigenvalues()(j - 1));
        const double sigma = std::sqrt(theta);
        if (sigma <= tiny) {
            // Start vector in the null space of M; retry from a fresh direction.
            if (++reseeds > 8) break;
            j = 0;
            next = seeded_unit_vector(cols, split_seed(opts.seed, reseeds));
            continue;
        }
        // ||M^T u - sigma v|| for v = Q y, u = W y / sigma.
        next = z.leftCols(j) * y - theta * (q.leftCols(j) * y);
        residual = next.norm() / sigma;
        if (residual > 0.5 * opts.tol * std::max(1.0, sigma)) continue;

        Vector v = q.leftCols(j) * y;
        v.normalize();
        Vector u = m * v;
        const double s = u.norm();
        u /= s;
        residual = (m.transpose() * u - s * v).norm();
        if (residual <= opts.tol * std::max(1.0, s)) {
            out.sigma = s;
            out.u = std::move(u);
            out.v = std::move(v);
            out.iterations = steps;
            out.residual = residual;
            if (normalize_sign(out.u) < 0.0) out.v = -out.v;
            return out;
        }
        // Rounding made the cheap estimate optimistic: keep expanding.
        next = m.transpose() * u - s * v;
    }
    throw ConvergenceError("top_singular_pair: no convergence after " + std::to_string(steps) +
                               " iterations (residual " + std::to_string(residual) + ")",
                           residual);
}

Eigenpair eigenvector_k(const SymMatrix& m, int k, double tol) {
    const Eigen::Index n = m.n();
    if (k < 1 || k > n) {
        throw InputError("eigenvector_k: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(n) + "]");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(m.dense());
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("eigenvector_k: symmetric eigensolver did not converge", INFINITY);

    // Eigen sorts ascending; the k-th largest sits at n - k.
    const Eigen::Index idx = n - k;
    const Vector& values = solver.eigenvalues();
    Eigenpair out;
    out.value = values(idx);
    out.vector = solver.eigenvectors().col(idx);
    normalize_sign(out.vector);

    const double residual = (m.dense() * out.vector - out.value * out.vector).norm();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    if (residual > tol * scale) {
        throw ConvergenceError("eigenvector_k: residual " + std::to_string(residual) +
                                   " above tolerance",
                               residual);
    }
    const double gap_tol = tol * scale;
    if (idx > 0 && std::abs(values(idx) - values(idx - 1)) <= gap_tol) out.degenerate = true;
    if (idx + 1 < n && std::abs(values(idx + 1) - values(idx)) <= gap_tol) out.degenerate = true;
    return out;
}

}  // namespace gsbm
