#include "gsbm/inference.hpp"

#include "gsbm/errors.hpp"
#include "gsbm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gsbm {

double observed_average_degree(const SymMatrix& a, const SymMatrix& mask) {
    if (a.n() != mask.n()) throw ShapeError("adjacency and mask differ in size");
    if (a.n() == 0 || mask.dense().cwiseAbs().sum() == 0.0)
        throw ConfigError("no observed dyads: penalties are undefined");
    return a.dense().cwiseProduct(mask.dense()).sum() / static_cast<double>(a.n());
}

Lambdas default_lambdas(const SymMatrix& a, const SymMatrix& mask, double c1, double c2) {
    Lambdas out;
    out.avg_degree = observed_average_degree(a, mask);
    const double root = std::sqrt(out.avg_degree);
    out.lambda1 = c1 * root;
    out.lambda2 = c2 * root;
    out.empty_graph = out.avg_degree == 0.0;
    return out;
}

double default_zero_tol(Eigen::Index n) { return 1e-10 * std::sqrt(static_cast<double>(n)); }

KktCertificate kkt_certificate(const FitResult& fit, const SymMatrix& a, const SymMatrix& mask,
                               double lambda2) {
    const Eigen::Index n = fit.n();
    if (a.n() != n || mask.n() != n) throw ShapeError("kkt_certificate: graph and fit differ in size");
    const DenseMatrix& l = fit.L_hat.dense();
    const DenseMatrix& s = fit.S_hat;

    KktCertificate out;
    out.threshold = 0.5 * lambda2;
    out.lhs.resize(n);
    out.flags.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        long double sq = 0.0L;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (mask(i, j) == 0.0) continue;
            const double r = std::max(0.0, mask(i, j) * (a(i, j) - l(i, j) - s(j, i)));
            sq += static_cast<long double>(r) * r;
        }
        out.lhs(j) = static_cast<double>(std::sqrt(sq));
        out.flags[j] = out.lhs(j) > out.threshold;
    }
    return out;
}

double OutlierReport::certificate_agreement() const {
    if (!has_certificate || column_norms.size() == 0) return 1.0;
    std::vector<bool> in_support(column_norms.size(), false);
    for (int j : detected) in_support[j] = true;
    Eigen::Index agree = 0;
    for (Eigen::Index j = 0; j < column_norms.size(); ++j)
        if (in_support[j] == certificate.flags[j]) ++agree;
    return static_cast<double>(agree) / static_cast<double>(column_norms.size());
}

OutlierReport detect_outliers(const FitResult& fit, double zero_tol) {
    OutlierReport out;
    out.column_norms = column_norms(fit.S_hat);
    for (Eigen::Index j = 0; j < out.column_norms.size(); ++j)
        if (out.column_norms(j) > zero_tol) out.detected.push_back(static_cast<int>(j));
    return out;
}

OutlierReport detect_outliers(const FitResult& fit, const SymMatrix& a, const SymMatrix& mask,
                              double zero_tol) {
    OutlierReport out = detect_outliers(fit, zero_tol);
    out.certificate = kkt_certificate(fit, a, mask, fit.config.lambda2);
    out.has_certificate = true;
    return out;
}

std::vector<NodePair> unobserved_pairs(const SymMatrix& mask) {
    std::vector<NodePair> out;
    for (Eigen::Index j = 1; j < mask.n(); ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            if (mask(i, j) == 0.0) out.push_back({static_cast<int>(i), static_cast<int>(j)});
    return out;
}

namespace {

void check_pair(const NodePair& p, Eigen::Index n) {
    if (p.i == p.j) throw InputError("diagonal pair (" + std::to_string(p.i) + "," + std::to_string(p.j) + ")");
    if (p.i < 0 || p.j < 0 || p.i >= n || p.j >= n)
        throw InputError("pair (" + std::to_string(p.i) + "," + std::to_string(p.j) + ") out of range");
}

}  // namespace

Prediction predict_links(const FitResult& fit, std::span<const NodePair> pairs) {
    const Eigen::Index n = fit.n();
    const DenseMatrix& l = fit.L_hat.dense();
    const DenseMatrix& s = fit.S_hat;
    Prediction out;
    out.pairs.assign(pairs.begin(), pairs.end());
    out.scores.reserve(pairs.size());
    for (const NodePair& p : pairs) {
        check_pair(p, n);
        // Fixed summation order keeps score(i,j) == score(j,i) bit for bit.
        const int lo = std::min(p.i, p.j);
        const int hi = std::max(p.i, p.j);
        const double raw = l(lo, hi) + (s(lo, hi) + s(hi, lo));
        out.scores.push_back(std::clamp(raw, 0.0, 1.0));
    }
    return out;
}

Prediction baseline_average_degree(const SymMatrix& a, const SymMatrix& mask,
                                   std::span<const NodePair> pairs) {
    if (a.n() != mask.n()) throw ShapeError("adjacency and mask differ in size");
    const double observed = mask.dense().sum();
    if (observed == 0.0) throw ConfigError("baseline needs at least one observed dyad");
    const double density = a.dense().cwiseProduct(mask.dense()).sum() / observed;
    Prediction out;
    out.pairs.assign(pairs.begin(), pairs.end());
    for (const NodePair& p : pairs) check_pair(p, a.n());
    out.scores.assign(pairs.size(), density);
    return out;
}

CommunityAssignment spectral_communities(const FitResult& fit, std::span<const int> outliers,
                                         double tol) {
    const Eigen::Index n = fit.n();
    Eigenpair second = eigenvector_k(fit.L_hat, 2, tol);
    if (second.degenerate) {
        // When the leading eigenvalue itself is repeated, any basis of its
        // eigenspace is valid. Take the first vector along the projection of
        // the constant vector and the second orthogonal to it, so that
        // equal disconnected blocks split by sign.
        Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(fit.L_hat.dense());
        const Vector& values = solver.eigenvalues();
        const double gap_tol = tol * std::max(1.0, values.cwiseAbs().maxCoeff());
        Eigen::Index dim = 0;
        while (dim < n && values(n - 1) - values(n - 1 - dim) <= gap_tol) ++dim;
        if (dim >= 2) {
            const DenseMatrix basis = solver.eigenvectors().rightCols(dim);
            Vector p = basis * (basis.transpose() * Vector::Ones(n));
            if (p.norm() > 0.0) {
                p.normalize();
                Vector best;
                for (Eigen::Index c = 0; c < dim; ++c) {
                    Vector w = basis.col(c) - p.dot(basis.col(c)) * p;
                    if (best.size() == 0 || w.norm() > best.norm()) best = std::move(w);
                }
                best.normalize();
                normalize_sign(best);
                second.vector = std::move(best);
            }
        }
    }
    CommunityAssignment out;
    out.degenerate = second.degenerate;
    out.eigenvalue = second.value;
    out.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.labels[i] = second.vector(i) >= 0.0 ? 0 : 1;
    for (int j : outliers) {
        if (j < 0 || j >= n) throw InputError("outlier index out of range");
        out.labels[j] = -1;
    }
    out.eigenvector = std::move(second.vector);
    return out;
}

DenseMatrix top_eigenvectors(const FitResult& fit, int k) {
    const Eigen::Index n = fit.n();
    if (k < 1 || k > n) throw InputError("top_eigenvectors: k outside [1, n]");
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(fit.L_hat.dense());
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("top_eigenvectors: eigensolver did not converge", INFINITY);
    DenseMatrix out(n, k);
    for (int c = 0; c < k; ++c) {
        Vector v = solver.eigenvectors().col(n - 1 - c);
        normalize_sign(v);
        out.col(c) = v;
    }
    return out;
}

int misclassified(std::span<const int> labels, std::span<const int> truth) {
    if (labels.size() != truth.size()) throw ShapeError("misclassified: label vectors differ in length");
    int wrong_as_is = 0;
    int wrong_swapped = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || truth[i] < 0) continue;
        if (labels[i] == truth[i])
            ++wrong_swapped;
        else
            ++wrong_as_is;
    }
    return std::min(wrong_as_is, wrong_swapped);
}

}  // namespace gsbm
