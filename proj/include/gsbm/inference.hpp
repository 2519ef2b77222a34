#pragma once

#include "gsbm/matrix.hpp"
#include "gsbm/mcgd.hpp"

#include <span>
#include <vector>

namespace gsbm {

/// Constants of the theoretical penalty choice lambda = C sqrt(observed average degree).
inline constexpr double kTheoryC1 = 84.0;
inline constexpr double kTheoryC2 = 19.0;

struct Lambdas {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double avg_degree = 0.0;  ///< sum_ij Omega_ij A_ij / n
    bool empty_graph = false; ///< no observed edge; both penalties are 0
};

/// sum_ij Omega_ij A_ij / n. Throws ConfigError when nothing is observed.
double observed_average_degree(const SymMatrix& a, const SymMatrix& mask);

/// lambda1 = c1 sqrt(d), lambda2 = c2 sqrt(d) with d the observed average
/// degree. The defaults are the theoretical constants 84 and 19.
Lambdas default_lambdas(const SymMatrix& a, const SymMatrix& mask, double c1 = kTheoryC1,
                        double c2 = kTheoryC2);

/// Support threshold for columns of S: 1e-10 sqrt(n).
double default_zero_tol(Eigen::Index n);

struct KktCertificate {
    /// ||Omega_.j .* (A_.j - L_.j - S_j.)_+||_2 per node.
    Vector lhs;
    /// lhs > threshold.
    std::vector<bool> flags;
    double threshold = 0.0;  ///< lambda2 / 2
};

/// Column-wise optimality certificate of the fitted S: at an exact optimum,
/// column j of S is nonzero iff flags[j].
KktCertificate kkt_certificate(const FitResult& fit, const SymMatrix& a, const SymMatrix& mask,
                               double lambda2);

struct OutlierReport {
    std::vector<int> detected;  ///< columns of S with norm > zero_tol
    Vector column_norms;
    bool has_certificate = false;
    KktCertificate certificate;  ///< filled when the graph is supplied

    /// Fraction of nodes whose support membership agrees with the certificate flag.
    double certificate_agreement() const;
};

OutlierReport detect_outliers(const FitResult& fit, double zero_tol);
OutlierReport detect_outliers(const FitResult& fit, const SymMatrix& a, const SymMatrix& mask,
                              double zero_tol);

struct NodePair {
    int i = 0;
    int j = 0;
    friend bool operator==(const NodePair&, const NodePair&) = default;
};

struct Prediction {
    std::vector<NodePair> pairs;
    std::vector<double> scores;  ///< in [0, 1]
};

/// Upper-triangle pairs (i < j) with Omega_ij = 0.
std::vector<NodePair> unobserved_pairs(const SymMatrix& mask);

/// clamp(L_ij + S_ij + S_ji, 0, 1). Throws InputError for i == j or an index out of range.
Prediction predict_links(const FitResult& fit, std::span<const NodePair> pairs);

/// Observed edge density sum(Omega .* A) / sum(Omega) for every pair.
/// Throws ConfigError for an empty mask.
Prediction baseline_average_degree(const SymMatrix& a, const SymMatrix& mask,
                                   std::span<const NodePair> pairs);

struct CommunityAssignment {
    /// 0 where the second eigenvector coordinate is >= 0, 1 where negative,
    /// -1 for nodes listed as outliers.
    std::vector<int> labels;
    bool degenerate = false;  ///< second eigenvalue is repeated
    double eigenvalue = 0.0;
    Vector eigenvector;
};

/// Two-way split by the sign of the second eigenvector of the fitted L.
/// If the leading eigenvalue is repeated, the second vector is taken inside
/// its eigenspace orthogonal to the projection of the constant vector.
CommunityAssignment spectral_communities(const FitResult& fit, std::span<const int> outliers,
                                         double tol = 1e-9);

/// Leading k eigenvectors of the fitted L (columns, by decreasing eigenvalue)
/// for callers clustering into more than two groups.
DenseMatrix top_eigenvectors(const FitResult& fit, int k);

/// Disagreements between two 0/1 labelings up to swapping the labels.
/// Nodes with a negative label in either vector are skipped.
int misclassified(std::span<const int> labels, std::span<const int> truth);

}  // namespace gsbm
