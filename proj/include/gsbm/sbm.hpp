#pragma once

#include "gsbm/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gsbm {

/// Balanced stochastic block model for the inliers.
struct SbmConfig {
    int n_inliers = 200;
    int k_communities = 3;
    double p_in = 0.5;
    double p_out = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class OutlierKind { hub, mixed };

std::string to_string(OutlierKind kind);
OutlierKind parse_outlier_kind(const std::string& s);

/// Outlier nodes appended to the inliers.
///
/// Hub j links to every other node i with its own probability drawn from
/// U[pi_hub, 1]. A mixed-membership node picks two distinct communities and
/// links to their members with pi_mix, to everyone else with p_out.
struct OutlierConfig {
    OutlierKind kind = OutlierKind::hub;
    int s = 0;
    double pi_hub = 0.5;
    double pi_mix = 0.6;

    void validate() const;
};

/// Ground truth for n = n_inliers + s nodes.
///
/// Off the diagonal, P = L* + S* + S*^T. L* is zero on outlier rows and
/// columns; S* is nonzero only in outlier columns. Outlier-outlier dyads are
/// stored in S*_ij with i < j.
struct GroundTruth {
    SymMatrix P;
    SymMatrix L_star;
    DenseMatrix S_star;
    /// Community per node, -1 for outliers.
    std::vector<int> communities;
    /// Sorted outlier indices.
    std::vector<int> outliers;
    SbmConfig sbm;
    OutlierConfig outlier;

    Eigen::Index n() const noexcept { return P.n(); }
    std::vector<int> inliers() const;
};

/// Deterministic in (sbm, out). Outlier positions and the community
/// assignment (sizes differ by at most one) are shuffled with sbm.seed.
GroundTruth build_ground_truth(const SbmConfig& sbm, const OutlierConfig& out);

/// Independent Bernoulli(P_ij) edges for i < j, mirrored, zero diagonal.
SymMatrix sample_adjacency(const GroundTruth& truth, std::uint64_t seed);

/// Independent Bernoulli(p_observe) observation flags for i < j, mirrored, zero diagonal.
SymMatrix sample_mask(Eigen::Index n, double p_observe, std::uint64_t seed);

}  // namespace gsbm
