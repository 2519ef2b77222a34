#include "gsbm/sbm.hpp"

#include "gsbm/errors.hpp"
#include "gsbm/rng.hpp"

#include <algorithm>
#include <numeric>

namespace gsbm {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SbmConfig::validate() const {
    if (n_inliers < 1) throw ConfigError("n_inliers must be at least 1");
    if (k_communities < 1 || k_communities > n_inliers)
        throw ConfigError("k_communities must lie in [1, n_inliers]");
    if (!is_probability(p_in) || !is_probability(p_out) || p_out > p_in)
        throw ConfigError("need 0 <= p_out <= p_in <= 1");
}

void OutlierConfig::validate() const {
    if (s < 0) throw ConfigError("number of outliers must be nonnegative");
    if (!is_probability(pi_hub) || !is_probability(pi_mix))
        throw ConfigError("pi_hub and pi_mix must be probabilities");
}

std::string to_string(OutlierKind kind) { return kind == OutlierKind::hub ? "hub" : "mixed"; }

OutlierKind parse_outlier_kind(const std::string& s) {
    if (s == "hub") return OutlierKind::hub;
    if (s == "mixed") return OutlierKind::mixed;
    throw ConfigError("unknown outlier kind '" + s + "' (expected hub or mixed)");
}

std::vector<int> GroundTruth::inliers() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < communities.size(); ++i)
        if (communities[i] >= 0) out.push_back(static_cast<int>(i));
    return out;
}

GroundTruth build_ground_truth(const SbmConfig& sbm, const OutlierConfig& out) {
    sbm.validate();
    out.validate();
    const int n = sbm.n_inliers + out.s;
    const int k = sbm.k_communities;
    Rng rng(split_seed(sbm.seed, 0));

    // Outlier positions: the first s entries of a random permutation.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    std::vector<int> outliers(order.begin(), order.begin() + out.s);
    std::sort(outliers.begin(), outliers.end());

    // Balanced labels by index, then shuffled over the inliers.
    std::vector<int> labels(sbm.n_inliers);
    for (int i = 0; i < sbm.n_inliers; ++i) labels[i] = i % k;
    rng.shuffle(labels.begin(), labels.end());

    std::vector<int> communities(n, -1);
    {
        std::size_t next_label = 0;
        std::size_t next_outlier = 0;
        for (int i = 0; i < n; ++i) {
            if (next_outlier < outliers.size() && outliers[next_outlier] == i) {
                ++next_outlier;
                continue;
            }
            communities[i] = labels[next_label++];
        }
    }

    DenseMatrix l_star = DenseMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        if (communities[j] < 0) continue;
        for (int i = 0; i < n; ++i) {
            if (communities[i] < 0) continue;
            l_star(i, j) = communities[i] == communities[j] ? sbm.p_in : sbm.p_out;
        }
    }

    DenseMatrix s_star = DenseMatrix::Zero(n, n);
    for (int j : outliers) {
        if (out.kind == OutlierKind::hub) {
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                const bool other_outlier = communities[i] < 0;
                // Outlier pairs are drawn once, by the column with the larger index.
                if (other_outlier && i > j) continue;
                s_star(i, j) = rng.uniform(out.pi_hub, 1.0);
            }
        } else {
            const int first = static_cast<int>(rng.below(k));
            int second = first;
            if (k > 1) {
                second = static_cast<int>(rng.below(k - 1));
                if (second >= first) ++second;
            }
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                const int c = communities[i];
                if (c < 0) {
                    if (i < j) s_star(i, j) = sbm.p_out;
                    continue;
                }
                s_star(i, j) = (c == first || c == second) ? out.pi_mix : sbm.p_out;
            }
        }
    }

    DenseMatrix p = l_star + s_star + s_star.transpose();
    p.diagonal().setZero();

    GroundTruth truth;
    truth.P = SymMatrix(std::move(p));
    truth.L_star = SymMatrix(std::move(l_star));
    truth.S_star = std::move(s_star);
    truth.communities = std::move(communities);
    truth.outliers = std::move(outliers);
    truth.sbm = sbm;
    truth.outlier = out;
    return truth;
}

namespace {

SymMatrix sample_symmetric(Eigen::Index n, std::uint64_t seed, auto&& probability) {
    Rng rng(seed);
    DenseMatrix m = DenseMatrix::Zero(n, n);
    for (Eigen::Index j = 1; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double x = rng.bernoulli(probability(i, j)) ? 1.0 : 0.0;
            m(i, j) = x;
            m(j, i) = x;
        }
    }
    return SymMatrix(std::move(m));
}

}  // namespace

SymMatrix sample_adjacency(const GroundTruth& truth, std::uint64_t seed) {
    return sample_symmetric(truth.n(), seed,
                            [&](Eigen::Index i, Eigen::Index j) { return truth.P(i, j); });
}

SymMatrix sample_mask(Eigen::Index n, double p_observe, std::uint64_t seed) {
    if (!is_probability(p_observe)) throw ConfigError("p_observe must lie in [0, 1]");
    return sample_symmetric(n, seed, [&](Eigen::Index, Eigen::Index) { return p_observe; });
}

}  // namespace gsbm
