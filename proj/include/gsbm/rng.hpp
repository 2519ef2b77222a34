#pragma once

#include <cstdint>
#include <random>

namespace gsbm {

/// SplitMix64 finalizer applied to base + golden-ratio * (stream + 1).
/// Derives independent seeds for sub-streams (replication r, truth/adjacency/mask).
std::uint64_t split_seed(std::uint64_t base, std::uint64_t stream);

/// Seedable 64-bit generator (std::mt19937_64, whose output sequence is fixed
/// by the standard). Draws are built from raw 64-bit words instead of the
/// <random> distributions, whose algorithms vary between standard libraries,
/// so a seed yields identical values on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, bound) by rejection; bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Fisher-Yates shuffle driven by `below`.
    template <class It>
    void shuffle(It first, It last) {
        const auto count = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = count; i > 1; --i) {
            const std::uint64_t j = below(i);
            using std::swap;
            swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gsbm
