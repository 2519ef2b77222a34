#pragma once

#include "gsbm/matrix.hpp"

#include <string>
#include <vector>

namespace gsbm {

/// Partially observed undirected graph.
///
/// `adjacency` records edges, `mask` records which dyads were examined. Both
/// are symmetric 0/1 matrices with zero diagonal. An edge on an unobserved
/// dyad is allowed; `validate` reports it as a warning.
struct ObservedGraph {
    SymMatrix adjacency;
    SymMatrix mask;
    std::vector<std::string> node_names;

    Eigen::Index n() const noexcept { return adjacency.n(); }

    /// Throws InputError/ShapeError on broken invariants; returns warnings.
    std::vector<std::string> validate() const;

    /// Number of observed edges, sum_{i<j} Omega_ij A_ij.
    double observed_edges() const;
};

/// All off-diagonal dyads observed.
SymMatrix full_mask(Eigen::Index n);

/// Restriction of the graph to the largest connected component of its
/// adjacency matrix (ties broken by smallest member index).
ObservedGraph largest_connected_component(const ObservedGraph& g);

}  // namespace gsbm
