#include "gsbm/graph.hpp"

#include "gsbm/errors.hpp"

#include <algorithm>
#include <queue>

namespace gsbm {

namespace {

void check_binary(const SymMatrix& m, const char* name) {
    for (Eigen::Index j = 0; j < m.n(); ++j) {
        if (m(j, j) != 0.0) throw InputError(std::string(name) + " has a nonzero diagonal entry");
        for (Eigen::Index i = 0; i < m.n(); ++i) {
            const double x = m(i, j);
            if (x != 0.0 && x != 1.0) throw InputError(std::string(name) + " entries must be 0 or 1");
        }
    }
}

}  // namespace

std::vector<std::string> ObservedGraph::validate() const {
    if (mask.n() != adjacency.n()) throw ShapeError("adjacency and mask differ in size");
    if (!node_names.empty() && static_cast<Eigen::Index>(node_names.size()) != adjacency.n())
        throw ShapeError("node_names length differs from node count");
    check_binary(adjacency, "adjacency");
    check_binary(mask, "mask");

    std::vector<std::string> warnings;
    std::size_t unobserved_edges = 0;
    for (Eigen::Index j = 0; j < n(); ++j)
        for (Eigen::Index i = 0; i < j; ++i)
            if (adjacency(i, j) == 1.0 && mask(i, j) == 0.0) ++unobserved_edges;
    if (unobserved_edges > 0) {
        warnings.push_back(std::to_string(unobserved_edges) +
                           " edge(s) lie on unobserved dyads and are ignored by the fit");
    }
    return warnings;
}

double ObservedGraph::observed_edges() const {
    return 0.5 * adjacency.dense().cwiseProduct(mask.dense()).sum();
}

SymMatrix full_mask(Eigen::Index n) {
    DenseMatrix m = DenseMatrix::Ones(n, n);
    m.diagonal().setZero();
    return SymMatrix(std::move(m));
}

ObservedGraph largest_connected_component(const ObservedGraph& g) {
    const Eigen::Index n = g.n();
    std::vector<int> component(n, -1);
    std::vector<std::vector<Eigen::Index>> members;
    for (Eigen::Index start = 0; start < n; ++start) {
        if (component[start] >= 0) continue;
        const int id = static_cast<int>(members.size());
        members.emplace_back();
        std::queue<Eigen::Index> frontier;
        frontier.push(start);
        component[start] = id;
        while (!frontier.empty()) {
            const Eigen::Index v = frontier.front();
            frontier.pop();
            members[id].push_back(v);
            for (Eigen::Index w = 0; w < n; ++w) {
                if (g.adjacency(v, w) != 0.0 && component[w] < 0) {
                    component[w] = id;
                    frontier.push(w);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < members.size(); ++c)
        if (members[c].size() > members[best].size()) best = c;

    std::vector<Eigen::Index> keep = members.empty() ? std::vector<Eigen::Index>{} : members[best];
    std::sort(keep.begin(), keep.end());
    const auto m = static_cast<Eigen::Index>(keep.size());
    DenseMatrix a(m, m), w(m, m);
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            a(i, j) = g.adjacency(keep[i], keep[j]);
            w(i, j) = g.mask(keep[i], keep[j]);
        }
        if (!g.node_names.empty()) names.push_back(g.node_names[keep[j]]);
    }
    return ObservedGraph{SymMatrix(std::move(a)), SymMatrix(std::move(w)), std::move(names)};
}

}  // namespace gsbm
