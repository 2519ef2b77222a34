#include "gsbm/errors.hpp"
#include "gsbm/graph.hpp"
#include "gsbm/inference.hpp"
#include "gsbm/io.hpp"
#include "gsbm/mcgd.hpp"
#include "gsbm/rng.hpp"
#include "gsbm/sbm.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace gsbm;

namespace {

SymMatrix mask_or_full(const DenseMatrix& a, const std::optional<DenseMatrix>& mask) {
    return mask ? SymMatrix(*mask) : full_mask(a.rows());
}

}  // namespace

PYBIND11_MODULE(_gsbm, m) {
    m.doc() = "Robust stochastic block model fitting: outlier detection and link prediction.";

    auto error = py::register_exception<Error>(m, "GsbmError", PyExc_RuntimeError);
    py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<InputError>(m, "InputError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("lambda1", &SolverConfig::lambda1)
        .def_readwrite("lambda2", &SolverConfig::lambda2)
        .def_readwrite("epsilon", &SolverConfig::epsilon)
        .def_readwrite("eta", &SolverConfig::eta)
        .def_readwrite("max_iters", &SolverConfig::max_iters)
        .def_readwrite("rel_tol", &SolverConfig::rel_tol)
        .def_readwrite("svd_tol", &SolverConfig::svd_tol)
        .def_readwrite("svd_max_iter", &SolverConfig::svd_max_iter)
        .def("validate", &SolverConfig::validate);

    py::class_<FitResult>(m, "FitResult")
        .def_property_readonly("L", [](const FitResult& f) { return f.L_hat.dense(); })
        .def_readonly("S", &FitResult::S_hat)
        .def_readonly("R", &FitResult::R)
        .def_readonly("objective_trace", &FitResult::objective_trace)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("config", &FitResult::config)
        .def_property_readonly("n", &FitResult::n);

    m.def(
        "default_lambdas",
        [](const DenseMatrix& a, const std::optional<DenseMatrix>& mask, double c1, double c2) {
            const Lambdas l = default_lambdas(SymMatrix(a), mask_or_full(a, mask), c1, c2);
            return py::dict(py::arg("lambda1") = l.lambda1, py::arg("lambda2") = l.lambda2,
                            py::arg("avg_degree") = l.avg_degree);
        },
        py::arg("adjacency"), py::arg("mask") = py::none(), py::arg("c1") = kTheoryC1, py::arg("c2") = kTheoryC2);

    m.def(
        "fit",
        [](const DenseMatrix& a, const std::optional<DenseMatrix>& mask, const SolverConfig& cfg) {
            const SymMatrix sa(a);
            const SymMatrix sm = mask_or_full(a, mask);
            py::gil_scoped_release release;
            return fit(sa, sm, cfg);
        },
        py::arg("adjacency"), py::arg("mask") = py::none(), py::arg("config") = SolverConfig{},
        "Minimize the penalized objective from zero; mask defaults to every dyad observed.");

    m.def(
        "detect_outliers",
        [](const FitResult& f, std::optional<double> zero_tol) {
            return detect_outliers(f, zero_tol.value_or(default_zero_tol(f.n()))).detected;
        },
        py::arg("fit"), py::arg("zero_tol") = py::none());

    m.def(
        "predict_links",
        [](const FitResult& f, const std::vector<std::pair<int, int>>& pairs) {
            std::vector<NodePair> p;
            p.reserve(pairs.size());
            for (const auto& [i, j] : pairs) p.push_back({i, j});
            return predict_links(f, p).scores;
        },
        py::arg("fit"), py::arg("pairs"));

    m.def(
        "spectral_communities",
        [](const FitResult& f, const std::vector<int>& outliers) {
            return spectral_communities(f, outliers).labels;
        },
        py::arg("fit"), py::arg("outliers") = std::vector<int>{});

    m.def(
        "generate",
        [](int n_inliers, int k, double p_in, double p_out, const std::string& outliers, int s, double pi_hub,
           double pi_mix, std::uint64_t seed) {
            SbmConfig sbm{n_inliers, k, p_in, p_out, split_seed(seed, 0)};
            const GroundTruth t =
                build_ground_truth(sbm, OutlierConfig{parse_outlier_kind(outliers), s, pi_hub, pi_mix});
            const SymMatrix a = sample_adjacency(t, split_seed(seed, 1));
            return py::dict(py::arg("adjacency") = a.dense(), py::arg("P") = t.P.dense(),
                            py::arg("communities") = t.communities, py::arg("outliers") = t.outliers);
        },
        py::arg("n_inliers") = 200, py::arg("k") = 3, py::arg("p_in") = 0.5, py::arg("p_out") = 0.2,
        py::arg("outliers") = "hub", py::arg("s") = 0, py::arg("pi_hub") = 0.5, py::arg("pi_mix") = 0.6,
        py::arg("seed") = 0);

    m.def(
        "parse_edge_list",
        [](const std::string& text) {
            const ObservedGraph g = parse_edge_list(text);
            return py::make_tuple(g.adjacency.dense(), g.node_names);
        },
        py::arg("text"), "Returns (adjacency, node_names).");
}
