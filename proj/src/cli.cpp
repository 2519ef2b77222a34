#include "gsbm/cli.hpp"

#include "gsbm/errors.hpp"
#include "gsbm/graph.hpp"
#include "gsbm/harness.hpp"
#include "gsbm/inference.hpp"
#include "gsbm/io.hpp"
#include "gsbm/mcgd.hpp"
#include "gsbm/rng.hpp"
#include "gsbm/sbm.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <optional>
#include <ostream>
#include <sstream>

namespace gsbm {

LambdaSpec parse_lambda_spec(const std::string& s) {
    LambdaSpec out;
    if (s == "auto") return out;
    std::string_view body = s;
    if (!body.empty() && (body.front() == 'c' || body.front() == 'C')) {
        out.kind = LambdaSpec::Kind::multiplier;
        body.remove_prefix(1);
    } else {
        out.kind = LambdaSpec::Kind::value;
    }
    const auto res = std::from_chars(body.data(), body.data() + body.size(), out.x);
    if (body.empty() || res.ec != std::errc() || res.ptr != body.data() + body.size() || !(out.x >= 0.0))
        throw ConfigError("penalty must be 'auto', a nonnegative real or cX, got '" + s + "'");
    return out;
}

namespace {

double resolve_lambda(const LambdaSpec& spec, double theory_constant, double avg_degree) {
    switch (spec.kind) {
        case LambdaSpec::Kind::automatic: return theory_constant * std::sqrt(avg_degree);
        case LambdaSpec::Kind::multiplier: return spec.x * std::sqrt(avg_degree);
        case LambdaSpec::Kind::value: return spec.x;
    }
    return 0.0;
}

std::vector<std::string> integer_labels(int n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

struct GraphInput {
    std::string graph;
    std::string mask;
    std::string mask_mode = "missing";
    int num_nodes = 0;
};

void add_graph_options(CLI::App* cmd, GraphInput& in, bool required) {
    auto* g = cmd->add_option("--graph", in.graph, "Edge list, one 'u v' pair per line");
    if (required) g->required();
    cmd->add_option("--mask", in.mask, "Pair list 'i j' of dense node indices");
    cmd->add_option("--mask-mode", in.mask_mode, "observed: listed pairs are the observed ones; missing: listed pairs are unobserved")
        ->check(CLI::IsMember({"observed", "missing"}));
    cmd->add_option("--num-nodes", in.num_nodes, "Pre-register labels 0..N-1 at their own index");
}

ObservedGraph load_graph(const GraphInput& in, std::ostream& err,
                         const std::vector<std::string>& preset = {}) {
    std::vector<std::string> warnings;
    const std::vector<std::string> labels = preset.empty() ? integer_labels(in.num_nodes) : preset;
    ObservedGraph g = parse_edge_list(read_file(in.graph), &warnings, labels);
    if (!in.mask.empty()) g.mask = parse_mask(read_file(in.mask), g.n(), parse_mask_mode(in.mask_mode));
    for (const std::string& w : g.validate()) warnings.push_back(w);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';
    return g;
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_file_atomic(path, content);
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
    return out;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Outlier-robust estimation of partially observed networks"};
    app.name(args.empty() ? "gsbm" : args[0]);
    app.require_subcommand(1);
    app.set_version_flag("--version", "gsbm 1.0.0");

    // generate
    SbmConfig sbm;
    OutlierConfig outl;
    std::string outlier_kind = "hub";
    double p_observe = 1.0;
    std::uint64_t seed = 0;
    std::string out_path, truth_path, mask_out;
    auto* gen = app.add_subcommand("generate", "Sample a network with outliers");
    gen->add_option("--n", sbm.n_inliers, "Number of inliers")->check(CLI::PositiveNumber);
    gen->add_option("--k", sbm.k_communities, "Number of communities")->check(CLI::PositiveNumber);
    gen->add_option("--p-in", sbm.p_in, "Within-community link probability");
    gen->add_option("--p-out", sbm.p_out, "Between-community link probability");
    gen->add_option("--outliers", outlier_kind, "Outlier type")->check(CLI::IsMember({"hub", "mixed"}));
    gen->add_option("--s", outl.s, "Number of outliers")->check(CLI::NonNegativeNumber);
    gen->add_option("--pi-hub", outl.pi_hub, "Lower end of the hub link probability range");
    gen->add_option("--pi-mix", outl.pi_mix, "Link probability of a mixed node to its two communities");
    gen->add_option("--p-observe", p_observe, "Probability that a dyad is observed");
    gen->add_option("--seed", seed, "Random seed")->required();
    gen->add_option("--out", out_path, "Edge list output")->required();
    gen->add_option("--truth", truth_path, "Ground truth JSON output");
    gen->add_option("--mask-out", mask_out, "Unobserved pairs output (read back with --mask-mode missing)");

    // fit
    GraphInput fit_in;
    bool lcc = false;
    std::string lambda1_flag = "auto", lambda2_flag = "auto";
    SolverConfig cfg;
    std::string fit_out;
    auto* fitc = app.add_subcommand("fit", "Estimate L and S from a graph");
    add_graph_options(fitc, fit_in, true);
    fitc->add_flag("--lcc", lcc, "Restrict to the largest connected component first");
    fitc->add_option("--lambda1", lambda1_flag, "auto, a real, or cX (X sqrt(average degree))");
    fitc->add_option("--lambda2", lambda2_flag, "auto, a real, or cX (X sqrt(average degree))");
    fitc->add_option("--epsilon", cfg.epsilon, "Ridge weight");
    fitc->add_option("--max-iters", cfg.max_iters, "Iteration cap");
    fitc->add_option("--rel-tol", cfg.rel_tol, "Relative objective decrease to stop at");
    fitc->add_option("--svd-tol", cfg.svd_tol, "Singular pair residual tolerance");
    fitc->add_option("--out", fit_out, "Fit file output (omit to only report)");

    // detect
    std::string fit_path, report_out;
    GraphInput det_in;
    double zero_tol = -1.0;
    auto* det = app.add_subcommand("detect", "List outlier nodes of a fit");
    det->add_option("--fit", fit_path, "Fit file")->required();
    add_graph_options(det, det_in, false);
    det->add_option("--zero-tol", zero_tol, "Column norm above which a node is an outlier (default 1e-10 sqrt(n))");
    det->add_option("--out", report_out, "CSV output (default stdout)");

    // predict
    GraphInput pred_in;
    std::string pairs_path, pred_out;
    auto* pred = app.add_subcommand("predict", "Score node pairs");
    pred->add_option("--fit", fit_path, "Fit file")->required();
    pred->add_option("--pairs", pairs_path, "Pairs 'u v' of node labels to score");
    pred->add_option("--mask", pred_in.mask, "Score the unobserved pairs of this mask");
    pred->add_option("--mask-mode", pred_in.mask_mode, "Mask file semantics")->check(CLI::IsMember({"observed", "missing"}));
    pred->add_option("--out", pred_out, "CSV output (default stdout)");

    // communities
    std::string labels_path, comm_out;
    auto* comm = app.add_subcommand("communities", "Two-way split by the second eigenvector of L");
    comm->add_option("--fit", fit_path, "Fit file")->required();
    comm->add_option("--zero-tol", zero_tol, "Outlier threshold (default 1e-10 sqrt(n))");
    comm->add_option("--labels", labels_path, "Reference 'node community' file; logs the misclassification count");
    comm->add_option("--out", comm_out, "CSV output (default stdout)");

    // bench
    ExperimentSpec bench;
    std::string scenario = "hub";
    std::vector<int> s_list{2, 5, 10};
    std::vector<double> pi_list;
    std::optional<double> c1, c2, bench_p_observe;
    std::string summary_out = "summary.csv", reps_out = "reps.csv";
    auto* bch = app.add_subcommand("bench", "Replicated simulation study");
    bch->add_option("--scenario", scenario, "hub, mixed or prediction")->check(CLI::IsMember({"hub", "mixed", "prediction"}));
    bch->add_option("--outliers", outlier_kind, "Outlier type for the prediction scenario")->check(CLI::IsMember({"hub", "mixed"}));
    bch->add_option("--s", s_list, "Outlier counts")->delimiter(',');
    bch->add_option("--pi", pi_list, "pi_hub or pi_mix values")->delimiter(',');
    bch->add_option("--reps", bench.replications, "Replications per cell")->check(CLI::PositiveNumber);
    bch->add_option("--n", bench.sbm.n_inliers, "Number of inliers");
    bch->add_option("--k", bench.sbm.k_communities, "Number of communities");
    bch->add_option("--p-in", bench.sbm.p_in, "Within-community link probability");
    bch->add_option("--p-out", bench.sbm.p_out, "Between-community link probability");
    bch->add_option("--p-observe", bench_p_observe, "Observation probability (default 1, 0.8 for prediction)");
    bch->add_option("--c1", c1, "lambda1 multiplier of sqrt(average degree)");
    bch->add_option("--c2", c2, "lambda2 multiplier of sqrt(average degree)");
    bch->add_option("--workers", bench.workers, "Worker threads (capped by GSBM_THREADS)");
    bch->add_option("--seed", seed, "Base seed")->required();
    bch->add_option("--summary", summary_out, "Per-cell CSV");
    bch->add_option("--reps-out", reps_out, "Per-replication CSV");

    std::vector<const char*> argv;
    std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"gsbm"} : args;
    for (const std::string& a : storage) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            outl.kind = parse_outlier_kind(outlier_kind);
            sbm.seed = split_seed(seed, 0);
            err << "generate: n=" << sbm.n_inliers << " k=" << sbm.k_communities << " p_in=" << sbm.p_in
                << " p_out=" << sbm.p_out << " outliers=" << outlier_kind << " s=" << outl.s
                << " pi_hub=" << outl.pi_hub << " pi_mix=" << outl.pi_mix << " p_observe=" << p_observe
                << " seed=" << seed << '\n';
            const GroundTruth truth = build_ground_truth(sbm, outl);
            const SymMatrix a = sample_adjacency(truth, split_seed(seed, 1));
            write_file_atomic(out_path, format_edge_list(a));
            if (!truth_path.empty()) write_file_atomic(truth_path, truth_to_json(truth));
            if (p_observe < 1.0 || !mask_out.empty()) {
                if (mask_out.empty()) throw ConfigError("--p-observe below 1 needs --mask-out");
                const SymMatrix mask = sample_mask(truth.n(), p_observe, split_seed(seed, 2));
                write_file_atomic(mask_out, format_missing_pairs(mask));
            }
            err << "generate: wrote " << truth.n() << " nodes; read back with --num-nodes " << truth.n() << '\n';
            return kExitOk;
        }

        if (fitc->parsed()) {
            LambdaSpec l1, l2;
            try {
                l1 = parse_lambda_spec(lambda1_flag);
                l2 = parse_lambda_spec(lambda2_flag);
            } catch (const ConfigError& e) {
                err << "error: " << e.what() << '\n';
                return kExitUsage;
            }
            ObservedGraph g = load_graph(fit_in, err);
            if (lcc) {
                const Eigen::Index before = g.n();
                g = largest_connected_component(g);
                err << "fit: largest connected component keeps " << g.n() << " of " << before << " nodes\n";
            }
            const double d = observed_average_degree(g.adjacency, g.mask);
            cfg.lambda1 = resolve_lambda(l1, kTheoryC1, d);
            cfg.lambda2 = resolve_lambda(l2, kTheoryC2, d);
            err << "fit: n=" << g.n() << " edges=" << g.observed_edges() << " avg_degree=" << d
                << " lambda1=" << format_double(cfg.lambda1) << " lambda2=" << format_double(cfg.lambda2)
                << " epsilon=" << cfg.epsilon << " eta=" << cfg.step() << " max_iters=" << cfg.max_iters
                << " rel_tol=" << cfg.rel_tol << " svd_tol=" << cfg.svd_tol << '\n';
            const FitResult f = fit(g, cfg);
            err << "fit: iterations=" << f.iterations << " converged=" << (f.converged ? "yes" : "no")
                << " objective=" << format_double(f.objective_trace.back()) << " R=" << format_double(f.R) << '\n';
            if (!fit_out.empty()) save_fit(fit_out, f, g.node_names);
            return kExitOk;
        }

        if (det->parsed()) {
            const StoredFit stored = load_fit(fit_path);
            const double tol = zero_tol >= 0.0 ? zero_tol : default_zero_tol(stored.fit.n());
            OutlierReport report;
            if (!det_in.graph.empty()) {
                const ObservedGraph g = load_graph(det_in, err, stored.node_names);
                if (g.n() != stored.fit.n()) throw InputError("graph has nodes that are not in the fit");
                report = detect_outliers(stored.fit, g.adjacency, g.mask, tol);
                err << "detect: certificate agreement=" << report.certificate_agreement() << '\n';
            } else {
                report = detect_outliers(stored.fit, tol);
            }
            err << "detect: zero_tol=" << format_double(tol) << " outliers=" << report.detected.size() << '\n';
            write_output(report_out, format_outlier_report(report, stored.node_names), out);
            return kExitOk;
        }

        if (pred->parsed()) {
            const StoredFit stored = load_fit(fit_path);
            std::vector<NodePair> pairs;
            if (!pairs_path.empty()) {
                // Map labels through the fit's node order.
                const ObservedGraph q = parse_edge_list(read_file(pairs_path), nullptr, stored.node_names);
                if (q.n() != stored.fit.n()) throw InputError("pairs mention nodes that are not in the fit");
                for (Eigen::Index i = 0; i < q.n(); ++i)
                    for (Eigen::Index j = i + 1; j < q.n(); ++j)
                        if (q.adjacency(i, j) != 0.0) pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
            } else if (!pred_in.mask.empty()) {
                pairs = unobserved_pairs(parse_mask(read_file(pred_in.mask), stored.fit.n(), parse_mask_mode(pred_in.mask_mode)));
            } else {
                throw ConfigError("predict needs --pairs or --mask");
            }
            err << "predict: " << pairs.size() << " pairs\n";
            write_output(pred_out, format_predictions(predict_links(stored.fit, pairs), stored.node_names), out);
            return kExitOk;
        }

        if (comm->parsed()) {
            const StoredFit stored = load_fit(fit_path);
            const double tol = zero_tol >= 0.0 ? zero_tol : default_zero_tol(stored.fit.n());
            const OutlierReport report = detect_outliers(stored.fit, tol);
            const CommunityAssignment ca = spectral_communities(stored.fit, report.detected);
            if (ca.degenerate) err << "warning: second eigenvalue is repeated; the split is not unique\n";
            err << "communities: outliers=" << report.detected.size() << " eigenvalue=" << format_double(ca.eigenvalue) << '\n';
            if (!labels_path.empty()) {
                const std::vector<int> truth = parse_labels(read_file(labels_path), stored.node_names);
                err << "communities: misclassified=" << misclassified(ca.labels, truth) << '\n';
            }
            std::string csv = "node,community\n";
            for (std::size_t i = 0; i < ca.labels.size(); ++i)
                csv += stored.node_names[i] + ',' + std::to_string(ca.labels[i]) + '\n';
            write_output(comm_out, csv, out);
            return kExitOk;
        }

        if (bch->parsed()) {
            bench.scenario = parse_scenario(scenario);
            bench.base_seed = seed;
            bench.outlier.kind = bench.scenario == Scenario::hub     ? OutlierKind::hub
                                 : bench.scenario == Scenario::mixed ? OutlierKind::mixed
                                                                     : parse_outlier_kind(outlier_kind);
            bench.p_observe = bench_p_observe.value_or(bench.scenario == Scenario::prediction ? 0.8 : 1.0);
            if (c1 || c2) {
                const PenaltyConstants def = default_constants(bench.scenario);
                bench.constants = PenaltyConstants{c1.value_or(def.c1), c2.value_or(def.c2)};
            }
            if (pi_list.empty()) {
                if (bench.scenario == Scenario::prediction)
                    pi_list = {bench.outlier.kind == OutlierKind::hub ? 0.2 : 0.4};
                else if (bench.scenario == Scenario::hub)
                    pi_list = {0.2, 0.5, 0.8};
                else
                    pi_list = {0.4, 0.6, 0.8};
            }
            const PenaltyConstants used = bench.constants.value_or(default_constants(bench.scenario));
            err << "bench: scenario=" << scenario << " outliers=" << to_string(bench.outlier.kind)
                << " reps=" << bench.replications << " p_observe=" << bench.p_observe << " c1=" << used.c1
                << " c2=" << used.c2 << " pi=" << join(pi_list) << " seed=" << seed
                << " workers=" << resolve_workers(bench.workers) << '\n';
            std::vector<MetricsReport> reports;
            for (double pi : pi_list) {
                for (int s : s_list) {
                    ExperimentSpec spec = bench;
                    spec.outlier.s = s;
                    spec.outlier.pi_hub = pi;
                    spec.outlier.pi_mix = pi;
                    reports.push_back(run_experiment(spec));
                    const MetricsReport& r = reports.back();
                    err << "bench: s=" << s << " pi=" << pi << " power=" << format_double(r.power)
                        << " fdr=" << format_double(r.fdr) << " mse_model=" << format_double(r.pred_mse_model)
                        << " mse_baseline=" << format_double(r.pred_mse_baseline) << " failures=" << r.failures << '\n';
                }
            }
            std::ostringstream summary, reps;
            write_summary_csv(summary, reports);
            write_reps_csv(reps, reports);
            write_file_atomic(summary_out, summary.str());
            write_file_atomic(reps_out, reps.str());
            return kExitOk;
        }
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace gsbm
