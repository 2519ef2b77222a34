#include "gsbm/harness.hpp"

#include "gsbm/errors.hpp"
#include "gsbm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <thread>

namespace gsbm {

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::hub: return "hub";
        case Scenario::mixed: return "mixed";
        case Scenario::prediction: return "prediction";
    }
    return "?";
}

Scenario parse_scenario(const std::string& s) {
    if (s == "hub") return Scenario::hub;
    if (s == "mixed") return Scenario::mixed;
    if (s == "prediction") return Scenario::prediction;
    throw ConfigError("unknown scenario '" + s + "' (expected hub, mixed or prediction)");
}

PenaltyConstants default_constants(Scenario s) {
    return s == Scenario::prediction ? kPredictionConstants : kDetectionConstants;
}

DetectionMetrics detection_metrics(std::span<const int> detected, std::span<const int> truth,
                                   Eigen::Index n) {
    std::vector<char> in_truth(static_cast<std::size_t>(n), 0);
    for (int j : truth) {
        if (j < 0 || j >= n) throw InputError("truth index " + std::to_string(j) + " out of range");
        in_truth[j] = 1;
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::size_t n_detected = 0, hits = 0;
    for (int j : detected) {
        if (j < 0 || j >= n) throw InputError("detected index " + std::to_string(j) + " out of range");
        if (seen[j]) continue;
        seen[j] = 1;
        ++n_detected;
        hits += in_truth[j];
    }
    std::size_t n_truth = 0;
    for (char c : in_truth) n_truth += c;

    DetectionMetrics out;
    if (n_truth == 0)
        out.power = n_detected == 0 ? 1.0 : 0.0;
    else
        out.power = static_cast<double>(hits) / static_cast<double>(n_truth);
    out.fdr = static_cast<double>(n_detected - hits) / static_cast<double>(std::max<std::size_t>(1, n_detected));
    return out;
}

double prediction_error(const Prediction& scores, const SymMatrix& truth_p) {
    if (scores.pairs.size() != scores.scores.size())
        throw ShapeError("prediction_error: pairs and scores differ in length");
    if (scores.pairs.empty()) return 0.0;
    long double acc = 0.0L;
    for (std::size_t q = 0; q < scores.pairs.size(); ++q) {
        const NodePair& p = scores.pairs[q];
        if (p.i < 0 || p.j < 0 || p.i >= truth_p.n() || p.j >= truth_p.n())
            throw InputError("prediction_error: pair out of range");
        const long double d = scores.scores[q] - truth_p(p.i, p.j);
        acc += d * d;
    }
    return static_cast<double>(acc / static_cast<long double>(scores.pairs.size()));
}

void ExperimentSpec::validate() const {
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (!(p_observe >= 0.0 && p_observe <= 1.0)) throw ConfigError("p_observe must be a probability");
    if (scenario == Scenario::hub && outlier.kind != OutlierKind::hub)
        throw ConfigError("hub scenario needs hub outliers");
    if (scenario == Scenario::mixed && outlier.kind != OutlierKind::mixed)
        throw ConfigError("mixed scenario needs mixed-membership outliers");
    if (lambda1 && !(*lambda1 > 0.0)) throw ConfigError("lambda1 must be positive");
    if (lambda2 && !(*lambda2 >= 0.0)) throw ConfigError("lambda2 must be nonnegative");
    if (constants && !(constants->c1 > 0.0 && constants->c2 >= 0.0))
        throw ConfigError("penalty constants must be positive");
    sbm.validate();
    outlier.validate();
}

double ExperimentSpec::pi() const {
    return outlier.kind == OutlierKind::hub ? outlier.pi_hub : outlier.pi_mix;
}

RepRow run_replication(const ExperimentSpec& spec, int replication) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    RepRow row;
    row.replication = replication;
    row.seed = split_seed(spec.base_seed, static_cast<std::uint64_t>(replication));
    row.pred_mse_model = nan;
    row.pred_mse_baseline = nan;
    try {
        SbmConfig sbm = spec.sbm;
        sbm.seed = split_seed(row.seed, 0);
        const GroundTruth truth = build_ground_truth(sbm, spec.outlier);
        const SymMatrix a = sample_adjacency(truth, split_seed(row.seed, 1));
        const SymMatrix mask = spec.p_observe < 1.0 ? sample_mask(truth.n(), spec.p_observe, split_seed(row.seed, 2))
                                                    : full_mask(truth.n());

        const PenaltyConstants c = spec.constants.value_or(default_constants(spec.scenario));
        const Lambdas lambdas = default_lambdas(a, mask, c.c1, c.c2);
        SolverConfig cfg = spec.solver;
        cfg.lambda1 = spec.lambda1.value_or(lambdas.lambda1);
        cfg.lambda2 = spec.lambda2.value_or(lambdas.lambda2);
        row.lambda1 = cfg.lambda1;
        row.lambda2 = cfg.lambda2;

        const FitResult f = fit(a, mask, cfg);
        row.iterations = f.iterations;
        row.converged = f.converged;
        row.objective = f.objective_trace.back();

        const OutlierReport report = detect_outliers(f, default_zero_tol(f.n()));
        row.detected = static_cast<int>(report.detected.size());
        const DetectionMetrics m = detection_metrics(report.detected, truth.outliers, f.n());
        row.power = m.power;
        row.fdr = m.fdr;

        const std::vector<NodePair> pairs = unobserved_pairs(mask);
        if (!pairs.empty()) {
            row.pred_mse_model = prediction_error(predict_links(f, pairs), truth.P);
            row.pred_mse_baseline = prediction_error(baseline_average_degree(a, mask, pairs), truth.P);
        }
        if (spec.sbm.k_communities == 2) {
            const CommunityAssignment ca = spectral_communities(f, report.detected);
            row.misclassified = misclassified(ca.labels, truth.communities);
        }
        row.ok = true;
    } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

int resolve_workers(int requested) {
    int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GSBM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) workers = requested > 0 ? std::min(workers, cap) : cap;
    }
    return std::max(1, workers);
}

MetricsReport run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    MetricsReport out;
    out.spec = spec;
    out.per_rep.resize(spec.replications);

    const int workers = std::min(resolve_workers(spec.workers), spec.replications);
    if (workers <= 1) {
        for (int r = 0; r < spec.replications; ++r) out.per_rep[r] = run_replication(spec, r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int r = next++; r < spec.replications; r = next++) out.per_rep[r] = run_replication(spec, r);
            });
        }
        for (auto& t : pool) t.join();
    }

    // Ordered reduction over replication index.
    long double power = 0, fdr = 0, mse_model = 0, mse_base = 0;
    int ok = 0, with_pred = 0;
    for (const RepRow& row : out.per_rep) {
        if (!row.ok) {
            ++out.failures;
            continue;
        }
        ++ok;
        power += row.power;
        fdr += row.fdr;
        if (!std::isnan(row.pred_mse_model)) {
            ++with_pred;
            mse_model += row.pred_mse_model;
            mse_base += row.pred_mse_baseline;
        }
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    out.power = ok ? static_cast<double>(power / ok) : nan;
    out.fdr = ok ? static_cast<double>(fdr / ok) : nan;
    out.pred_mse_model = with_pred ? static_cast<double>(mse_model / with_pred) : nan;
    out.pred_mse_baseline = with_pred ? static_cast<double>(mse_base / with_pred) : nan;
    return out;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

void write_summary_csv(std::ostream& out, std::span<const MetricsReport> reports) {
    out << "scenario,n_inliers,k,p_in,p_out,outlier_kind,s,pi,p_observe,replications,failures,"
           "power,fdr,pred_mse_model,pred_mse_baseline\n";
    for (const MetricsReport& r : reports) {
        const ExperimentSpec& s = r.spec;
        out << to_string(s.scenario) << ',' << s.sbm.n_inliers << ',' << s.sbm.k_communities << ','
            << format_double(s.sbm.p_in) << ',' << format_double(s.sbm.p_out) << ','
            << to_string(s.outlier.kind) << ',' << s.outlier.s << ',' << format_double(s.pi()) << ','
            << format_double(s.p_observe) << ',' << s.replications << ',' << r.failures << ','
            << format_double(r.power) << ',' << format_double(r.fdr) << ','
            << format_double(r.pred_mse_model) << ',' << format_double(r.pred_mse_baseline) << '\n';
    }
}

void write_reps_csv(std::ostream& out, std::span<const MetricsReport> reports) {
    out << "scenario,s,pi,p_observe,replication,seed,status,lambda1,lambda2,iterations,converged,"
           "objective,detected,power,fdr,pred_mse_model,pred_mse_baseline,misclassified,error\n";
    for (const MetricsReport& r : reports) {
        const ExperimentSpec& s = r.spec;
        for (const RepRow& row : r.per_rep) {
            out << to_string(s.scenario) << ',' << s.outlier.s << ',' << format_double(s.pi()) << ','
                << format_double(s.p_observe) << ',' << row.replication << ',' << row.seed << ','
                << (row.ok ? "ok" : "failed") << ',' << format_double(row.lambda1) << ','
                << format_double(row.lambda2) << ',' << row.iterations << ',' << (row.converged ? 1 : 0)
                << ',' << format_double(row.objective) << ',' << row.detected << ','
                << format_double(row.power) << ',' << format_double(row.fdr) << ','
                << format_double(row.pred_mse_model) << ',' << format_double(row.pred_mse_baseline)
                << ',' << row.misclassified << ',' << csv_field(row.error) << '\n';
        }
    }
}

}  // namespace gsbm
