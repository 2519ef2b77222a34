// End-to-end acceptance checks. Each criterion prints detail lines followed
// by one status line:
//
//   [PASS] 3 hub detection tables ...
//
// Usage: gsbm_acceptance [--only N]...
// Exit 1 if any criterion fails, 77 if every selected criterion was skipped.

#include "gsbm/errors.hpp"
#include "gsbm/graph.hpp"
#include "gsbm/harness.hpp"
#include "gsbm/inference.hpp"
#include "gsbm/io.hpp"
#include "gsbm/linalg.hpp"
#include "gsbm/mcgd.hpp"
#include "gsbm/rng.hpp"
#include "gsbm/sbm.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace gsbm;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::string summary;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // part of the criterion; 0 means no limit
    std::function<Outcome()> run;
};

template <typename... Args>
void detail(const char* fmt, Args... args) {
    std::printf("    ");
    std::printf(fmt, args...);
    std::printf("\n");
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

SolverConfig solver_with(const Lambdas& l) {
    SolverConfig c;
    c.lambda1 = l.lambda1;
    c.lambda2 = l.lambda2;
    return c;
}

struct Sim {
    GroundTruth truth;
    SymMatrix a;
    SymMatrix mask;
};

Sim simulate(const SbmConfig& base, const OutlierConfig& out, double p_observe, std::uint64_t seed) {
    SbmConfig sbm = base;
    sbm.seed = split_seed(seed, 0);
    Sim s{build_ground_truth(sbm, out), SymMatrix(), SymMatrix()};
    s.a = sample_adjacency(s.truth, split_seed(seed, 1));
    s.mask = p_observe < 1.0 ? sample_mask(s.truth.n(), p_observe, split_seed(seed, 2)) : full_mask(s.truth.n());
    return s;
}

// ---------------------------------------------------------------------------
// 1. Monotone descent

Outcome descent() {
    const std::array<int, 3> sizes{10, 50, 200};
    const std::array<OutlierKind, 2> kinds{OutlierKind::hub, OutlierKind::mixed};
    constexpr double kSlack = 1e-10;
    int violations = 0;
    long checked = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 50; ++k) {
        const int n = sizes[k % 3];
        SbmConfig sbm;
        sbm.n_inliers = n - std::max(1, n / 20);
        sbm.k_communities = n == 10 ? 2 : 3;
        OutlierConfig out;
        out.kind = kinds[(k / 3) % 2];
        out.s = (k % 5 == 4) ? 0 : n - sbm.n_inliers;
        if (out.s == 0) sbm.n_inliers = n;
        out.pi_hub = 0.2 + 0.3 * (k % 3);
        out.pi_mix = 0.4 + 0.2 * (k % 3);
        const double p_observe = k % 2 == 0 ? 1.0 : 0.8;
        const Sim s = simulate(sbm, out, p_observe, split_seed(1001, k));
        const PenaltyConstants c = k % 4 < 2 ? kDetectionConstants : kPredictionConstants;
        const FitResult f = fit(s.a, s.mask, solver_with(default_lambdas(s.a, s.mask, c.c1, c.c2)));
        const auto& tr = f.objective_trace;
        for (std::size_t t = 1; t < tr.size(); ++t) {
            const double up = tr[t] - tr[t - 1];
            worst = std::max(worst, up);
            violations += up > kSlack;
            ++checked;
        }
    }
    detail("%ld iterations over 50 fits, largest single-step change %.3g", checked, worst);
    return {violations == 0 ? Status::pass : Status::fail,
            std::to_string(violations) + " increases above 1e-10 in " + std::to_string(checked) + " steps"};
}

// ---------------------------------------------------------------------------
// 2. Oracle equivalence

SolverConfig config(double l1, double l2, double eps) {
    SolverConfig c;
    c.lambda1 = l1;
    c.lambda2 = l2;
    c.epsilon = eps;
    return c;
}

double quadratic_part(const DenseMatrix& a, const DenseMatrix& mask, const DenseMatrix& s, const DenseMatrix& l,
                      double eps) {
    const DenseMatrix r = oracle::masked_residual(a, mask, l, s);
    return 0.5 * oracle::frob2(r) + 0.5 * eps * (oracle::frob2(l) + oracle::frob2(s));
}

Outcome oracle_suite() {
    oracle::TestRng rng(2002);
    const auto size = [&] { return 6 + rng.below(3); };
    int bad_prox = 0, bad_lmo = 0, bad_step_exact = 0, bad_step_model = 0, bad_grad = 0, bad_svd = 0;
    double err_prox = 0, err_grad = 0, err_svd = 0;

    for (int rep = 0; rep < 100; ++rep) {
        const int n = size();
        const DenseMatrix s = rng.gaussian(n, n), g = rng.gaussian(n, n);
        const SolverConfig c = config(1, rng.uniform(0, 6), 1e-3);
        const DenseMatrix got = prox_s_update(s, g, c);
        const DenseMatrix want = oracle::prox_columns_by_search(s - c.step() * g, c.step(), c.lambda2);
        const double e = (got - want).cwiseAbs().maxCoeff();
        err_prox = std::max(err_prox, e);
        bad_prox += e > 1e-6;
    }

    for (int rep = 0; rep < 100; ++rep) {
        const int n = size();
        const DenseMatrix g = rng.gaussian(n, n);
        const double r_bar = rng.uniform(0.5, 4);
        const SolverConfig c = config(rng.uniform(0.1, 3), 1, 1e-3);
        const LmoResult r = lmo_direction(g, r_bar, c);
        const double best = oracle::dot(r.L_tilde, g) + c.lambda1 * r.R_tilde;
        bool ok = oracle::nuclear_norm(r.L_tilde) <= r.R_tilde + 1e-9 && r.R_tilde <= r_bar;
        for (int k = 0; k < 200; ++k) {
            const auto [z, rad] = oracle::random_feasible(rng, n, r_bar);
            ok = ok && best <= oracle::dot(z, g) + c.lambda1 * rad + 1e-9;
        }
        bad_lmo += !ok;
    }

    for (int rep = 0; rep < 100; ++rep) {
        // Every off-diagonal dyad observed and a zero-diagonal direction:
        // Phi is exactly the quadratic the step rule minimizes.
        const int n = size();
        const SymMatrix a(rng.binary(n, 0.5)), mask(rng.binary(n, 1.0));
        DenseMatrix l = 0.3 * rng.symmetric(n), lt = rng.symmetric(n);
        l.diagonal().setZero();
        lt.diagonal().setZero();
        const DenseMatrix s = 0.2 * rng.gaussian(n, n);
        const double r0 = rng.uniform(0, 3), rt = rng.uniform(0, 3);
        const SolverConfig c = config(rng.uniform(0.1, 2), 1, 0.01);
        const double beta = step_size(l, r0, lt, rt, grad_l(a, mask, s, l, c), c);
        const auto phi_at = [&](double b) {
            return objective_phi(a, mask, s, l + b * (lt - l), r0 + b * (rt - r0), c);
        };
        bool ok = beta >= 0.0 && beta <= 1.0;
        for (int k = 0; k < 50; ++k) ok = ok && phi_at(beta) <= phi_at(k / 49.0) + 1e-9;
        bad_step_exact += !ok;
    }

    for (int rep = 0; rep < 100; ++rep) {
        // Partial mask: the step minimizes the quadratic upper model, which
        // majorizes Phi, and never increases Phi.
        const int n = size();
        const SymMatrix a(rng.binary(n, 0.4)), mask(rng.binary(n, 0.8));
        const DenseMatrix l = 0.3 * rng.symmetric(n), lt = rng.symmetric(n), s = 0.2 * rng.gaussian(n, n);
        const double r0 = rng.uniform(0, 3), rt = rng.uniform(0, 3);
        const SolverConfig c = config(rng.uniform(0.1, 2), 1, 0.01);
        const DenseMatrix gl = grad_l(a, mask, s, l, c);
        const double beta = step_size(l, r0, lt, rt, gl, c);
        const double phi0 = objective_phi(a, mask, s, l, r0, c);
        const double slope = oracle::dot(lt - l, gl) + c.lambda1 * (rt - r0);
        const double curv = (1 + c.epsilon) * oracle::frob2(lt - l);
        const auto model = [&](double b) { return phi0 + b * slope + 0.5 * b * b * curv; };
        const auto phi_at = [&](double b) {
            return objective_phi(a, mask, s, l + b * (lt - l), r0 + b * (rt - r0), c);
        };
        bool ok = beta >= 0.0 && beta <= 1.0 && phi_at(beta) <= phi0 + 1e-10;
        for (int k = 0; k < 50; ++k) {
            const double b = k / 49.0;
            ok = ok && model(beta) <= model(b) + 1e-9 && phi_at(b) <= model(b) + 1e-9;
        }
        bad_step_model += !ok;
    }

    for (int rep = 0; rep < 100; ++rep) {
        const int n = size();
        const DenseMatrix a = rng.binary(n, 0.4), mask = rng.binary(n, 0.8);
        const SymMatrix sa(a), sm(mask);
        const DenseMatrix s = rng.gaussian(n, n), l = rng.symmetric(n);
        const double eps = 0.05;
        const SolverConfig c = config(1, 1, eps);
        const DenseMatrix gs = grad_s(sa, sm, s, l, c), gl = grad_l(sa, sm, s, l, c);
        const double h = 1e-5;
        double e = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                DenseMatrix sp = s, sn = s, lp = l, ln = l;
                sp(i, j) += h;
                sn(i, j) -= h;
                lp(i, j) += h;
                ln(i, j) -= h;
                const double ds = (quadratic_part(a, mask, sp, l, eps) - quadratic_part(a, mask, sn, l, eps)) / (2 * h);
                const double dl = (quadratic_part(a, mask, s, lp, eps) - quadratic_part(a, mask, s, ln, eps)) / (2 * h);
                e = std::max({e, std::abs(ds - gs(i, j)), std::abs(dl - gl(i, j))});
            }
        }
        err_grad = std::max(err_grad, e);
        bad_grad += e > 1e-6;
    }

    for (int rep = 0; rep < 100; ++rep) {
        const int n = size();
        const DenseMatrix m = rng.gaussian(n, n);
        const SingularTriplet t = top_singular_pair(m);
        const oracle::Svd ref = oracle::jacobi_svd(m);
        const DenseMatrix got = t.u * t.v.transpose();
        const DenseMatrix want = ref.u.col(0) * ref.v.col(0).transpose();
        const double e = std::max(std::abs(t.sigma - ref.sigma[0]) / std::max(1.0, ref.sigma[0]),
                                  (got - want).cwiseAbs().maxCoeff());
        err_svd = std::max(err_svd, e);
        bad_svd += e > 1e-8;
    }

    detail("prox: %d/100 off (max err %.2g, tol 1e-6)", bad_prox, err_prox);
    detail("lmo: %d/100 beaten by a random feasible point", bad_lmo);
    detail("step, full mask: %d/100 above the 50-point line search", bad_step_exact);
    detail("step, partial mask: %d/100 off the upper-model minimum or increasing Phi", bad_step_model);
    detail("gradients: %d/100 off (max err %.2g, tol 1e-6)", bad_grad, err_grad);
    detail("top singular pair: %d/100 off (max err %.2g, tol 1e-8)", bad_svd, err_svd);
    const int bad = bad_prox + bad_lmo + bad_step_exact + bad_step_model + bad_grad + bad_svd;
    return {bad == 0 ? Status::pass : Status::fail, std::to_string(bad) + " oracle disagreements in 600 instances"};
}

// ---------------------------------------------------------------------------
// 3 and 4. Detection tables

constexpr std::array<int, 3> kSizes{2, 5, 10};

ExperimentSpec detection_spec(Scenario sc, int s, double pi, std::uint64_t seed) {
    ExperimentSpec spec;
    spec.scenario = sc;
    spec.outlier.kind = sc == Scenario::mixed ? OutlierKind::mixed : OutlierKind::hub;
    spec.outlier.s = s;
    spec.outlier.pi_hub = pi;
    spec.outlier.pi_mix = pi;
    spec.replications = 20;
    spec.base_seed = seed;
    return spec;
}

Outcome hub_tables() {
    constexpr std::array<double, 3> pis{0.2, 0.5, 0.8};
    // Reference values by [s][pi] over 100 replications at the same settings.
    constexpr double power_ref[3][3] = {{0.97, 0.98, 0.97}, {0.96, 0.99, 0.98}, {0.91, 0.91, 0.91}};
    constexpr double fdr_ref[3][3] = {{0.03, 0.02, 0.03}, {0.03, 0.01, 0.10}, {0.09, 0.09, 0.14}};
    constexpr double kTol = 0.15;
    int off = 0;
    for (int si = 0; si < 3; ++si) {
        for (int pj = 0; pj < 3; ++pj) {
            const MetricsReport r =
                run_experiment(detection_spec(Scenario::hub, kSizes[si], pis[pj], 3000 + 10 * si + pj));
            const bool ok = r.failures == 0 && std::abs(r.power - power_ref[si][pj]) <= kTol &&
                            std::abs(r.fdr - fdr_ref[si][pj]) <= kTol;
            off += !ok;
            detail("s=%-2d pi=%.1f  power %.3f (ref %.2f)  fdr %.3f (ref %.2f)  failures %d%s", kSizes[si], pis[pj],
                   r.power, power_ref[si][pj], r.fdr, fdr_ref[si][pj], r.failures, ok ? "" : "  <- off");
        }
    }
    return {off == 0 ? Status::pass : Status::fail, std::to_string(9 - off) + "/9 cells within 0.15 on power and FDR"};
}

Outcome mixed_tables() {
    constexpr std::array<double, 3> pis{0.4, 0.6, 0.8};
    MetricsReport cell[3][3];
    for (int si = 0; si < 3; ++si) {
        for (int pj = 0; pj < 3; ++pj) {
            cell[si][pj] = run_experiment(detection_spec(Scenario::mixed, kSizes[si], pis[pj], 4000 + 10 * si + pj));
            detail("s=%-2d pi=%.1f  power %.3f  fdr %.3f  failures %d", kSizes[si], pis[pj], cell[si][pj].power,
                   cell[si][pj].fdr, cell[si][pj].failures);
        }
    }
    const MetricsReport& high = cell[0][2];
    const MetricsReport& low = cell[0][0];
    const bool ok = high.failures == 0 && low.failures == 0 && high.power >= 0.8 && low.power <= 0.6 &&
                    high.fdr <= 0.25;
    return {ok ? Status::pass : Status::fail,
            fmt("s=2: power(pi=0.8) %.3f >= 0.8, power(pi=0.4) %.3f <= 0.6, fdr(pi=0.8) %.3f <= 0.25", high.power,
                low.power, high.fdr)};
}

// ---------------------------------------------------------------------------
// 5. Link prediction against the average-degree baseline

Outcome prediction() {
    struct Setting {
        OutlierKind kind;
        double pi;
    };
    constexpr std::array<Setting, 2> settings{{{OutlierKind::hub, 0.2}, {OutlierKind::mixed, 0.4}}};
    bool ok = true;
    std::ostringstream summary;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (std::size_t si = 0; si < kSizes.size(); ++si) {
            ExperimentSpec spec;
            spec.scenario = Scenario::prediction;
            spec.outlier.kind = settings[k].kind;
            spec.outlier.s = kSizes[si];
            spec.outlier.pi_hub = settings[k].pi;
            spec.outlier.pi_mix = settings[k].pi;
            spec.p_observe = 0.8;
            spec.replications = 20;
            spec.base_seed = 5000 + 10 * k + si;
            const MetricsReport r = run_experiment(spec);
            int wins = 0;
            for (const RepRow& row : r.per_rep) wins += row.ok && row.pred_mse_model < row.pred_mse_baseline;
            ok = ok && wins >= 18;
            lo = std::min(lo, r.pred_mse_model);
            hi = std::max(hi, r.pred_mse_model);
            detail("%-5s pi=%.1f s=%-2d  model mse %.5f  baseline %.5f  wins %d/20  failures %d",
                   to_string(settings[k].kind).c_str(), settings[k].pi, kSizes[si], r.pred_mse_model,
                   r.pred_mse_baseline, wins, r.failures);
        }
        const double spread = (hi - lo) / lo;
        ok = ok && spread < 0.5;
        detail("%-5s relative spread of model mse over s: %.3f (limit 0.5)", to_string(settings[k].kind).c_str(),
               spread);
        summary << (k ? ", " : "") << to_string(settings[k].kind) << " spread " << fmt("%.3f", spread);
    }
    return {ok ? Status::pass : Status::fail, ">= 18/20 wins in every cell and spread < 0.5: " + summary.str()};
}

// ---------------------------------------------------------------------------
// 6. Gap halving against a long reference run

Outcome gap_halving() {
    // A rel_tol = 1e-12 run does not terminate in any practical budget on
    // these instances (the relative decrease per step is ~1e-7 after 4000
    // steps), so the reference is capped and the checked range stops well
    // short of it.
    constexpr int kReferenceIters = 4096;
    constexpr int kLastT = kReferenceIters / 16;
    constexpr double kFactor = 0.75, kSlack = 1e-9;
    int passing = 0;
    for (int k = 0; k < 10; ++k) {
        SbmConfig sbm;
        sbm.n_inliers = 95;
        const Sim s = simulate(sbm, OutlierConfig{OutlierKind::hub, 5, 0.2, 0.6}, 0.8, split_seed(6006, k));
        SolverConfig cfg = solver_with(
            default_lambdas(s.a, s.mask, kPredictionConstants.c1, kPredictionConstants.c2));
        cfg.rel_tol = 1e-12;
        cfg.max_iters = kReferenceIters;
        const FitResult ref = fit(s.a, s.mask, cfg);
        const auto& tr = ref.objective_trace;
        const double phi_ref = tr.back();
        int bad = 0;
        std::ostringstream ratios;
        for (int t = 1; t <= kLastT && 2 * t < static_cast<int>(tr.size()); t *= 2) {
            const double g1 = tr[t] - phi_ref, g2 = tr[2 * t] - phi_ref;
            bad += g2 > kFactor * g1 + kSlack;
            ratios << ' ' << t << ':' << fmt("%.2f", g1 > 0 ? g2 / g1 : 0.0);
        }
        passing += bad == 0;
        detail("instance %d: reference %d iters (converged %s), gap(2t)/gap(t) at t =%s", k, ref.iterations,
               ref.converged ? "yes" : "no", ratios.str().c_str());
    }
    return {passing == 10 ? Status::pass : Status::fail,
            std::to_string(passing) + "/10 instances with gap(2t) <= 0.75 gap(t) + 1e-9 for t = 1.." +
                std::to_string(kLastT)};
}

// ---------------------------------------------------------------------------
// 7. Certificate audit

Outcome kkt_audit() {
    double agree = 0;
    int columns = 0, converged = 0;
    SbmConfig sbm;
    sbm.n_inliers = 27;
    for (int r = 0; r < 20; ++r) {
        const Sim s = simulate(sbm, OutlierConfig{OutlierKind::hub, 3, 0.5, 0.6}, 1.0, split_seed(7007, r));
        SolverConfig cfg = solver_with(
            default_lambdas(s.a, s.mask, kDetectionConstants.c1, kDetectionConstants.c2));
        cfg.rel_tol = 1e-10;
        cfg.max_iters = 20000;
        const FitResult f = fit(s.a, s.mask, cfg);
        converged += f.converged;
        const OutlierReport rep = detect_outliers(f, s.a, s.mask, default_zero_tol(f.n()));
        agree += rep.certificate_agreement() * static_cast<double>(f.n());
        columns += static_cast<int>(f.n());
    }
    const double rate = agree / columns;
    detail("%d/20 fits converged at rel_tol 1e-10", converged);
    return {converged == 20 && rate >= 0.95 ? Status::pass : Status::fail,
            fmt("support/certificate agreement %.4f over %.0f columns (need 0.95)", rate, columns)};
}

// ---------------------------------------------------------------------------
// 8. Political blogs case study (needs the data files)

Outcome polblogs() {
    const char* edges_env = std::getenv("GSBM_POLBLOGS_EDGES");
    const char* labels_env = std::getenv("GSBM_POLBLOGS_LABELS");
    if (!edges_env || !labels_env || !std::filesystem::exists(edges_env) || !std::filesystem::exists(labels_env))
        return {Status::skip, "set GSBM_POLBLOGS_EDGES and GSBM_POLBLOGS_LABELS to run"};

    const ObservedGraph g = largest_connected_component(parse_edge_list(read_file(edges_env)));
    const std::vector<int> labels = parse_labels(read_file(labels_env), g.node_names);
    detail("largest component: %ld nodes, %.0f edges (expected 1228 and 16714)", static_cast<long>(g.n()),
           g.observed_edges());

    const SolverConfig cfg = solver_with(default_lambdas(g.adjacency, g.mask, 10.0, 5.0));
    const FitResult f = fit(g.adjacency, g.mask, cfg);
    const OutlierReport rep = detect_outliers(f, default_zero_tol(f.n()));
    const Vector degree = g.adjacency.dense().rowwise().sum();
    double min_degree = std::numeric_limits<double>::infinity();
    for (int j : rep.detected) min_degree = std::min(min_degree, degree(j));
    const CommunityAssignment comm = spectral_communities(f, rep.detected);
    const int wrong = misclassified(comm.labels, labels);
    const int count = static_cast<int>(rep.detected.size());
    detail("%d iterations, %d outliers, smallest outlier degree %.0f, %d misclassified", f.iterations, count,
           rep.detected.empty() ? 0.0 : min_degree, wrong);
    // "About ten" outliers is pinned to 7..13.
    const bool ok = count >= 7 && count <= 13 && min_degree >= 150 && wrong <= 120;
    return {ok ? Status::pass : Status::fail,
            fmt("%.0f outliers (7..13), min degree %.0f (>= 150), %.0f misclassified (<= 120)", count,
                rep.detected.empty() ? 0.0 : min_degree, wrong)};
}

}  // namespace

constexpr int kExitAllSkipped = 77;

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks for gsbm"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "monotone descent", 120, descent},
        {2, "oracle equivalence", 60, oracle_suite},
        {3, "hub detection tables", 1800, hub_tables},
        {4, "mixed-membership gradient", 0, mixed_tables},
        {5, "link prediction beats the baseline", 0, prediction},
        {6, "sublinear gap halving", 0, gap_halving},
        {7, "certificate audit", 0, kkt_audit},
        {8, "political blogs case study", 900, polblogs},
    };
    const std::set<int> wanted(only.begin(), only.end());

    int failed = 0, ran = 0, skipped = 0;
    for (const Criterion& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        std::printf("criterion %d: %s\n", c.id, c.name);
        std::fflush(stdout);
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.status == Status::pass && c.budget_seconds > 0 && secs > c.budget_seconds) {
            o.status = Status::fail;
            o.summary += fmt(" (over the %.0f s budget)", c.budget_seconds);
        }
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::skip ? "SKIP" : "FAIL";
        std::printf("[%s] %d %s: %s (%.1f s)\n", tag, c.id, c.name, o.summary.c_str(), secs);
        std::fflush(stdout);
        failed += o.status == Status::fail;
        skipped += o.status == Status::skip;
        ++ran;
    }
    if (failed) return 1;
    return ran > 0 && skipped == ran ? kExitAllSkipped : 0;
}
