#include "gsbm/mcgd.hpp"

#include "gsbm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gsbm {

void SolverConfig::validate() const {
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
        throw ConfigError("lambda1 must be positive and finite (the radius bound Phi/lambda1 needs it)");
    if (!(lambda2 >= 0.0) || !std::isfinite(lambda2))
        throw ConfigError("lambda2 must be nonnegative and finite");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
    if (eta < 0.0) throw ConfigError("eta must be positive (or 0 for the default)");
    if (step() > (1.0 / (2.0 + epsilon)) * (1.0 + 1e-12))
        throw ConfigError("eta must satisfy eta <= 1/(2+epsilon)");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
    if (!(svd_tol > 0.0)) throw ConfigError("svd_tol must be positive");
    if (svd_max_iter < 1) throw ConfigError("svd_max_iter must be at least 1");
}

namespace {

void check_square(const DenseMatrix& m, Eigen::Index n, const char* name) {
    if (m.rows() != n || m.cols() != n)
        throw ShapeError(std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
}

double phi_from_residual(const DenseMatrix& residual, const DenseMatrix& l, const DenseMatrix& s,
                         double r, const SolverConfig& cfg) {
    return 0.5 * sum_squares(residual) + cfg.lambda1 * r + cfg.lambda2 * group_norm_21(s) +
           0.5 * cfg.epsilon * (sum_squares(l) + sum_squares(s));
}

}  // namespace

double objective_f(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                   const DenseMatrix& l, const SolverConfig& cfg) {
    const DenseMatrix residual = masked_residual(a, mask, l, s);
    return 0.5 * sum_squares(residual) + cfg.lambda1 * nuclear_norm(l) +
           cfg.lambda2 * group_norm_21(s);
}

double objective_phi(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                     const DenseMatrix& l, double r, const SolverConfig& cfg) {
    return phi_from_residual(masked_residual(a, mask, l, s), l, s, r, cfg);
}

DenseMatrix grad_s(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                   const DenseMatrix& l, const SolverConfig& cfg) {
    return -2.0 * masked_residual(a, mask, l, s) + cfg.epsilon * s;
}

DenseMatrix grad_l(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                   const DenseMatrix& l, const SolverConfig& cfg) {
    return -masked_residual(a, mask, l, s) + cfg.epsilon * l;
}

DenseMatrix column_soft_threshold(const DenseMatrix& m, double threshold) {
    DenseMatrix out(m.rows(), m.cols());
    const Vector norms = column_norms(m);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (norms(j) <= threshold)
            out.col(j).setZero();
        else
            out.col(j) = (1.0 - threshold / norms(j)) * m.col(j);
    }
    return out;
}

DenseMatrix prox_s_update(const DenseMatrix& s_prev, const DenseMatrix& g_s, const SolverConfig& cfg) {
    if (s_prev.rows() != g_s.rows() || s_prev.cols() != g_s.cols())
        throw ShapeError("prox_s_update: S and G_S differ in shape");
    const double eta = cfg.step();
    return column_soft_threshold(s_prev - eta * g_s, eta * cfg.lambda2);
}

double upper_bound_r(double phi_prev, const SolverConfig& cfg) {
    if (cfg.lambda1 == 0.0) throw ConfigError("upper_bound_r: lambda1 = 0 leaves the radius unbounded");
    return phi_prev / cfg.lambda1;
}

LmoResult lmo_direction(const DenseMatrix& g_l, double r_bar, const SolverConfig& cfg,
                        const Vector* warm_start) {
    if (r_bar < 0.0) throw InputError("lmo_direction: R_bar must be nonnegative");
    PowerIterationOptions opts;
    opts.tol = cfg.svd_tol;
    opts.max_iter = cfg.svd_max_iter;
    opts.warm_start = warm_start;

    LmoResult out;
    out.top = top_singular_pair(g_l, opts);
    if (cfg.lambda1 >= out.top.sigma) {
        out.L_tilde = DenseMatrix::Zero(g_l.rows(), g_l.cols());
        out.R_tilde = 0.0;
    } else {
        out.L_tilde = -r_bar * out.top.u * out.top.v.transpose();
        out.R_tilde = r_bar;
    }
    return out;
}

double step_size(const DenseMatrix& l_prev, double r_prev, const DenseMatrix& l_tilde,
                 double r_tilde, const DenseMatrix& g_l, const SolverConfig& cfg) {
    const DenseMatrix diff = l_prev - l_tilde;
    const double denom = (1.0 + cfg.epsilon) * sum_squares(diff);
    if (denom == 0.0) return 0.0;
    const double numer = inner(diff, g_l) + cfg.lambda1 * (r_prev - r_tilde);
    return std::clamp(numer / denom, 0.0, 1.0);
}

SolverState initial_state(const SymMatrix& a, const SymMatrix& mask, const SolverConfig& cfg) {
    const Eigen::Index n = a.n();
    if (mask.n() != n) throw ShapeError("adjacency and mask differ in size");
    SolverState st;
    st.L = DenseMatrix::Zero(n, n);
    st.S = DenseMatrix::Zero(n, n);
    st.phi = objective_phi(a, mask, st.S, st.L, 0.0, cfg);
    st.phi_after_prox = st.phi;
    return st;
}

SolverState mcgd_iterate(const SolverState& state, const SymMatrix& a, const SymMatrix& mask,
                         const SolverConfig& cfg) {
    const Eigen::Index n = a.n();
    check_square(state.L, n, "L");
    check_square(state.S, n, "S");

    SolverState next;
    next.t = state.t + 1;

    // Proximal step on S at (S^(t-1), L^(t-1)).
    const DenseMatrix residual = masked_residual(a, mask, state.L, state.S);
    const DenseMatrix g_s = -2.0 * residual + cfg.epsilon * state.S;
    next.S = prox_s_update(state.S, g_s, cfg);

    // Radius bound and L gradient at (S^(t), L^(t-1), R^(t-1)).
    const DenseMatrix residual_half = masked_residual(a, mask, state.L, next.S);
    next.phi_after_prox = phi_from_residual(residual_half, state.L, next.S, state.R, cfg);
    next.r_bar = upper_bound_r(next.phi_after_prox, cfg);
    const DenseMatrix g_l = -residual_half + cfg.epsilon * state.L;

    const Vector* warm = state.singular_warm.size() == n ? &state.singular_warm : nullptr;
    LmoResult lmo = lmo_direction(g_l, next.r_bar, cfg, warm);
    next.sigma1 = lmo.top.sigma;
    next.svd_iterations = lmo.top.iterations;
    next.singular_warm = lmo.top.v;

    // G_L is symmetric, so the symmetric part of the rank-one atom attains
    // the same linear value with no larger nuclear norm; using it keeps L
    // exactly symmetric in floating point.
    const DenseMatrix l_tilde = 0.5 * (lmo.L_tilde + lmo.L_tilde.transpose());

    next.beta = step_size(state.L, state.R, l_tilde, lmo.R_tilde, g_l, cfg);
    if (next.beta > 0.0) {
        next.L = state.L + next.beta * (l_tilde - state.L);
        next.R = state.R + next.beta * (lmo.R_tilde - state.R);
        next.phi = objective_phi(a, mask, next.S, next.L, next.R, cfg);
    } else {
        next.L = state.L;
        next.R = state.R;
        next.phi = next.phi_after_prox;
    }
    return next;
}

FitResult fit(const SymMatrix& a, const SymMatrix& mask, const SolverConfig& cfg,
              const IterationObserver& observer) {
    cfg.validate();
    SolverState state = initial_state(a, mask, cfg);

    FitResult out;
    out.config = cfg;
    out.objective_trace.push_back(state.phi);
    if (observer) observer(state);

    for (int it = 1; it <= cfg.max_iters; ++it) {
        try {
            state = mcgd_iterate(state, a, mask, cfg);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(e.what()) + " at MCGD iteration " + std::to_string(it),
                                   e.residual(), it);
        }
        if (observer) observer(state);
        out.history.push_back(IterationRecord{state.t, state.phi, state.phi_after_prox, state.r_bar,
                                              state.R, state.sigma1, state.beta});
        const double prev = out.objective_trace.back();
        out.objective_trace.push_back(state.phi);
        out.iterations = it;

        const double rel_decrease = prev > 0.0 ? (prev - state.phi) / prev : 0.0;
        if (rel_decrease < cfg.rel_tol) {
            out.converged = true;
            break;
        }
    }

    out.L_hat = SymMatrix(std::move(state.L));
    out.S_hat = std::move(state.S);
    out.R = state.R;
    return out;
}

}  // namespace gsbm
