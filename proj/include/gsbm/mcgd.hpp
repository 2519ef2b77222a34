#pragma once

#include "gsbm/graph.hpp"
#include "gsbm/linalg.hpp"
#include "gsbm/matrix.hpp"

#include <functional>
#include <vector>

namespace gsbm {

/// Penalties and numerical settings of the mixed coordinate gradient descent.
struct SolverConfig {
    double lambda1 = 1.0;  ///< nuclear-norm penalty on L, must be > 0
    double lambda2 = 1.0;  ///< column-wise l2,1 penalty on S, >= 0
    double epsilon = 1e-3; ///< ridge weight making the objective strongly convex
    double eta = 0.0;      ///< proximal step for S; 0 selects 1/(2 + epsilon)
    int max_iters = 500;
    double rel_tol = 1e-6; ///< stop once the relative decrease of Phi drops below
    double svd_tol = 1e-9;
    int svd_max_iter = 1000;

    double step() const { return eta > 0.0 ? eta : 1.0 / (2.0 + epsilon); }

    /// Throws ConfigError. Requires lambda1 > 0, eta <= 1/(2+epsilon).
    void validate() const;
};

/// Iterate (S, L, R) plus diagnostics of the iteration that produced it.
struct SolverState {
    DenseMatrix L;  ///< symmetric when started from a symmetric L
    DenseMatrix S;
    double R = 0.0;
    int t = 0;
    double phi = 0.0;  ///< Phi_eps(S, L, R)

    double phi_after_prox = 0.0;  ///< Phi_eps(S^(t), L^(t-1), R^(t-1))
    double r_bar = 0.0;
    double sigma1 = 0.0;
    double beta = 0.0;
    int svd_iterations = 0;
    Vector singular_warm;  ///< last right singular vector, reused as start vector
};

struct IterationRecord {
    int t = 0;
    double phi = 0.0;
    double phi_after_prox = 0.0;
    double r_bar = 0.0;
    double R = 0.0;
    double sigma1 = 0.0;
    double beta = 0.0;
};

struct FitResult {
    SymMatrix L_hat;
    DenseMatrix S_hat;
    double R = 0.0;
    /// Phi_eps after iterations 0..iterations (entry 0 is the initial value).
    std::vector<double> objective_trace;
    std::vector<IterationRecord> history;
    int iterations = 0;
    bool converged = false;
    SolverConfig config;

    Eigen::Index n() const noexcept { return L_hat.n(); }
};

/// 1/2 ||Omega .* (A - L - S - S^T)||_F^2 + lambda1 ||L||_* + lambda2 ||S||_{2,1}.
double objective_f(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                   const DenseMatrix& l, const SolverConfig& cfg);

/// Augmented objective: the nuclear norm is replaced by the radius R and the
/// ridge term (eps/2)(||L||_F^2 + ||S||_F^2) is added.
double objective_phi(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                     const DenseMatrix& l, double r, const SolverConfig& cfg);

/// -2 Omega .* (A - L - S - S^T) + eps S
DenseMatrix grad_s(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                   const DenseMatrix& l, const SolverConfig& cfg);

/// -Omega .* (A - L - S - S^T) + eps L
DenseMatrix grad_l(const SymMatrix& a, const SymMatrix& mask, const DenseMatrix& s,
                   const DenseMatrix& l, const SolverConfig& cfg);

/// Scales column j by (1 - threshold / ||M_.j||)_+; columns with norm at most
/// `threshold` become exactly zero.
DenseMatrix column_soft_threshold(const DenseMatrix& m, double threshold);

/// Proximal step Tc_{eta lambda2}(S_prev - eta G_S).
DenseMatrix prox_s_update(const DenseMatrix& s_prev, const DenseMatrix& g_s, const SolverConfig& cfg);

/// Adaptive nuclear radius bound phi_prev / lambda1. Throws ConfigError if lambda1 == 0.
double upper_bound_r(double phi_prev, const SolverConfig& cfg);

struct LmoResult {
    DenseMatrix L_tilde;
    double R_tilde = 0.0;
    SingularTriplet top;
};

/// Minimizer of <Z, G_L> + lambda1 R over ||Z||_* <= R <= R_bar:
/// (0, 0) when lambda1 >= sigma1, else (-R_bar u1 v1^T, R_bar).
LmoResult lmo_direction(const DenseMatrix& g_l, double r_bar, const SolverConfig& cfg,
                        const Vector* warm_start = nullptr);

/// Conditional-gradient step, clamped to [0, 1]:
/// (<L_prev - L~, G_L> + lambda1 (R_prev - R~)) / ((1 + eps) ||L~ - L_prev||_F^2).
/// Returns 0 for a zero-length direction.
double step_size(const DenseMatrix& l_prev, double r_prev, const DenseMatrix& l_tilde,
                 double r_tilde, const DenseMatrix& g_l, const SolverConfig& cfg);

/// State (0, 0, 0) at t = 0 with its objective value.
SolverState initial_state(const SymMatrix& a, const SymMatrix& mask, const SolverConfig& cfg);

/// One MCGD iteration: proximal S step, radius bound from the post-prox
/// objective, linear minimization oracle on the L gradient, conditional
/// gradient update of (L, R).
SolverState mcgd_iterate(const SolverState& state, const SymMatrix& a, const SymMatrix& mask,
                         const SolverConfig& cfg);

using IterationObserver = std::function<void(const SolverState&)>;

/// Runs MCGD from zero until the relative decrease of Phi falls below
/// cfg.rel_tol or cfg.max_iters iterations. A ConvergenceError from the
/// singular-pair routine is rethrown with the iteration index attached.
FitResult fit(const SymMatrix& a, const SymMatrix& mask, const SolverConfig& cfg,
              const IterationObserver& observer = {});

inline FitResult fit(const ObservedGraph& g, const SolverConfig& cfg,
                     const IterationObserver& observer = {}) {
    return fit(g.adjacency, g.mask, cfg, observer);
}

}  // namespace gsbm
