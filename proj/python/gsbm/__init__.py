"""Robust stochastic block model fitting: outlier detection and link prediction."""

from ._gsbm import (
    ConfigError,
    ConvergenceError,
    FitResult,
    GsbmError,
    InputError,
    ParseError,
    ShapeError,
    SolverConfig,
    default_lambdas,
    detect_outliers,
    fit,
    generate,
    parse_edge_list,
    predict_links,
    spectral_communities,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "FitResult",
    "GsbmError",
    "InputError",
    "ParseError",
    "ShapeError",
    "SolverConfig",
    "default_lambdas",
    "detect_outliers",
    "fit",
    "fit_default",
    "generate",
    "parse_edge_list",
    "predict_links",
    "spectral_communities",
]


def fit_default(adjacency, mask=None, c1=6.5, c2=2.2, **solver):
    """Fit with lambda = c * sqrt(observed average degree).

    The default constants are the ones the benchmark uses for outlier
    detection. Extra keyword arguments set SolverConfig fields.
    """
    lam = default_lambdas(adjacency, mask, c1, c2)
    cfg = SolverConfig()
    cfg.lambda1 = lam["lambda1"]
    cfg.lambda2 = lam["lambda2"]
    for key, value in solver.items():
        if not hasattr(cfg, key):
            raise TypeError(f"unknown solver option {key!r}")
        setattr(cfg, key, value)
    return fit(adjacency, mask, cfg)
