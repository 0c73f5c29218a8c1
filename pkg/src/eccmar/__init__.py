"""Cointegrated matrix autoregressions.

Simulation, alternating maximum-likelihood estimation via pooled
reduced-rank regressions, cointegration-rank identification, and
likelihood-ratio inference for matrix-valued time series whose vectorized
form is an I(1) cointegrated system.
"""

from ._kernels import KERNEL_BACKEND
from .dgp import EccMarParams, MatrixSeries, draw_design, simulate
from .estimator import FitOptions, FitResult, fit_alternating, implied_vecm, loglik
from .inference import (
    TestResult,
    chi2_sf,
    lr_adjustment,
    lr_known_vectors,
    lr_uniform,
    weak_exogeneity,
)
from .ranksel import RankDecision, admissible_pairs, adf_test, disambiguate, trace_test

__version__ = "0.1.0"

__all__ = [
    "EccMarParams",
    "FitOptions",
    "FitResult",
    "KERNEL_BACKEND",
    "MatrixSeries",
    "RankDecision",
    "TestResult",
    "admissible_pairs",
    "adf_test",
    "chi2_sf",
    "disambiguate",
    "draw_design",
    "fit_alternating",
    "implied_vecm",
    "loglik",
    "lr_adjustment",
    "lr_known_vectors",
    "lr_uniform",
    "simulate",
    "trace_test",
    "weak_exogeneity",
]
