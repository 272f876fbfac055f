"""Derivatives of stress formula two and related diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NonDifferentiablePoint
from .model import (
    WeightMatrix,
    compute_B,
    compute_M,
    compute_V,
    count_skipped_pairs,
    majorizer_matrix,
    sigma2,
    stress_report,
)
from .solver import stress2_update


@dataclass(frozen=True)
class GradientReport:
    gradient: np.ndarray
    norm: float
    fd_rel_error: Optional[float] = None


def _check_differentiable(weights, x):
    if count_skipped_pairs(weights, x):
        raise NonDifferentiablePoint("a weighted pair of points coincides")


def fd_gradient(delta, weights, x, h: float) -> np.ndarray:
    """Central finite-difference gradient of stress two."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for idx in np.ndindex(*x.shape):
        xp = x.copy()
        xm = x.copy()
        xp[idx] += h
        xm[idx] -= h
        g[idx] = (sigma2(delta, weights, xp) - sigma2(delta, weights, xm)) / (2 * h)
    return g


def gradient_sigma2(delta, weights, x, verify: bool = False, h: Optional[float] = None) -> GradientReport:
    """Analytic gradient ``(2 / eta2^2) [(1 - s) V + s M(X) - B(X)] X``.

    With ``verify=True`` the relative error against central differences is
    filled in; ``h`` defaults to ``1e-5 * (1 + max|x|)``.
    """
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    _check_differentiable(weights, x)
    rep = stress_report(delta, weights, x)
    s = rep.sigma2
    u = majorizer_matrix(s, compute_V(weights), compute_M(weights, x))
    grad = (2.0 / rep.eta2_sq) * ((u - compute_B(delta, weights, x)) @ x)
    norm = float(np.linalg.norm(grad))
    err = None
    if verify:
        if h is None:
            h = 1e-5 * (1.0 + np.abs(x).max())
        g_fd = fd_gradient(delta, weights, x, h)
        err = float(np.linalg.norm(g_fd - grad) / (norm if norm > 0 else 1.0))
    return GradientReport(grad, norm, err)


def stationarity_residual(delta, weights, x) -> float:
    """Relative distance between ``J X`` and one majorization step from ``X``."""
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    _check_differentiable(weights, x)
    xc = x - x.mean(axis=0)
    step = stress2_update(delta, weights, x)
    return float(np.linalg.norm(xc - step) / np.linalg.norm(xc))


@dataclass(frozen=True)
class RatioDiagnostics:
    ratio: float
    bound: float
    satisfied: Optional[bool]


def ratio_diagnostics(delta, weights, x) -> RatioDiagnostics:
    """Compare ``eta2^2 / eta1^2`` (equal to ``sigma1 / sigma2``) with ``(n - 2) / (3n)``.

    The bound is only known to hold for one-dimensional configurations with
    equal weights; elsewhere ``satisfied`` is ``None``.
    """
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    rep = stress_report(delta, weights, x)
    n = x.shape[0]
    ratio = rep.eta2_sq / rep.eta1_sq
    bound = (n - 2) / (3 * n)
    w = weights if isinstance(weights, WeightMatrix) else WeightMatrix(weights)
    satisfied = None
    if x.shape[1] == 1 and w.is_uniform:
        satisfied = bool(ratio >= bound - 1e-12)
    return RatioDiagnostics(ratio, bound, satisfied)
