"""Dense symmetric linear algebra used by the solvers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg as sla

from .errors import DegenerateInput, NotSymmetric, SingularSystem


@dataclass(frozen=True)
class EigenPair:
    values: np.ndarray  # descending
    vectors: np.ndarray  # columns, orthonormal


def centering_matrix(n: int) -> np.ndarray:
    return np.eye(n) - np.full((n, n), 1.0 / n)


def double_center(delta) -> np.ndarray:
    """``-1/2 J (delta o delta) J`` for the centering projector ``J``."""
    dd = np.asarray(delta, dtype=float) ** 2
    rd = dd.mean(axis=1)
    c = -0.5 * (dd - rd[:, None] - rd[None, :] + dd.mean())
    return (c + c.T) / 2


def _rotate(a: np.ndarray, q: np.ndarray, i: int, j: int) -> None:
    aii, ajj, aij = a[i, i], a[j, j], a[i, j]
    theta = (ajj - aii) / (2.0 * aij)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    ci, cj = a[:, i].copy(), a[:, j]
    a[:, i] = c * ci - s * cj
    a[:, j] = s * ci + c * cj
    ri, rj = a[i, :].copy(), a[j, :]
    a[i, :] = c * ri - s * rj
    a[j, :] = s * ri + c * rj
    a[i, i] = aii - t * aij
    a[j, j] = ajj + t * aij
    a[i, j] = a[j, i] = 0.0
    qi, qj = q[:, i].copy(), q[:, j]
    q[:, i] = c * qi - s * qj
    q[:, j] = s * qi + c * qj


def sym_eigen(s, tol: float = 1e-12, max_sweeps: int = 100) -> EigenPair:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Rotations are applied in row-cyclic order, so the result is a
    deterministic function of the input.  Eigenvalues are returned in
    descending order; each eigenvector is signed so that its
    largest-magnitude component is positive.

    Parameters
    ----------
    s : (n, n) array_like
        Symmetric matrix (asymmetry up to ``1e-10`` relative is tolerated
        and removed by averaging).
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm drops below
        ``tol * ||s||_F``.
    """
    a = np.array(s, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    scale = np.abs(a).max(initial=0.0)
    if np.abs(a - a.T).max(initial=0.0) > 1e-10 * max(scale, 1.0):
        raise NotSymmetric("matrix is not symmetric")
    a = (a + a.T) / 2
    n = a.shape[0]
    q = np.eye(n)
    norm = np.linalg.norm(a)
    if norm > 0:
        for sweep in range(max_sweeps):
            off = np.linalg.norm(a - np.diag(np.diag(a)))
            if off < tol * norm:
                break
            for i in range(n - 1):
                for j in range(i + 1, n):
                    aij = a[i, j]
                    if aij == 0.0:
                        continue
                    # negligible against both diagonal entries: zero it outright
                    if sweep > 3 and abs(aij) < 1e-18 * min(abs(a[i, i]), abs(a[j, j])):
                        a[i, j] = a[j, i] = 0.0
                        continue
                    _rotate(a, q, i, j)
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values, q = values[order], q[:, order]
    lead = np.argmax(np.abs(q), axis=0)
    signs = np.where(q[lead, np.arange(n)] < 0, -1.0, 1.0)
    return EigenPair(values, q * signs)


def centered_solve(u, r, residual: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> np.ndarray:
    """Apply the Moore-Penrose inverse of ``u`` to ``r``.

    ``u`` must be symmetric positive semidefinite with null space spanned by
    the vector of ones.  Uses ``U+ = (U + E/n)^{-1} - E/n`` with a Cholesky
    factorization of the shifted matrix.  The returned ``Z`` satisfies
    ``U Z = J R`` and has zero column sums.

    ``residual``, when given, must return ``R - U Z`` evaluated without
    forming ``U`` (for instance from pairwise differences).  One step of
    iterative refinement then removes the error that the factorization
    leaves behind when ``U`` is badly conditioned.

    Raises
    ------
    SingularSystem
        If ``U + E/n`` is not numerically positive definite (disconnected
        weight graph or indefinite ``U``).
    """
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    n = u.shape[0]
    shifted = u + 1.0 / n
    try:
        factor = sla.cho_factor(shifted, lower=True, check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise SingularSystem(f"shifted matrix is not positive definite: {exc}") from None
    pivots = np.abs(np.diag(factor[0])) ** 2
    if pivots.min() <= n * np.finfo(float).eps * pivots.max():
        raise SingularSystem("shifted matrix is numerically singular")
    z = sla.cho_solve(factor, r, check_finite=False)
    z = z - r.mean(axis=0) if r.ndim == 2 else z - r.mean()
    if residual is not None:
        res = residual(z)
        z = z + sla.cho_solve(factor, res - res.mean(axis=0), check_finite=False)
        z = z - z.mean(axis=0)
    return z


@dataclass(frozen=True)
class ProcrustesResult:
    aligned: np.ndarray
    rotation: np.ndarray
    scale: float
    residual: float
    relative_residual: float


def procrustes_align(x, y, dilation: bool = False) -> ProcrustesResult:
    """Rotate (and reflect) centered ``x`` to best match centered ``y``.

    With ``dilation=True`` a scalar factor is fitted as well.  The residual is
    the Frobenius norm of ``aligned - y_centered``; ``relative_residual``
    divides by the norm of centered ``y``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DegenerateInput(f"shape mismatch: {x.shape} vs {y.shape}")
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    cross = xc.T @ yc
    if np.linalg.norm(cross) <= 1e-300 or np.linalg.matrix_rank(cross) == 0:
        raise DegenerateInput("cross-product matrix has rank zero")
    uu, sv, vt = np.linalg.svd(cross)
    rot = uu @ vt
    scale = float(sv.sum() / np.sum(xc**2)) if dilation else 1.0
    aligned = scale * xc @ rot
    res = float(np.linalg.norm(aligned - yc))
    ynorm = np.linalg.norm(yc)
    return ProcrustesResult(aligned, rot, scale, res, res / ynorm if ynorm > 0 else np.inf)
