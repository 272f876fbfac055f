"""Majorization solvers for stress formula two and for raw stress.

Both loops start from the classical (Torgerson) solution rescaled by the
least-squares factor, and stop when the loss decreases by less than ``eps``
in one iteration or when ``itmax`` iterations have been done.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    DegenerateConfiguration,
    DirectionViolatesCondition,
    IndefiniteMajorizer,
    InitialStressAboveOne,
    InsufficientPositiveEigenvalues,
    InvalidConfiguration,
    ObserverAborted,
    SingularSystem,
)
from .linalg import centered_solve, double_center, sym_eigen
from .model import (
    DissimilarityMatrix,
    StressReport,
    WeightMatrix,
    _laplacian,
    as_configuration,
    b_kernel,
    coincident_groups,
    compute_B,
    compute_distances,
    compute_M,
    compute_V,
    count_skipped_pairs,
    laplacian_apply,
    m_kernel,
    majorizer_matrix,
    stress_report,
    uniform_weights,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    """Options shared by :func:`run_stress2` and :func:`run_raw_smacof`.

    ``init`` is ``"torgerson"``, ``"random"`` (normal coordinates drawn with
    ``seed``) or an ``n x ndim`` array.  Every start is rescaled with
    :func:`initial_scale` before iterating.
    """

    ndim: int = 2
    itmax: int = 1000
    eps: float = 1e-10
    verbose: bool = False
    allow_indefinite: bool = False
    init: Union[str, np.ndarray] = "torgerson"
    seed: int = 0
    trust: float = 1.0

    def __post_init__(self):
        if self.itmax < 1:
            raise ValueError("itmax must be at least 1")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.ndim < 1:
            raise ValueError("ndim must be at least 1")
        if isinstance(self.init, str) and self.init not in ("torgerson", "random"):
            raise ValueError(f"unknown init {self.init!r}")


@dataclass(frozen=True)
class IterationRecord:
    itel: int
    sold: float
    snew: float


@dataclass
class SolverResult:
    loss: str
    x: np.ndarray
    s: float
    d: np.ndarray
    records: list
    itel: int
    converged: bool
    skipped_pairs: int
    b: np.ndarray
    m: np.ndarray
    u: np.ndarray
    a: float
    stress: StressReport
    options: SolverOptions
    emergency_steps: int = 0
    weights: Optional[WeightMatrix] = field(default=None, repr=False)


def torgerson_init(delta, p: int) -> np.ndarray:
    """Classical scaling: top ``p`` eigenvectors of the double-centered squared dissimilarities."""
    eig = sym_eigen(double_center(delta))
    vals = eig.values
    tiny = 1e-12 * max(np.abs(vals).max(initial=0.0), 1e-300)
    npos = int(np.sum(vals > tiny))
    if p > npos:
        raise InsufficientPositiveEigenvalues(
            f"requested {p} dimensions but only {npos} positive eigenvalues"
        )
    return eig.vectors[:, :p] * np.sqrt(vals[:p])


def initial_scale(delta, weights, x) -> np.ndarray:
    """Multiply ``x`` by the factor minimizing raw stress along the ray ``c * x``."""
    w = np.asarray(weights)
    d = compute_distances(x)
    den = np.sum(w * d * d)
    if den <= 0:
        raise DegenerateConfiguration("all distances are zero")
    return (np.sum(w * np.asarray(delta) * d) / den) * np.asarray(x, dtype=float)


def _majorizer_parts(delta, weights, x, sigma):
    v = compute_V(weights)
    m = compute_M(weights, x)
    b = compute_B(delta, weights, x)
    return majorizer_matrix(sigma, v, m), b


def _update_kernels(delta, weights, x, sigma, d):
    # pair coefficients of U and of B, so products can be formed pairwise
    t_u = (1.0 - sigma) * np.asarray(weights) + sigma * m_kernel(weights, x, d)
    return t_u, b_kernel(delta, weights, x, d)


def stress2_update(delta, weights, x, sigma2=None, d_bar=None) -> np.ndarray:
    """One majorization step ``X+ = U^+ B(X) X`` with ``U = (1 - s) V + s M(X)``.

    ``sigma2`` may be passed in to avoid recomputing stress at ``x``.  ``d_bar``
    is accepted for symmetry with the stored iteration state; ``M(X)``
    recomputes it from the distances.
    """
    x = np.asarray(x, dtype=float)
    if sigma2 is None:
        sigma2 = stress_report(delta, weights, x).sigma2
    d = compute_distances(x)
    t_u, t_b = _update_kernels(delta, weights, x, sigma2, d)
    try:
        return _solve_majorizer(t_u, laplacian_apply(t_b, x), coincident_groups(weights, x, d))
    except SingularSystem as exc:
        if sigma2 > 1:
            raise IndefiniteMajorizer(
                f"majorizer is not positive semidefinite at stress {sigma2:.6g} > 1"
            ) from exc
        raise


def _solve_majorizer(t_u, r, groups):
    # Nearly coincident points make U badly conditioned; the refinement step
    # with a pairwise residual keeps the step accurate enough to descend.
    if groups is None:
        return centered_solve(_laplacian(t_u), r, residual=lambda z: r - laplacian_apply(t_u, z))
    # Coincident points stay merged: the M-majorization only holds on the
    # subspace where pairs with zero distance keep zero distance.
    g = np.zeros((len(groups), groups.max() + 1))
    g[np.arange(len(groups)), groups] = 1.0
    t_g = g.T @ t_u @ g
    np.fill_diagonal(t_g, 0.0)
    r_g = g.T @ r
    z = centered_solve(_laplacian(t_g), r_g, residual=lambda z: r_g - laplacian_apply(t_g, z))
    xn = g @ z
    return xn - xn.mean(axis=0)


def _quadratic_in_alpha(u, r, x, y):
    # xi(X + a Y, X) - xi(X, X) = qa a^2 + la a
    uy = u @ y
    return float(np.sum(y * uy)), 2.0 * float(np.sum(x * uy) - np.sum(y * r))


def default_emergency_direction(delta, weights, x) -> np.ndarray:
    """Centered Guttman-style direction ``B(X) X - X``, or a top eigenvector of ``U``
    when that direction has a negative quadratic form."""
    x = np.asarray(x, dtype=float)
    sigma = stress_report(delta, weights, x).sigma2
    u = _majorizer_parts(delta, weights, x, sigma)[0]
    r = laplacian_apply(b_kernel(delta, weights, x), x)
    y = r - (x - x.mean(axis=0))
    if np.sum(y * (u @ y)) >= 0:
        return y
    eig = sym_eigen(u)
    q = eig.vectors[:, [0]]
    c = q.T @ (r - u @ x)
    if not np.any(c):
        c = np.zeros((1, x.shape[1]))
        c[0, 0] = 1.0
    return q @ c


def emergency_step(delta, weights, x, y=None, trust: float = 1.0) -> np.ndarray:
    """Move from ``x`` along ``y`` to the minimizer of ``xi(x + alpha y, x)``.

    The direction must satisfy ``tr Y'UY >= 0``.  If the quadratic form is
    zero the majorizer is linear in ``alpha`` and the step is capped at
    ``|alpha| <= trust``.
    """
    x = np.asarray(x, dtype=float)
    if y is None:
        y = default_emergency_direction(delta, weights, x)
    y = np.asarray(y, dtype=float).reshape(x.shape)
    sigma = stress_report(delta, weights, x).sigma2
    u = _majorizer_parts(delta, weights, x, sigma)[0]
    qa, la = _quadratic_in_alpha(u, laplacian_apply(b_kernel(delta, weights, x), x), x, y)
    scale = np.sum(y * y) * max(np.abs(u).max(), 1.0)
    if qa < -1e-14 * scale:
        raise DirectionViolatesCondition(f"tr Y'UY = {qa:.3g} is negative")
    if qa > 1e-14 * scale:
        alpha = -la / (2.0 * qa)
    elif la != 0:
        alpha = -np.sign(la) * trust
    else:
        alpha = 0.0
    return x + alpha * y


def _initial_configuration(delta, weights, opts: SolverOptions) -> np.ndarray:
    n = np.asarray(delta).shape[0]
    if isinstance(opts.init, str):
        if opts.init == "torgerson":
            x = torgerson_init(delta, opts.ndim)
        else:
            x = np.random.default_rng(opts.seed).standard_normal((n, opts.ndim))
    else:
        x = as_configuration(opts.init, n)
        if x.shape[1] != opts.ndim:
            raise InvalidConfiguration(f"initial configuration has {x.shape[1]} columns, ndim={opts.ndim}")
    return initial_scale(delta, weights, x)


def _prepare(delta, weights, options, overrides):
    if not isinstance(delta, DissimilarityMatrix):
        delta = DissimilarityMatrix(delta)
    if weights is None:
        weights = uniform_weights(delta.n)
    elif not isinstance(weights, WeightMatrix):
        weights = WeightMatrix(weights)
    if weights.n != delta.n:
        raise InvalidConfiguration("weights and dissimilarities differ in order")
    options = options or SolverOptions()
    if overrides:
        options = SolverOptions(**{**options.__dict__, **overrides})
    return delta, weights, options


def _notify(observer, record, verbose):
    if verbose:
        from .io import format_iteration_line

        print(format_iteration_line(record))
    if observer is not None:
        try:
            observer(record)
        except Exception as exc:
            raise ObserverAborted(f"observer failed at iteration {record.itel}") from exc


def run_stress2(
    delta,
    weights=None,
    options: Optional[SolverOptions] = None,
    *,
    observer: Optional[Callable[[IterationRecord], None]] = None,
    **overrides,
) -> SolverResult:
    """Minimize stress formula two by majorization.

    Parameters
    ----------
    delta : DissimilarityMatrix or array_like
    weights : WeightMatrix, array_like or None
        ``None`` gives equal weights.  Arrays must already be normalized.
    options : SolverOptions, optional
        Keyword ``overrides`` replace individual fields.
    observer : callable, optional
        Called with each :class:`IterationRecord`.  If it raises, the run
        stops with :class:`ObserverAborted`.

    Raises
    ------
    InitialStressAboveOne
        Stress at the start exceeds one and ``allow_indefinite`` is off.
    """
    delta, weights, opts = _prepare(delta, weights, options, overrides)
    x = _initial_configuration(delta, weights, opts)
    sold = stress_report(delta, weights, x).sigma2
    if sold > 1 and not opts.allow_indefinite:
        raise InitialStressAboveOne(f"initial stress two is {sold:.6g} > 1")
    records = []
    emergencies = 0
    itel = 1
    while True:
        try:
            xnew = stress2_update(delta, weights, x, sold)
        except IndefiniteMajorizer:
            if not opts.allow_indefinite:
                raise
            xnew = emergency_step(delta, weights, x, trust=opts.trust)
            emergencies += 1
        snew = stress_report(delta, weights, xnew).sigma2
        rec = IterationRecord(itel, sold, snew)
        records.append(rec)
        _notify(observer, rec, opts.verbose)
        if itel == opts.itmax or (sold - snew) < opts.eps:
            break
        sold, x = snew, xnew
        itel += 1
    rep = stress_report(delta, weights, xnew)
    u, b = _majorizer_parts(delta, weights, xnew, rep.sigma2)
    return SolverResult(
        loss="stress2",
        x=xnew,
        s=rep.sigma2,
        d=compute_distances(xnew),
        records=records,
        itel=itel,
        converged=(sold - snew) < opts.eps,
        skipped_pairs=count_skipped_pairs(weights, xnew),
        b=b,
        m=compute_M(weights, xnew),
        u=u,
        a=rep.d_bar,
        stress=rep,
        options=opts,
        emergency_steps=emergencies,
        weights=weights,
    )


def raw_loss(report: StressReport, weights: WeightMatrix) -> float:
    """Raw stress ``1/2 sum_{i>j} w_ij (delta_ij - d_ij)^2`` on the original weight scale."""
    return 0.5 * weights.scale * report.sigma_raw


def run_raw_smacof(
    delta,
    weights=None,
    options: Optional[SolverOptions] = None,
    *,
    observer: Optional[Callable[[IterationRecord], None]] = None,
    **overrides,
) -> SolverResult:
    """Minimize raw stress with Guttman transforms ``X+ = V^+ B(X) X``.

    The tracked loss is :func:`raw_loss`; the final :class:`StressReport`
    carries the normalized measures as well.
    """
    delta, weights, opts = _prepare(delta, weights, options, overrides)
    v = compute_V(weights)
    x = _initial_configuration(delta, weights, opts)
    sold = raw_loss(stress_report(delta, weights, x), weights)
    records = []
    itel = 1
    while True:
        xnew = centered_solve(v, laplacian_apply(b_kernel(delta, weights, x), x))
        snew = raw_loss(stress_report(delta, weights, xnew), weights)
        rec = IterationRecord(itel, sold, snew)
        records.append(rec)
        _notify(observer, rec, opts.verbose)
        if itel == opts.itmax or (sold - snew) < opts.eps:
            break
        sold, x = snew, xnew
        itel += 1
    rep = stress_report(delta, weights, xnew)
    return SolverResult(
        loss="raw",
        x=xnew,
        s=raw_loss(rep, weights),
        d=compute_distances(xnew),
        records=records,
        itel=itel,
        converged=(sold - snew) < opts.eps,
        skipped_pairs=count_skipped_pairs(weights, xnew),
        b=compute_B(delta, weights, xnew),
        m=compute_M(weights, xnew),
        u=v,
        a=rep.d_bar,
        stress=rep,
        options=opts,
        weights=weights,
    )
