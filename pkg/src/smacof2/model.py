"""Data types and the matrix/scalar functionals of metric stress.

All double sums run over the pairs below the diagonal (i > j).  Matrices
``V``, ``B(X)`` and ``M(X)`` are assembled from their pair terms directly:
off-diagonal entry ``-t_ij`` and diagonal entry ``sum_j t_ij``, which is what
``sum t_ij (e_i - e_j)(e_i - e_j)'`` expands to.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from .errors import (
    AllZeroWeights,
    AsymmetricInput,
    DegenerateDenominator,
    DisconnectedWeightGraph,
    InvalidConfiguration,
    InvalidDissimilarities,
    NegativeWeight,
)

#: relative floor below which a distance is treated as zero in B and M
DISTANCE_FLOOR = 1e-12


def _square(values, name: str) -> np.ndarray:
    a = np.array(values, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDissimilarities(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidDissimilarities(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class DissimilarityMatrix:
    """Symmetric, nonnegative matrix of dissimilarities with zero diagonal."""

    values: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        a = _square(self.values, "dissimilarity matrix")
        n = a.shape[0]
        if n < 3:
            raise InvalidDissimilarities(f"need at least 3 objects, got {n}")
        if not np.array_equal(a, a.T):
            raise AsymmetricInput("dissimilarity matrix is not symmetric")
        if np.any(np.diag(a) != 0):
            raise InvalidDissimilarities("dissimilarity matrix must have a zero diagonal")
        if np.any(a < 0):
            raise InvalidDissimilarities("dissimilarities must be nonnegative")
        a.setflags(write=False)
        object.__setattr__(self, "values", a)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != n:
                raise InvalidDissimilarities("number of labels does not match matrix order")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Normalized pair weights.

    ``values`` sums to one over the pairs below the diagonal.  ``scale`` is the
    lower-triangle sum of the weights before normalization; it lets raw stress
    be reported on the original weight scale.
    """

    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        a = _square(self.values, "weight matrix")
        if not np.array_equal(a, a.T):
            raise AsymmetricInput("weight matrix is not symmetric")
        if np.any(np.diag(a) != 0):
            raise InvalidDissimilarities("weight matrix must have a zero diagonal")
        if np.any(a < 0):
            raise NegativeWeight("weights must be nonnegative")
        total = np.tril(a, -1).sum()
        if abs(total - 1.0) > 1e-12:
            raise InvalidDissimilarities(
                f"weights must sum to one over pairs, got {total!r}; use normalize_weights"
            )
        ncomp, _ = connected_components(a > 0, directed=False)
        if ncomp > 1:
            raise DisconnectedWeightGraph(f"weight graph has {ncomp} components")
        a.setflags(write=False)
        object.__setattr__(self, "values", a)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def is_uniform(self) -> bool:
        off = self.values[~np.eye(self.n, dtype=bool)]
        return bool(np.all(off == off[0]))

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def normalize_weights(raw) -> WeightMatrix:
    """Scale a symmetric nonnegative weight matrix so the pair weights sum to one."""
    a = np.array(raw, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidDissimilarities(f"weight matrix must be square, got shape {a.shape}")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12:
        raise AsymmetricInput("weight matrix is not symmetric")
    if np.any(a < 0):
        raise NegativeWeight("weights must be nonnegative")
    if np.any(np.diag(a) != 0):
        raise InvalidDissimilarities("weight matrix must have a zero diagonal")
    a = (a + a.T) / 2
    total = np.tril(a, -1).sum()
    if total <= 0:
        raise AllZeroWeights("at least one weight must be positive")
    if total == 1.0:
        return WeightMatrix(a, 1.0)
    return WeightMatrix(a / total, float(total))


def uniform_weights(n: int) -> WeightMatrix:
    """Equal weights on all pairs (the unweighted case)."""
    return normalize_weights(1.0 - np.eye(n))


def as_configuration(x, n: Optional[int] = None) -> np.ndarray:
    """Validate an ``n x p`` configuration and return it as a float array."""
    x = np.array(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidConfiguration(f"configuration must be 2-D, got {x.ndim}-D")
    if n is not None and x.shape[0] != n:
        raise InvalidConfiguration(f"configuration has {x.shape[0]} rows, expected {n}")
    if not 1 <= x.shape[1] <= x.shape[0] - 1:
        raise InvalidConfiguration(f"dimensionality {x.shape[1]} outside 1..{x.shape[0] - 1}")
    if not np.all(np.isfinite(x)):
        raise InvalidConfiguration("configuration contains non-finite values")
    return x


def compute_distances(x) -> np.ndarray:
    """Euclidean distances between the rows of ``x``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return squareform(pdist(x))


def distance_floor(d: np.ndarray) -> float:
    dmax = d.max(initial=0.0)
    return DISTANCE_FLOOR * (dmax if dmax > 0 else 1.0)


def _laplacian(t: np.ndarray) -> np.ndarray:
    # sum_{i>j} t_ij A_ij for a symmetric t with zero diagonal
    out = -t
    np.fill_diagonal(out, t.sum(axis=1))
    return out


def _inverse_distances(d: np.ndarray) -> np.ndarray:
    keep = d >= distance_floor(d)
    np.fill_diagonal(keep, False)
    inv = np.zeros_like(d)
    inv[keep] = 1.0 / d[keep]
    return inv


def count_skipped_pairs(weights, x) -> int:
    """Number of positively weighted pairs whose distance falls below the floor."""
    w = np.asarray(weights)
    d = compute_distances(x)
    low = np.tril((d < distance_floor(d)) & (w > 0), -1)
    return int(low.sum())


def coincident_groups(weights, x, d: Optional[np.ndarray] = None) -> Optional[np.ndarray]:
    """Group labels of points joined by positively weighted pairs below the floor.

    Returns ``None`` when no such pair exists.  ``d`` may supply the
    distances of ``x``.
    """
    w = np.asarray(weights)
    d = compute_distances(x) if d is None else d
    close = (d < distance_floor(d)) & (w > 0)
    np.fill_diagonal(close, False)
    if not close.any():
        return None
    _, labels = connected_components(close, directed=False)
    return labels


def laplacian_apply(t, x) -> np.ndarray:
    """``L(t) X`` computed row by row as ``sum_j t_ij (x_i - x_j)``.

    Avoids the cancellation of ``diag(t 1) X - t X`` when ``t`` has very
    large entries, as ``B`` and ``M`` do for nearly coincident points.
    """
    x = np.asarray(x, dtype=float)
    return np.einsum("ij,ijk->ik", t, x[:, None, :] - x[None, :, :])


def b_kernel(delta, weights, x, d: Optional[np.ndarray] = None) -> np.ndarray:
    """Pair coefficients ``w_ij delta_ij / d_ij(X)`` of ``B(X)``; zero below the floor."""
    d = compute_distances(x) if d is None else d
    return np.asarray(weights) * np.asarray(delta) * _inverse_distances(d)


def m_kernel(weights, x, d: Optional[np.ndarray] = None) -> np.ndarray:
    """Pair coefficients ``dbar(X) w_ij / d_ij(X)`` of ``M(X)``; zero below the floor."""
    w = np.asarray(weights)
    d = compute_distances(x) if d is None else d
    d_bar = 0.5 * np.sum(w * d)
    return d_bar * w * _inverse_distances(d)


def compute_V(weights) -> np.ndarray:
    return _laplacian(np.array(weights, dtype=float))


def compute_B(delta, weights, x) -> np.ndarray:
    """``B(X) = sum w_ij delta_ij / d_ij(X) A_ij`` over pairs with nonzero distance."""
    return _laplacian(b_kernel(delta, weights, x))


def compute_M(weights, x) -> np.ndarray:
    """``M(X) = dbar(X) sum w_ij / d_ij(X) A_ij`` over pairs with nonzero distance."""
    return _laplacian(m_kernel(weights, x))


@dataclass(frozen=True)
class StressReport:
    """Scalar fit measures of a configuration.

    ``sigma1`` is the normalized stress without a square root; the classical
    square-rooted stress formula one is :attr:`sqrt_sigma1`.
    """

    sigma_raw: float
    eta1_sq: float
    eta2_sq: float
    eta_delta_sq: float
    d_bar: float
    sigma1: float
    sigma2: float

    @property
    def sqrt_sigma1(self) -> float:
        return float(np.sqrt(self.sigma1))

    @property
    def sqrt_sigma2(self) -> float:
        return float(np.sqrt(self.sigma2))


@lru_cache(maxsize=64)
def _lower(n: int):
    return np.tril_indices(n, -1)


def _pair_sums(delta, weights, d):
    low = _lower(d.shape[0])
    w = np.asarray(weights)[low]
    dl = np.asarray(delta)[low]
    dd = d[low]
    d_bar = float(np.sum(w * dd))
    return (
        float(np.sum(w * (dl - dd) ** 2)),
        float(np.sum(w * dd**2)),
        float(np.sum(w * (dd - d_bar) ** 2)),
        float(np.sum(w * dl**2)),
        d_bar,
    )


def stress_report(delta, weights, x) -> StressReport:
    d = compute_distances(x)
    sigma_raw, eta1_sq, eta2_sq, eta_delta_sq, d_bar = _pair_sums(delta, weights, d)
    # relative spread of distances below ~1e-12 counts as "all equal"
    if eta1_sq == 0 or eta2_sq <= 1e-24 * eta1_sq:
        raise DegenerateDenominator("all weighted distances are equal; stress two is undefined")
    return StressReport(
        sigma_raw=sigma_raw,
        eta1_sq=eta1_sq,
        eta2_sq=eta2_sq,
        eta_delta_sq=eta_delta_sq,
        d_bar=d_bar,
        sigma1=sigma_raw / eta1_sq,
        sigma2=sigma_raw / eta2_sq,
    )


def sigma2(delta, weights, x) -> float:
    return stress_report(delta, weights, x).sigma2


def majorizer_matrix(sigma: float, v: np.ndarray, m: np.ndarray) -> np.ndarray:
    """``U = (1 - sigma) V + sigma M``, the quadratic part of the majorizer."""
    return (1.0 - sigma) * v + sigma * m


def omega(delta, weights, x, y) -> float:
    """Dinkelbach difference ``sigma_R(X) - sigma2(Y) eta2^2(X)``."""
    s_y = sigma2(delta, weights, y)
    sigma_raw, _, eta2_sq, _, _ = _pair_sums(delta, weights, compute_distances(x))
    return sigma_raw - s_y * eta2_sq


def xi(delta, weights, x, y) -> float:
    """Quadratic majorizer of ``omega(., Y)`` that touches it at ``X = Y``."""
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    y = np.asarray(y, dtype=float).reshape(len(y), -1)
    rep = stress_report(delta, weights, y)
    s = rep.sigma2
    v = compute_V(weights)
    b = compute_B(delta, weights, y)
    m = compute_M(weights, y)
    return (
        rep.eta_delta_sq
        + (1.0 - s) * np.sum(x * (v @ x))
        - 2.0 * np.sum(x * (b @ y))
        + s * np.sum(x * (m @ x))
    )
