import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from smacof2 import centered_solve, compute_distances, compute_V, double_center, procrustes_align, sym_eigen
from smacof2.errors import DegenerateInput, NotSymmetric, SingularSystem
from smacof2.linalg import centering_matrix

from instances import random_weights


def test_double_center_recovers_gram_matrix():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(6, 2))
    x -= x.mean(axis=0)
    c = double_center(compute_distances(x))
    assert np.allclose(c, x @ x.T, rtol=0, atol=1e-10 * np.abs(x @ x.T).max())


def test_double_center_constant_matrix():
    c = double_center(2.0 * (np.ones((4, 4)) - np.eye(4)))
    vals = np.linalg.eigvalsh(c)[::-1]
    assert vals[:3] == pytest.approx([2.0, 2.0, 2.0], rel=1e-12)
    assert abs(vals[3]) <= 1e-12
    assert np.max(np.abs(c.sum(axis=1))) <= 1e-12


def test_double_center_zero():
    assert not np.any(double_center(np.zeros((3, 3))))


def test_sym_eigen_diagonal():
    e = sym_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.array_equal(e.values, [3.0, 2.0, 1.0])
    assert np.array_equal(np.abs(e.vectors), np.eye(3)[:, [0, 2, 1]])


def test_sym_eigen_centering_projector():
    e = sym_eigen(centering_matrix(3))
    assert e.values == pytest.approx([1, 1, 0], abs=1e-14)


@pytest.mark.parametrize("n", [2, 5, 8, 20])
def test_sym_eigen_against_lapack(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    s = a + a.T
    e = sym_eigen(s)
    norm = np.linalg.norm(s, 2)
    assert np.linalg.norm(s - e.vectors @ np.diag(e.values) @ e.vectors.T) <= 1e-9 * norm
    assert np.linalg.norm(s @ e.vectors - e.vectors * e.values) <= 1e-9 * norm
    assert np.max(np.abs(e.vectors.T @ e.vectors - np.eye(n))) <= 1e-10
    assert e.values == pytest.approx(np.linalg.eigvalsh(s)[::-1], abs=1e-10 * norm)
    lead = np.argmax(np.abs(e.vectors), axis=0)
    assert np.all(e.vectors[lead, np.arange(n)] > 0)


def test_sym_eigen_deterministic():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(7, 7))
    s = a + a.T
    e1, e2 = sym_eigen(s), sym_eigen(s.copy())
    assert e1.values.tobytes() == e2.values.tobytes()
    assert e1.vectors.tobytes() == e2.vectors.tobytes()


def test_sym_eigen_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        sym_eigen([[1.0, 2.0], [0.0, 1.0]])


def test_centered_solve_projector_is_own_pseudoinverse():
    rng = np.random.default_rng(2)
    r = rng.normal(size=(3, 2))
    j = centering_matrix(3)
    assert np.allclose(centered_solve(j, r), j @ r, atol=1e-14)


def test_centered_solve_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(3, 12))
        u = compute_V(random_weights(rng, n, equal=False))
        x = rng.normal(size=(n, 2))
        z = centered_solve(u, u @ x)
        assert np.allclose(z, centering_matrix(n) @ x, atol=1e-8 * np.abs(x).max())
        assert np.max(np.abs(z.sum(axis=0))) <= 1e-10 * np.linalg.norm(z)


def test_centered_solve_annihilates_constant_rows():
    u = compute_V(random_weights(np.random.default_rng(4), 5, equal=False))
    z = centered_solve(u, np.tile([1.5, -2.0], (5, 1)))
    assert np.max(np.abs(z)) <= 1e-14


def test_centered_solve_disconnected_raises():
    raw = np.zeros((4, 4))
    raw[0, 1] = raw[1, 0] = raw[2, 3] = raw[3, 2] = 0.5
    with pytest.raises(SingularSystem):
        centered_solve(compute_V(raw), np.ones((4, 1)))


def _rotation(theta):
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])


def test_procrustes_exact_recovery_and_identity():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(6, 2))
    r0 = _rotation(0.7) @ np.diag([1, -1])
    res = procrustes_align(x, x @ r0)
    assert res.residual <= 1e-10
    same = procrustes_align(x, x)
    assert np.allclose(same.rotation, np.eye(2), atol=1e-12)


def test_procrustes_dilation():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(5, 3))
    res = procrustes_align(x, 2.5 * x + 1.0, dilation=True)
    assert res.scale == pytest.approx(2.5, rel=1e-12)
    assert res.residual <= 1e-10


def test_procrustes_matches_brute_force_over_angles():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(5, 2))
    y = rng.normal(size=(5, 2))
    xc, yc = x - x.mean(0), y - y.mean(0)

    def loss(theta, flip):
        return np.linalg.norm(xc @ np.diag([1, flip]) @ _rotation(theta) - yc)

    best = np.inf
    for flip in (1, -1):
        grid = np.linspace(0, 2 * np.pi, 721)
        t0 = grid[np.argmin([loss(t, flip) for t in grid])]
        opt = minimize_scalar(lambda t: loss(t, flip), bounds=(t0 - 0.01, t0 + 0.01), method="bounded",
                              options={"xatol": 1e-12})
        best = min(best, opt.fun)
    assert procrustes_align(x, y).residual == pytest.approx(best, abs=1e-6)


def test_procrustes_degenerate():
    with pytest.raises(DegenerateInput):
        procrustes_align(np.ones((4, 2)), np.random.default_rng(0).normal(size=(4, 2)))


def test_centered_solve_refinement_on_stiff_system():
    from smacof2.model import _laplacian, laplacian_apply

    rng = np.random.default_rng(8)
    t = rng.uniform(0.2, 1.0, (5, 5))
    t = np.triu(t, 1) + np.triu(t, 1).T
    t[0, 1] = t[1, 0] = 1e11
    x = rng.normal(size=(5, 2))
    x[1] = x[0] + 1e-11  # the stiff pair is nearly coincident, as it is in practice
    x -= x.mean(axis=0)
    r = laplacian_apply(t, x)
    plain = centered_solve(_laplacian(t), r)
    z = centered_solve(_laplacian(t), r, residual=lambda z: r - laplacian_apply(t, z))
    assert np.abs(z - x).max() <= 1e-11
    assert np.abs(z - x).max() < 1e-3 * np.abs(plain - x).max()
