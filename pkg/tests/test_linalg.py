import numpy as np
import pytest
from numpy.testing import assert_allclose

from polyeig import (
    EmptyBasisError,
    SingularMatrixError,
    herm_eig,
    inertia,
    orthonormalize,
    solve_hermitian,
)
from polyeig.linalg import symmetrize

from conftest import random_hermitian


def test_herm_eig_diagonal():
    w, V = herm_eig(np.diag([3.0, 1.0, 2.0]))
    assert_allclose(w, [1.0, 2.0, 3.0])


def test_herm_eig_swap():
    w, _ = herm_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert_allclose(w, [-1.0, 1.0])


def test_herm_eig_reconstruction(rng):
    H = random_hermitian(rng, 8)
    w, V = herm_eig(H)
    scale = np.abs(w).max()
    assert np.linalg.norm(V @ np.diag(w) @ V.conj().T - H) <= 1e-10 * scale
    assert np.linalg.norm(V.conj().T @ V - np.eye(8)) <= 1e-12 * 8


def test_solve_identity():
    x = solve_hermitian(np.eye(3), np.array([1.0, 0.0, 0.0]))
    assert_allclose(x, [1.0, 0.0, 0.0])


def test_solve_diagonal():
    x = solve_hermitian(np.diag([2.0, 4.0]), np.array([2.0, 4.0]))
    assert_allclose(x, [1.0, 1.0])


def test_solve_matches_eig_based_solve(rng):
    # two independent solve paths agree on a random HPD system
    Z = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    M = Z @ Z.conj().T + 6 * np.eye(6)
    b = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    x = solve_hermitian(M, b)
    w, V = herm_eig(M)
    x_eig = V @ ((V.conj().T @ b) / w)
    assert np.linalg.norm(x - x_eig) <= 1e-10 * np.linalg.norm(x_eig)
    assert np.linalg.norm(M @ x - b) <= 1e-10 * np.linalg.norm(M, 2) * np.linalg.norm(x)


def test_solve_singular_raises():
    M = np.diag([1.0, 0.0])
    with pytest.raises(SingularMatrixError):
        solve_hermitian(M, np.ones(2))


def test_orthonormalize_drops_dependent_column():
    e1 = np.array([1.0, 0.0, 0.0])
    Q, rank = orthonormalize(np.column_stack([e1, 2.0 * e1]), drop_tol=1e-10)
    assert rank == 1
    assert Q.shape == (3, 1)


def test_orthonormalize_keeps_orthonormal_input():
    V = np.eye(3)[:, :2]
    Q, rank = orthonormalize(V)
    assert rank == 2
    assert_allclose(np.abs(Q), V, atol=1e-15)


def test_orthonormalize_random_full_rank(rng):
    V = rng.standard_normal((10, 4)) + 1j * rng.standard_normal((10, 4))
    Q, rank = orthonormalize(V)
    assert rank == 4
    assert np.linalg.norm(Q.conj().T @ Q - np.eye(4)) <= 1e-12 * 4


def test_orthonormalize_idempotent(rng):
    V = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
    Q, rank = orthonormalize(V)
    Q2, rank2 = orthonormalize(Q)
    assert rank2 == rank
    # same span: projections agree
    P1 = Q @ Q.conj().T
    P2 = Q2 @ Q2.conj().T
    assert np.linalg.norm(P1 - P2) <= 1e-12


def test_orthonormalize_empty_basis():
    with pytest.raises(EmptyBasisError):
        orthonormalize(np.zeros((4, 2)))


def test_inertia_diagonal_signs():
    assert inertia(np.diag([1.5, 0.5, -0.5])) == (1, 0, 2)


def test_inertia_zero_matrix():
    assert inertia(np.zeros((3, 3))) == (0, 3, 0)


def test_inertia_matches_eig_signs(rng):
    for _ in range(5):
        H = random_hermitian(rng, 8)
        w, _ = herm_eig(H)
        ine = inertia(H)
        tol = 1e-12 * np.abs(w).max()
        assert ine.negative == np.count_nonzero(w < -tol)
        assert ine.positive == np.count_nonzero(w > tol)
        assert sum(ine) == 8


def test_symmetrize_repairs_roundoff(rng):
    H = random_hermitian(rng, 5)
    H[0, 1] += 1e-18
    S = symmetrize(H)
    assert np.linalg.norm(S - S.conj().T) == 0.0
