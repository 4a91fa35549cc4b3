"""Dense Hermitian kernels: eigendecomposition, solves, orthonormalization,
inertia.

Matrices are plain complex ndarrays.  Conjugate symmetry is imposed by
:func:`symmetrize` wherever a matrix enters the library, so downstream code
may assume exact Hermitian storage.  Everything here is a pure function of
its inputs and safe to call concurrently.
"""

import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import EmptyBasisError, SingularMatrixError

__all__ = [
    "InertiaCount",
    "herm_eig",
    "inertia",
    "orthonormalize",
    "solve_hermitian",
    "symmetrize",
]

# eigenvalues within +-1e-12 * ||M|| count as zero in inertia()
INERTIA_ZERO_RTOL = 1e-12

# an LU pivot below 1e-14 * ||M||_1 flags a singular solve
SINGULAR_PIVOT_RTOL = 1e-14


class InertiaCount(NamedTuple):
    """Counts of negative / zero / positive eigenvalues of a Hermitian matrix."""

    negative: int
    zero: int
    positive: int


def symmetrize(M):
    """Return (M + M^H)/2 as a complex array, silently repairing round-off
    asymmetry."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return 0.5 * (M + M.conj().T)


def herm_eig(M):
    """Full eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvector columns ``V`` such that ``M @ V = V @ diag(w)``.  LAPACK
    non-convergence surfaces as ``numpy.linalg.LinAlgError``.
    """
    return np.linalg.eigh(symmetrize(M))


def solve_hermitian(M, b):
    """Solve ``M x = b`` for Hermitian ``M``.

    Raises :class:`SingularMatrixError` when an LU pivot falls below
    ``1e-14 * ||M||_1``.
    """
    M = symmetrize(M)
    b = np.asarray(b, dtype=complex)
    scale = np.linalg.norm(M, 1)
    with warnings.catch_warnings():
        # singularity is detected below and raised as a typed error
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or pivots.min() <= SINGULAR_PIVOT_RTOL * scale:
        raise SingularMatrixError(
            f"matrix is singular to tolerance (min pivot {pivots.min():.3e}, "
            f"norm {scale:.3e})"
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def orthonormalize(V, drop_tol=1e-10):
    """Orthonormalize the columns of ``V`` by modified Gram-Schmidt with
    a second reorthogonalization pass.

    A column whose residual after projection onto the accumulated basis
    falls below ``drop_tol`` times its original norm is dropped, so the
    returned ``(Q, rank)`` spans the numerically independent part of ``V``.
    Column order is preserved: the basis built from the first j columns is
    a prefix of the basis built from all of them.

    Raises :class:`EmptyBasisError` when every column is dropped.
    """
    V = np.asarray(V, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[1] == 0:
        raise ValueError("V must have at least one column")
    cols = []
    for j in range(V.shape[1]):
        v = V[:, j]
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            continue
        w = v.copy()
        for _ in range(2):
            for q in cols:
                w = w - q * np.vdot(q, w)
        norm_w = np.linalg.norm(w)
        if norm_w <= drop_tol * norm0:
            continue
        cols.append(w / norm_w)
    if not cols:
        raise EmptyBasisError("all columns dropped during orthonormalization")
    return np.column_stack(cols), len(cols)


def inertia(M):
    """Inertia (negative, zero, positive) of a Hermitian matrix.

    Computed from eigenvalue signs with the zero band ``+-1e-12 * ||M||``,
    the spectral norm estimated as the largest absolute eigenvalue.
    """
    w, _ = herm_eig(M)
    tol = INERTIA_ZERO_RTOL * (np.abs(w).max() if w.size else 0.0)
    neg = int(np.count_nonzero(w < -tol))
    pos = int(np.count_nonzero(w > tol))
    return InertiaCount(negative=neg, zero=len(w) - neg - pos, positive=pos)
