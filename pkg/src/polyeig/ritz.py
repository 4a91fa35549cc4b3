"""Rayleigh-Ritz machinery on a subspace basis: congruence projection of the
polynomial, companion-linearized solve of the small polynomial eigenproblem,
and selection of the smallest proper (real, admissible, positive-type)
eigenpair.
"""

import numpy as np
import scipy.linalg

from .exceptions import AssumptionViolatedError, NoRitzValueError, PolyeigError
from .linalg import symmetrize
from .matpoly import eval_poly, eval_poly_derivative
from dataclasses import dataclass, field

__all__ = [
    "ProjectedPolynomial",
    "RitzSelection",
    "project",
    "select_smallest_proper",
    "solve_small",
]

# realness tolerance for Ritz values: |Im mu| <= 1e-10 * (1 + |Re mu|)
RITZ_IMAG_RTOL = 1e-10
# interval membership slack for Ritz values
RITZ_INTERVAL_SLACK = 1e-14
# Galerkin post-check: ||P(rho) y|| <= 1e-9 * coefficient scale
GALERKIN_RTOL = 1e-9


@dataclass
class ProjectedPolynomial:
    """Coefficients Z^H A_k Z of the polynomial restricted to span(Z),
    together with the orthonormal basis used to lift small vectors back."""

    coeffs: list = field(repr=False)
    basis: np.ndarray = field(repr=False)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def k(self):
        return self.coeffs[0].shape[0]

    def eval(self, mu):
        return eval_poly(self.coeffs, float(mu))

    def eval_derivative(self, mu):
        return eval_poly_derivative(self.coeffs, float(mu))

    def coefficient_scale(self, rho):
        powers = np.abs(float(rho)) ** np.arange(self.degree, -1, -1)
        norms = np.array([np.linalg.norm(C, 1) for C in self.coeffs])
        return float(norms @ powers)


@dataclass(frozen=True)
class RitzSelection:
    """Selected proper eigenpair: Ritz value, small vector, lifted vector
    normalized under the instance constraint, and its (positive) type form."""

    rho: float
    y: np.ndarray
    x: np.ndarray
    sigma_small: float


def project(F, Z):
    """Congruence projection: coefficients Z^H A_k Z, symmetrized."""
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 1:
        Z = Z[:, None]
    small = [symmetrize(Z.conj().T @ A @ Z) for A in F.coeffs]
    return ProjectedPolynomial(coeffs=small, basis=Z)


def _companion_pair(coeffs):
    """First companion linearization (C_A, C_B) of sum_k A_k lambda**(m-k):
    lambda C_B z = C_A z with z = [lambda**(m-1) y; ...; lambda y; y]."""
    m = len(coeffs) - 1
    k = coeffs[0].shape[0]
    N = m * k
    C_A = np.zeros((N, N), dtype=complex)
    C_B = np.eye(N, dtype=complex)
    C_B[:k, :k] = coeffs[0]
    for j in range(1, m + 1):
        C_A[:k, (j - 1) * k : j * k] = -coeffs[j]
    for j in range(1, m):
        C_A[j * k : (j + 1) * k, (j - 1) * k : j * k] = np.eye(k)
    return C_A, C_B


def _vector_from_blocks(z, m, k):
    """Recover the small eigenvector from the companion eigenvector: the
    blocks are lambda-power multiples of y, so take the best-scaled one."""
    blocks = [z[j * k : (j + 1) * k] for j in range(m)]
    best = max(blocks, key=np.linalg.norm)
    nrm = np.linalg.norm(best)
    if nrm == 0.0:
        raise PolyeigError("companion eigenvector has vanishing blocks")
    return best / nrm


def solve_small(P):
    """All finite eigenvalues of the projected polynomial with unit-norm
    eigenvectors, via companion linearization.

    Degree 1 degenerates to the plain generalized eigenproblem.  Degree 2
    with a positive definite leading block is reduced to a single standard
    eigenproblem; anything else goes through the QZ pencil solve.  Pairs
    whose eigenvalues are not finite (singular leading block) are dropped.
    """
    m = P.degree
    k = P.k
    if m == 1:
        w, V = scipy.linalg.eig(-P.coeffs[1], P.coeffs[0], check_finite=False)
        pairs = [
            (w[j], V[:, j] / np.linalg.norm(V[:, j]))
            for j in range(len(w))
            if np.isfinite(w[j])
        ]
        return pairs
    if m == 2:
        try:
            chol = scipy.linalg.cho_factor(P.coeffs[0], check_finite=False)
        except scipy.linalg.LinAlgError:
            chol = None
        if chol is not None:
            top = -scipy.linalg.cho_solve(
                chol, np.hstack([P.coeffs[1], P.coeffs[2]]), check_finite=False
            )
            M = np.zeros((2 * k, 2 * k), dtype=complex)
            M[:k, :] = top
            M[k:, :k] = np.eye(k)
            w, V = np.linalg.eig(M)
            return [(w[j], _vector_from_blocks(V[:, j], m, k)) for j in range(len(w))]
    C_A, C_B = _companion_pair(P.coeffs)
    w, V = scipy.linalg.eig(C_A, C_B, check_finite=False)
    return [
        (w[j], _vector_from_blocks(V[:, j], m, k))
        for j in range(len(w))
        if np.isfinite(w[j])
    ]


def select_smallest_proper(P, interval):
    """Smallest real eigenvalue of the projected polynomial inside the
    interval with positive type, its vector lifted to x = Z y and normalized
    under the instance constraint x^H A_0 x = 1.

    Ties within the realness tolerance are broken toward larger sigma (the
    better conditioned type).  The Galerkin residual ||P(rho) y|| is checked
    against ``1e-9`` times the coefficient scale as a post-condition.

    Raises :class:`NoRitzValueError` when no proper eigenvalue exists, which
    signals subspace degeneration to the solver.
    """
    candidates = []
    for mu, y in solve_small(P):
        if abs(mu.imag) > RITZ_IMAG_RTOL * (1.0 + abs(mu.real)):
            continue
        rho = mu.real
        if not interval.contains(rho, slack=RITZ_INTERVAL_SLACK * (1.0 + abs(rho))):
            continue
        sig = np.vdot(y, P.eval_derivative(rho) @ y).real
        if sig <= 0.0:
            continue
        candidates.append((rho, sig, y))
    if not candidates:
        raise NoRitzValueError(
            "projected polynomial has no real positive-type eigenvalue in the "
            "admissible interval"
        )
    candidates.sort(key=lambda t: t[0])
    rho0 = candidates[0][0]
    tie_tol = RITZ_IMAG_RTOL * (1.0 + abs(rho0))
    tied = [c for c in candidates if c[0] <= rho0 + tie_tol]
    rho, sig, y = max(tied, key=lambda t: t[1])

    galerkin = np.linalg.norm(P.eval(rho) @ y)
    scale = P.coefficient_scale(rho)
    if galerkin > GALERKIN_RTOL * scale:
        raise PolyeigError(
            f"projected eigenpair residual {galerkin:.3e} exceeds "
            f"{GALERKIN_RTOL:.0e} * scale ({scale:.3e})"
        )

    # normalize under the instance constraint x^H A_0 x = 1 (B-normalization
    # for pencils, A-normalization for hyperbolic quadratics)
    c = np.vdot(y, P.coeffs[0] @ y).real
    if c <= 0.0:
        raise AssumptionViolatedError(
            "selected Ritz vector has nonpositive constraint form x^H A_0 x"
        )
    y = y / np.sqrt(c)
    sig = sig / c
    x = P.basis @ y
    return RitzSelection(rho=rho, y=y, x=x, sigma_small=sig)
