"""Hermitian matrix polynomials and their calculus.

A polynomial of degree ``m`` is stored as coefficients ``A_0 ... A_m`` with
``A_k`` multiplying ``lambda**(m-k)``, together with the admissible open
interval ``(lambda_minus, lambda_plus)`` on which the polynomial is negative
definite at the left endpoint.  The divided difference, the rank-1 oblique
projector and the deflated polynomial built from it are the building blocks
of the solver's line-search diagnostics.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateProjectorError, NotDefiniteError
from .linalg import inertia, symmetrize

__all__ = [
    "HermMatrixPolynomial",
    "Interval",
    "ObliqueProjector",
    "deflated_eval",
    "divided_difference",
    "oblique_projection",
]

# offset of the definiteness probe from the left interval endpoint
PROBE_EPS_REL = 1e-8


@dataclass(frozen=True)
class Interval:
    """Open interval (lo, hi); hi may be +inf for unbounded-above problems."""

    lo: float
    hi: float = math.inf

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    def contains(self, x, slack=0.0):
        """Membership in the open interval, widened by ``slack`` at both ends."""
        return (self.lo - slack) < x and x < (self.hi + slack)

    def probe_point(self):
        """Point just inside the left endpoint used for definiteness checks."""
        return self.lo + PROBE_EPS_REL * (1.0 + abs(self.lo))


def eval_poly(coeffs, mu):
    """Horner evaluation of sum_k coeffs[k] * mu**(m-k) for matrix or scalar
    coefficients."""
    acc = coeffs[0].copy() if isinstance(coeffs[0], np.ndarray) else coeffs[0]
    for A in coeffs[1:]:
        acc = acc * mu + A
    return acc


def eval_poly_derivative(coeffs, mu):
    """Horner evaluation of the derivative sum_k (m-k) coeffs[k] mu**(m-k-1)."""
    m = len(coeffs) - 1
    dcoeffs = [(m - k) * coeffs[k] for k in range(m)]
    return eval_poly(dcoeffs, mu)


def _bivariate_power_sum(rho1, rho2, p):
    """sum_{j=0}^{p} rho1**j * rho2**(p-j), accumulated in mirrored pairs so
    the result is exactly symmetric in (rho1, rho2)."""
    total = 0.0
    for j in range(p // 2 + 1):
        k = p - j
        if j == k:
            total += (rho1 * rho2) ** j
        else:
            total += rho1**j * rho2**k + rho1**k * rho2**j
    return total


class HermMatrixPolynomial:
    """Matrix polynomial F(lambda) = sum_k A_k lambda**(m-k) with Hermitian
    coefficients, negative definite at the left end of its interval.

    Parameters
    ----------
    coeffs : sequence of (n, n) array_like
        Coefficients ``A_0 ... A_m``, leading first.  Symmetrized on entry.
    interval : Interval or (lo, hi) tuple
        Admissible open interval.  ``hi`` may be ``math.inf``.
    check_definite : bool
        When True (default) and ``lo`` is finite, verify that
        ``F(lo + eps)`` is negative definite; raise
        :class:`NotDefiniteError` otherwise.
    """

    def __init__(self, coeffs, interval, check_definite=True):
        coeffs = [symmetrize(A) for A in coeffs]
        if len(coeffs) < 2:
            raise ValueError("degree must be at least 1 (need >= 2 coefficients)")
        n = coeffs[0].shape[0]
        if any(A.shape != (n, n) for A in coeffs):
            raise ValueError("all coefficients must share one square shape")
        if not isinstance(interval, Interval):
            interval = Interval(*interval)
        self.coeffs = coeffs
        self.degree = len(coeffs) - 1
        self.n = n
        self.interval = interval
        self.coeff_norms_1 = np.array([np.linalg.norm(A, 1) for A in coeffs])
        if check_definite and np.isfinite(interval.lo):
            probe = inertia(self.eval(interval.probe_point()))
            if probe != (n, 0, 0):
                raise NotDefiniteError(
                    "F is not negative definite just inside the left interval "
                    f"endpoint (inertia {tuple(probe)})"
                )

    def eval(self, mu):
        """F(mu); exactly Hermitian for real mu since the coefficients are."""
        return eval_poly(self.coeffs, float(mu))

    def eval_derivative(self, mu):
        """F'(mu) = sum_{k<m} (m-k) A_k mu**(m-k-1)."""
        return eval_poly_derivative(self.coeffs, float(mu))

    def divided_difference(self, rho1, rho2):
        """See module-level :func:`divided_difference`."""
        return divided_difference(self, rho1, rho2)

    def coefficient_scale(self, rho):
        """sum_k ||A_k||_1 |rho|**(m-k): the residual normalization denominator
        and the generic magnitude of F near rho."""
        m = self.degree
        powers = np.abs(float(rho)) ** np.arange(m, -1, -1)
        return float(self.coeff_norms_1 @ powers)

    def __repr__(self):
        return (
            f"HermMatrixPolynomial(degree={self.degree}, n={self.n}, "
            f"interval=({self.interval.lo}, {self.interval.hi}))"
        )


def divided_difference(F, rho1, rho2):
    """Divided difference (F(rho1) - F(rho2)) / (rho1 - rho2).

    Evaluated through the expanded identity

        Phi(rho1, rho2) = sum_{k<m} A_k sum_j rho1**j rho2**(m-k-1-j),

    which involves no subtractive cancellation and degenerates smoothly to
    F'(rho) on the diagonal, where the convergent iteration drives it.  The
    mirrored-pair accumulation makes Phi(rho1, rho2) == Phi(rho2, rho1)
    bit-for-bit.
    """
    rho1 = float(rho1)
    rho2 = float(rho2)
    m = F.degree
    acc = np.zeros_like(F.coeffs[0])
    for k in range(m):
        acc = acc + F.coeffs[k] * _bivariate_power_sum(rho1, rho2, m - k - 1)
    return acc


@dataclass(frozen=True)
class ObliqueProjector:
    """Rank-1 oblique projector P v = x (x^H Phi v) / (x^H Phi x), stored in
    factored form (x, w = Phi x, denom) and applied in O(n) per vector."""

    x: np.ndarray
    w: np.ndarray
    denom: float

    def apply(self, v):
        """P v."""
        return self.x * (np.vdot(self.w, v) / self.denom)

    def apply_adjoint(self, v):
        """P^H v = Phi x (x^H v) / conj(denom); denom is real."""
        return self.w * (np.vdot(self.x, v) / self.denom)

    def as_matrix(self):
        """Materialize P (diagnostics only; never used in the solver loop)."""
        return np.outer(self.x, self.w.conj()) / self.denom


def oblique_projection(F, x, rho1, rho2):
    """Projector fixing ``x`` along the divided-difference form.

    Raises :class:`DegenerateProjectorError` when ``|x^H Phi x|`` is below
    ``1e-14 * ||Phi|| * ||x||**2``.
    """
    x = np.asarray(x, dtype=complex)
    phi = divided_difference(F, rho1, rho2)
    w = phi @ x
    denom = np.vdot(x, w)
    scale = np.linalg.norm(phi, 2) * np.vdot(x, x).real
    if abs(denom) <= 1e-14 * scale:
        raise DegenerateProjectorError(
            f"x^H Phi x = {denom:.3e} is degenerate relative to {scale:.3e}"
        )
    return ObliqueProjector(x=x.copy(), w=w, denom=denom.real)


def deflated_eval(F, rho, P):
    """(I - P^H) F(rho) (I - P), the operator governing the line-search
    identities.  Returns a Hermitian matrix; fine at desk scale, not used
    inside the iteration loop."""
    M = F.eval(rho)
    Pm = P.as_matrix()
    eye = np.eye(F.n)
    out = (eye - Pm.conj().T) @ M @ (eye - Pm)
    return symmetrize(out)
