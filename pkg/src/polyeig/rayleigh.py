"""The Rayleigh functional rho(x): the unique positive-type root of
x^H F(lambda) x = 0 in the admissible interval, plus the derived quantities
sigma(x), the residual vector and the normalized residual.

Fast closed-form paths cover the shipped degrees (pencil and quadratic);
a companion-root path handles any degree and doubles as the cross-check
oracle for the fast paths.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import AssumptionViolatedError, NotInDomainError
from .matpoly import eval_poly, eval_poly_derivative

__all__ = [
    "RayleighEvaluation",
    "evaluate",
    "normalized_residual",
    "rayleigh_quotient",
    "sigma",
]

# realness filter for companion roots of the scalar polynomial
ROOT_IMAG_RTOL = 1e-10
# interval membership slack for computed roots
ROOT_INTERVAL_SLACK = 1e-14


@dataclass(frozen=True)
class RayleighEvaluation:
    """One vector's worth of Rayleigh data: the functional value, its type
    indicator sigma = x^H F'(rho) x > 0, the residual r = F(rho) x and its
    plain and normalized norms."""

    rho: float
    sigma: float
    residual: np.ndarray
    residual_norm: float
    normalized_residual: float


def _scalar_coeffs(F, x):
    """Real coefficients a_k = x^H A_k x of the scalar polynomial
    x^H F(lambda) x."""
    return np.array([np.vdot(x, A @ x).real for A in F.coeffs])


def _rho_linear(F, a):
    # a[0] * rho + a[1] = 0, positive type iff a[0] > 0
    if a[0] <= 0.0:
        raise NotInDomainError("leading form x^H A_0 x is not positive")
    rho = -a[1] / a[0]
    if not F.interval.contains(rho, slack=ROOT_INTERVAL_SLACK * (1.0 + abs(rho))):
        raise NotInDomainError(f"root {rho} lies outside the admissible interval")
    return rho


def _rho_quadratic(F, a):
    # positive-type root (-b + sqrt(b^2 - 4ac)) / (2a), evaluated without
    # cancellation; for certified hyperbolic problems this root always exists
    aa, b, c = a
    if aa <= 0.0:
        raise NotInDomainError("leading form x^H A_0 x is not positive")
    disc = b * b - 4.0 * aa * c
    if disc <= 0.0:
        raise NotInDomainError("no real positive-type root (discriminant <= 0)")
    sq = math.sqrt(disc)
    if b <= 0.0:
        rho = (-b + sq) / (2.0 * aa)
    else:
        rho = -2.0 * c / (b + sq)
    if not F.interval.contains(rho, slack=ROOT_INTERVAL_SLACK * (1.0 + abs(rho))):
        raise NotInDomainError(f"root {rho} lies outside the admissible interval")
    return rho


def _rho_generic(F, a):
    # all roots of the degree-m scalar polynomial via companion eigenvalues,
    # filtered to real roots in the interval with positive derivative
    if np.max(np.abs(a)) == 0.0:
        raise NotInDomainError("x^H F(lambda) x vanishes identically")
    roots = np.roots(a)
    candidates = []
    for z in roots:
        if abs(z.imag) > ROOT_IMAG_RTOL * (1.0 + abs(z.real)):
            continue
        rho = z.real
        if not F.interval.contains(rho, slack=ROOT_INTERVAL_SLACK * (1.0 + abs(rho))):
            continue
        slope = eval_poly_derivative(list(a), rho)
        if slope > 0.0:
            candidates.append((rho, slope))
    if not candidates:
        raise NotInDomainError("no positive-type root in the admissible interval")
    if len(candidates) > 1:
        # exactly one root is guaranteed analytically; numerics may disagree
        warnings.warn(
            f"{len(candidates)} positive-type roots survived filtering; "
            "keeping the best-conditioned one",
            RuntimeWarning,
        )
        candidates.sort(key=lambda t: t[1], reverse=True)
    return candidates[0][0]


def rayleigh_quotient(F, x, method="auto"):
    """Rayleigh functional value rho(x).

    ``method`` is "auto" (closed forms for degrees 1 and 2, companion roots
    otherwise) or "generic" (companion roots regardless of degree; used as an
    independent cross-check of the fast paths).

    Raises :class:`NotInDomainError` when x admits no positive-type root in
    the interval.
    """
    x = np.asarray(x, dtype=complex)
    if np.linalg.norm(x) == 0.0:
        raise ValueError("x must be nonzero")
    a = _scalar_coeffs(F, x)
    if method == "generic":
        return _rho_generic(F, a)
    if F.degree == 1:
        return _rho_linear(F, a)
    if F.degree == 2:
        return _rho_quadratic(F, a)
    return _rho_generic(F, a)


def sigma(F, x, rho):
    """Type indicator sigma(x) = x^H F'(rho) x, asserted positive.

    Raises :class:`AssumptionViolatedError` when the value is not positive,
    flagging a problem outside the supported hypotheses.
    """
    x = np.asarray(x, dtype=complex)
    val = np.vdot(x, F.eval_derivative(rho) @ x).real
    if val <= 0.0:
        raise AssumptionViolatedError(f"sigma(x) = {val:.3e} is not positive")
    return val


def normalized_residual(F, x, rho, residual_norm=None):
    """||F(rho) x|| / (sum_k ||A_k||_1 |rho|**(m-k) * ||x||).

    Zero exactly at eigenpairs and invariant under scaling of x.
    """
    x = np.asarray(x, dtype=complex)
    xnorm = np.linalg.norm(x)
    if xnorm == 0.0:
        raise ValueError("x must be nonzero")
    if residual_norm is None:
        residual_norm = np.linalg.norm(F.eval(rho) @ x)
    return residual_norm / (F.coefficient_scale(rho) * xnorm)


def evaluate(F, x):
    """Full Rayleigh record for one vector: rho, sigma, residual and norms.

    Propagates :class:`NotInDomainError` from the functional.
    """
    x = np.asarray(x, dtype=complex)
    rho = rayleigh_quotient(F, x)
    sig = sigma(F, x, rho)
    r = F.eval(rho) @ x
    rnorm = float(np.linalg.norm(r))
    return RayleighEvaluation(
        rho=rho,
        sigma=sig,
        residual=r,
        residual_norm=rnorm,
        normalized_residual=normalized_residual(F, x, rho, residual_norm=rnorm),
    )
