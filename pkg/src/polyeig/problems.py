"""Problem generators: a gyroscopic-derived hyperbolic quadratic from
vibration analysis of a wiresaw, hyperbolic quadratics with a prescribed
spectrum, and definite pencils with an indefinite leading coefficient.

Every generator certifies its own bundle (inertia-based definiteness or
hyperbolicity check) before returning it; no uncertified problem escapes.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import NotDefiniteError, NotHyperbolicError
from .linalg import inertia, symmetrize
from .matpoly import HermMatrixPolynomial, Interval

__all__ = [
    "ProblemBundle",
    "definite_pencil",
    "prescribed_hyperbolic",
    "symmetric_spectrum",
    "wiresaw1",
]


@dataclass
class ProblemBundle:
    """A certified polynomial plus everything the CLI and oracles need:
    instance kind, the exact smallest positive-type eigenvalue when the
    construction prescribes it, and generator metadata."""

    polynomial: HermMatrixPolynomial
    kind: str  # "pencil" | "hyperbolic"
    known_lambda1: Optional[float] = None
    metadata: dict = field(default_factory=dict)


def _constant_coeff_definiteness(F):
    ine = inertia(F.coeffs[-1])
    n = F.n
    if ine == (0, 0, n):
        return "positive"
    if ine == (n, 0, 0):
        return "negative"
    return "indefinite"


def wiresaw1(n, nu):
    """Hyperbolic quadratic from the wiresaw vibration model.

    Coefficients (1-based indices i, j):

        A = I/2,
        B_ij = nu * 1j * 4 i j / (i^2 - j^2)  when i + j is odd, else 0,
        C = ((nu^2 - 1) pi^2 / 2) diag(1^2, ..., n^2),

    with 0 <= nu < 1 the wire-speed parameter.  C is negative definite for
    nu < 1, so the interval anchor sits at 0; the conventional
    constant-coefficient preconditioner therefore inverts -C (recorded in
    the metadata).  Deterministic: no randomness enters.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0.0 <= nu < 1.0:
        raise ValueError("nu must lie in [0, 1)")
    idx = np.arange(1, n + 1, dtype=float)
    A = 0.5 * np.eye(n, dtype=complex)
    C = np.diag(((nu**2 - 1.0) * math.pi**2 / 2.0) * idx**2).astype(complex)
    num = 4.0 * np.outer(idx, idx)
    den = np.subtract.outer(idx**2, idx**2)
    odd = (np.add.outer(idx, idx) % 2.0) == 1.0
    B = np.zeros((n, n), dtype=complex)
    B[odd] = 1j * nu * num[odd] / den[odd]

    F = HermMatrixPolynomial([A, B, C], Interval(0.0, math.inf))
    meta = {
        "generator": "wiresaw1",
        "n": n,
        "nu": nu,
        "lambda_minus": 0.0,
        "constant_coeff_definiteness": _constant_coeff_definiteness(F),
    }
    return ProblemBundle(polynomial=F, kind="hyperbolic", metadata=meta)


def symmetric_spectrum(n):
    """The canonical +-1..+-n spectrum: positive eigenvalues 1..n ascending,
    negative ones -n..-1 ascending."""
    pos = np.arange(1.0, n + 1.0)
    return pos, -pos[::-1]


def prescribed_hyperbolic(n, pos_eigs, neg_eigs, seed=0):
    """Hyperbolic quadratic with the exact spectrum pos_eigs + neg_eigs.

    With A = I, Lp = diag(pos_eigs), Ln = diag(neg_eigs) and a seeded random
    unitary Q (orthonormalized complex standard-normal matrix),

        B = Q (-(Lp + Ln)) Q^H,   C = Q (Lp Ln) Q^H,

    so F(lambda) = Q (lambda I - Lp)(lambda I - Ln) Q^H and the eigenvalues
    are exactly the prescribed ones, the positive list being positive type.
    Entries are paired positionally; any pairing yields the same spectrum.
    The admissible interval is anchored at the gap midpoint
    (min(pos) + max(neg))/2, which maximizes the certification margin.

    Raises :class:`NotHyperbolicError` when min(pos) <= max(neg) or the
    inertia certification fails.
    """
    pos = np.asarray(pos_eigs, dtype=float)
    neg = np.asarray(neg_eigs, dtype=float)
    if len(pos) != n or len(neg) != n:
        raise ValueError("pos_eigs and neg_eigs must each have length n")
    if pos.min() <= neg.max():
        raise NotHyperbolicError(
            f"gap condition violated: min(pos) = {pos.min()} must exceed "
            f"max(neg) = {neg.max()}"
        )
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, _ = np.linalg.qr(Z)

    A = np.eye(n, dtype=complex)
    B = symmetrize(Q @ np.diag(-(pos + neg)) @ Q.conj().T)
    C = symmetrize(Q @ np.diag(pos * neg) @ Q.conj().T)

    mid = (pos.min() + neg.max()) / 2.0
    if inertia(symmetrize(mid**2 * A + mid * B + C)) != (n, 0, 0):
        raise NotHyperbolicError("inertia certification failed at the gap midpoint")
    F = HermMatrixPolynomial([A, B, C], Interval(mid, math.inf))
    meta = {
        "generator": "prescribed_hyperbolic",
        "n": n,
        "seed": seed,
        "lambda_minus": mid,
        "spectrum_pos_min": float(pos.min()),
        "spectrum_pos_max": float(pos.max()),
        "constant_coeff_definiteness": _constant_coeff_definiteness(F),
    }
    return ProblemBundle(
        polynomial=F, kind="hyperbolic", known_lambda1=float(pos.min()),
        metadata=meta,
    )


def definite_pencil(n, eigs_in_I, seed=0, n_attempts=10):
    """Definite pencil lambda B - A with indefinite B.

    Built from the diagonal model lambda diag(signs) - diag(values): the
    entries of ``eigs_in_I`` (ascending, positive) become the positive-type
    eigenvalues, and the remaining ``n - len(eigs_in_I)`` directions carry
    sign -1 with negative-type eigenvalues -(0.5 + j), which keeps B
    genuinely indefinite.  The model is congruence-transformed by a seeded
    random matrix dominated by the identity; congruence preserves both the
    spectrum and F(0) < 0, certified by inertia and retried with fresh draws
    (at most ``n_attempts``) before giving up.

    The admissible interval is (0, inf) and known_lambda1 = min(eigs_in_I).
    """
    eigs = np.asarray(eigs_in_I, dtype=float)
    if n < 2:
        raise ValueError("n must be >= 2")
    if len(eigs) < 1 or len(eigs) > n:
        raise ValueError("need between 1 and n prescribed eigenvalues")
    if np.any(eigs <= 0.0) or np.any(np.diff(eigs) < 0.0):
        raise ValueError("eigs_in_I must be ascending and positive")
    k_neg = n - len(eigs)
    signs = np.concatenate([np.ones(len(eigs)), -np.ones(k_neg)])
    values = np.concatenate([eigs, 0.5 + np.arange(k_neg)])

    rng = np.random.default_rng(seed)
    for _ in range(n_attempts):
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        G = np.eye(n) + 0.5 * Z / math.sqrt(2.0 * n)
        B = symmetrize(G.conj().T @ np.diag(signs) @ G)
        A = symmetrize(G.conj().T @ np.diag(values) @ G)
        if inertia(-A) == (n, 0, 0):
            F = HermMatrixPolynomial([B, -A], Interval(0.0, math.inf))
            meta = {
                "generator": "definite_pencil",
                "n": n,
                "seed": seed,
                "lambda_minus": 0.0,
                "n_negative_type": k_neg,
                "constant_coeff_definiteness": _constant_coeff_definiteness(F),
            }
            return ProblemBundle(
                polynomial=F, kind="pencil", known_lambda1=float(eigs.min()),
                metadata=meta,
            )
    raise NotDefiniteError(
        f"definiteness certification failed in {n_attempts} attempts"
    )
