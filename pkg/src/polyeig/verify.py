"""Independent verification oracles.

Inside the admissible interval, the positive inertia count of F(mu) equals
the number of eigenvalues in (lambda_minus, mu]; this turns a Hermitian
eigendecomposition into an eigenvalue counter and, by bisection, into an
independent estimate of lambda1 that never touches the iterative solver.
A dense companion linearization of the full problem supplies the complete
real spectrum as a second, mutually checkable oracle.
"""

import numpy as np

from .exceptions import (
    BadBracketError,
    OnEigenvalueError,
    ProblemTooLargeError,
)
from .linalg import herm_eig, inertia
from .ritz import ProjectedPolynomial, solve_small

__all__ = [
    "bisect_lambda1",
    "brute_force_eigs",
    "count_eigs_upto",
    "default_bracket",
]

# relative nudge applied when a probe lands on an eigenvalue
NUDGE_REL = 1e-13
# dense linearization guard: n * degree must not exceed this
BRUTE_FORCE_GUARD = 2000
# realness filter for the dense linearization
BRUTE_FORCE_IMAG_RTOL = 1e-8


def count_eigs_upto(F, mu):
    """Number of eigenvalues of F in (lambda_minus, mu], from the positive
    inertia count of F(mu).

    ``mu`` must lie in the admissible interval, where the count is backed by
    the negative definiteness at the left endpoint.  Raises
    :class:`OnEigenvalueError` when F(mu) is singular to tolerance (the
    caller perturbs mu).
    """
    mu = float(mu)
    if not F.interval.contains(mu):
        raise ValueError(
            f"mu = {mu} lies outside the admissible interval "
            f"({F.interval.lo}, {F.interval.hi})"
        )
    ine = inertia(F.eval(mu))
    if ine.zero > 0:
        raise OnEigenvalueError(f"F({mu}) is numerically singular")
    return ine.positive


def _count_nudged(F, mu):
    """count_eigs_upto with collision handling.

    A probe that lands on an eigenvalue is first nudged by one part in 1e13
    (doubling, a handful of attempts).  For heavily scaled problems the
    inertia zero band ``1e-12 ||F(mu)||`` can be far wider than any such
    nudge; the signs of the near-zero eigenvalues remain meaningful down to
    roundoff level, so as a fallback the count is classified by strict sign.
    """
    try:
        return count_eigs_upto(F, mu), mu
    except OnEigenvalueError:
        pass
    shift = NUDGE_REL * (1.0 + abs(mu))
    probe = mu
    for _ in range(8):
        probe = probe + shift
        shift *= 2.0
        if not F.interval.contains(probe):
            break
        try:
            return count_eigs_upto(F, probe), probe
        except OnEigenvalueError:
            continue
    w, _ = herm_eig(F.eval(mu))
    return int(np.count_nonzero(w > 0.0)), mu


def default_bracket(F, max_expansions=60):
    """Bracket (lo, hi) with zero count at lo and positive count at hi, by
    doubling expansion from just inside the left endpoint."""
    lo = F.interval.probe_point()
    step = max(1.0, abs(F.interval.lo))
    for k in range(max_expansions):
        hi = lo + step * 2.0**k
        if not F.interval.contains(hi):
            break
        count, hi = _count_nudged(F, hi)
        if count >= 1:
            return lo, hi
    raise BadBracketError(
        f"no eigenvalue found within {max_expansions} bracket expansions"
    )


def bisect_lambda1(F, bracket=None, tol=1e-10):
    """Smallest eigenvalue of F in the admissible interval, located purely by
    inertia counts.

    ``bracket`` is a (lo, hi) pair with ``count(lo) == 0`` and
    ``count(hi) >= 1`` (found by expansion when omitted); bisection narrows
    it until ``hi - lo <= tol`` and the midpoint is returned, so the result
    is within ``tol`` of lambda1.  Probes landing on an eigenvalue are
    nudged by one part in 1e13.

    Raises :class:`BadBracketError` for an invalid bracket.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if bracket is None:
        lo, hi = default_bracket(F)
    else:
        lo, hi = float(bracket[0]), float(bracket[1])
    count_lo, lo = _count_nudged(F, lo)
    count_hi, hi = _count_nudged(F, hi)
    if count_lo != 0 or count_hi < 1 or not lo < hi:
        raise BadBracketError(
            f"bracket ({lo}, {hi}) has counts ({count_lo}, {count_hi}); "
            "need 0 on the left and >= 1 on the right"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        count, mid = _count_nudged(F, mid)
        if mid <= lo or mid >= hi:
            break  # nudging left the bracket; interval is at resolution limit
        if count == 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def brute_force_eigs(F):
    """All real eigenvalues of F, ascending, via dense companion
    linearization of the full-size problem.

    Complex pairs are filtered at relative imaginary tolerance 1e-8.  Guarded
    to n * degree <= 2000 (raises :class:`ProblemTooLargeError` beyond).
    """
    if F.n * F.degree > BRUTE_FORCE_GUARD:
        raise ProblemTooLargeError(
            f"n * m = {F.n * F.degree} exceeds the dense guard {BRUTE_FORCE_GUARD}"
        )
    P = ProjectedPolynomial(coeffs=list(F.coeffs), basis=np.eye(F.n, dtype=complex))
    eigs = [
        mu.real
        for mu, _ in solve_small(P)
        if abs(mu.imag) <= BRUTE_FORCE_IMAG_RTOL * (1.0 + abs(mu.real))
    ]
    return np.sort(np.array(eigs))
