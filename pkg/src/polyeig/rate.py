"""Theoretical convergence-rate constants and checks against observed traces.

The asymptotic rate of the preconditioned iteration is governed by the
positive spectrum of -K F(lambda1): with gamma and Gamma its smallest and
largest positive eigenvalues, kappa = Gamma/gamma,
Delta = (sqrt(kappa)+1)/(sqrt(kappa)-1) and

    eta = 2 / (Delta**(2*m_e) + Delta**(-2*m_e)),

the locally optimal iteration obeys the two-step bound
rho_{i+1} - lambda1 <= eta**2 (rho_{i-1} - lambda1) + higher order, while the
per-step convention used for prediction plots applies the m_e = 1 factor
stepwise.  A steepest-descent stepwise constant eta_SD translates to the
locally optimal constant via eta = eta_SD / (2 - eta_SD).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSpectrumError, EmptyWindowError
from .linalg import herm_eig, symmetrize

__all__ = [
    "RateCheckReport",
    "RatePrediction",
    "eta_from_sd",
    "per_step_ratios",
    "predicted_error_sequence",
    "predicted_eta",
    "rate_prediction",
    "spectral_constants",
    "two_step_rate_check",
]

# eigenvalues above 1e-12 * max|eig| count as strictly positive
POSITIVE_EIG_RTOL = 1e-12
# kappa within this of 1 is treated as the perfect-preconditioner limit
KAPPA_ONE_SLACK = 1e-12


@dataclass(frozen=True)
class RatePrediction:
    """Rate constants for one (problem, preconditioner, m_e) triple."""

    gamma: float
    Gamma: float
    kappa: float
    Delta: float
    eta: float
    m_e: int
    lambda1: float


@dataclass(frozen=True)
class RateCheckReport:
    """Observed two-step ratios against the theoretical bound.

    ``indices`` are the trace iterations whose ratio was formed;
    ``exceptional`` flags indices where the step decreased the value by more
    than the square root of the previous decrease (a large-improvement branch
    excluded from the bound); ``violations`` lists indices whose ratio
    exceeds ``bound``.
    """

    indices: list
    ratios: list
    bound: float
    exceptional: list
    violations: list

    @property
    def passed(self):
        return not self.violations


def _half_inverse(M):
    """M**(-1/2) for Hermitian positive definite M."""
    w, V = herm_eig(M)
    if w.min() <= 0.0:
        raise DegenerateSpectrumError("preconditioner matrix is not positive definite")
    return (V * (1.0 / np.sqrt(w))) @ V.conj().T


def spectral_constants(F, K, lambda1):
    """Smallest and largest positive eigenvalues (gamma, Gamma) of
    -K F(lambda1).

    Computed from the Hermitian congruent form
    ``K**(1/2) (-F(lambda1)) K**(1/2)``, which shares the spectrum; K must be
    in identity or exact-inverse mode so the square root exists.  Eigenvalues
    above ``1e-12`` times the spectral radius count as positive.  Exactly one
    eigenvalue of the form is zero (the lambda1 direction); when a slightly
    inaccurate lambda1 pushes it past the threshold, the smallest eigenvalue
    is dropped as that contaminated zero mode.
    """
    if K.mode not in ("identity", "exact_inverse"):
        raise ValueError(
            "spectral constants need an identity or exact-inverse preconditioner"
        )
    negF = -F.eval(float(lambda1))
    if K.mode == "identity":
        W = negF
    else:
        S = _half_inverse(K.matrix)
        W = symmetrize(S @ negF @ S)
    w, _ = herm_eig(W)
    tol = POSITIVE_EIG_RTOL * np.abs(w).max()
    positive = w[w > tol]
    if positive.size == w.size:
        warnings.warn(
            "no eigenvalue of -K F(lambda1) is zero to tolerance; treating the "
            "smallest as the lambda1 mode (lambda1 is only approximate)",
            RuntimeWarning,
        )
        positive = positive[1:]
    if positive.size == 0:
        raise DegenerateSpectrumError("-K F(lambda1) has no positive eigenvalues")
    return float(positive.min()), float(positive.max())


def predicted_eta(kappa, m_e):
    """eta = 2 / (Delta**(2 m_e) + Delta**(-2 m_e)) with
    Delta = (sqrt(kappa)+1)/(sqrt(kappa)-1).

    kappa = 1 returns the limit 0; kappa < 1 is invalid.
    """
    if m_e < 1:
        raise ValueError("m_e must be >= 1")
    if kappa < 1.0 - KAPPA_ONE_SLACK:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    if kappa <= 1.0 + KAPPA_ONE_SLACK:
        return 0.0
    sq = math.sqrt(kappa)
    delta = (sq + 1.0) / (sq - 1.0)
    return 2.0 / (delta ** (2 * m_e) + delta ** (-2 * m_e))


def eta_from_sd(eta_sd):
    """Locally optimal stepwise constant from the steepest-descent one:
    eta = eta_sd / (2 - eta_sd), mapping [0, 1] monotonically into [0, 1]."""
    if not 0.0 <= eta_sd <= 1.0:
        raise ValueError(f"eta_sd must lie in [0, 1], got {eta_sd}")
    return eta_sd / (2.0 - eta_sd)


def rate_prediction(F, K, m_e, lambda1):
    """Bundle gamma, Gamma, kappa, Delta and eta for a problem/preconditioner
    pair."""
    gamma, Gamma = spectral_constants(F, K, lambda1)
    kappa = Gamma / gamma
    eta = predicted_eta(kappa, m_e)
    if kappa <= 1.0 + KAPPA_ONE_SLACK:
        delta = math.inf
    else:
        sq = math.sqrt(kappa)
        delta = (sq + 1.0) / (sq - 1.0)
    return RatePrediction(
        gamma=gamma, Gamma=Gamma, kappa=kappa, Delta=delta, eta=eta,
        m_e=int(m_e), lambda1=float(lambda1),
    )


def predicted_error_sequence(rho0, lambda1, eta, n_steps):
    """Geometric error model (rho0 - lambda1) * eta**i for i = 0..n_steps-1."""
    if not rho0 > lambda1:
        raise ValueError("rho0 must exceed lambda1")
    e0 = rho0 - lambda1
    return [e0 * eta**i for i in range(int(n_steps))]


def _rho_sequence(trace):
    return [getattr(row, "rho", row) for row in trace]


def _window_indices(errs, threshold, floor):
    """Centre indices i whose hypothesis error err[i-1] is inside
    [floor, threshold] and whose neighbours exist."""
    out = []
    for i in range(1, len(errs) - 1):
        if floor <= errs[i - 1] <= threshold and errs[i - 1] > 0.0:
            out.append(i)
    return out


def two_step_rate_check(trace, lambda1, eta, window_threshold=None, floor=0.0,
                        slack=0.1):
    """Check the two-step bound
    (rho_{i+1} - lambda1) / (rho_{i-1} - lambda1) <= eta**2 + slack over the
    asymptotic window.

    ``trace`` is a sequence of trace rows or plain rho values.  The window
    holds the centre indices whose entering error ``rho_{i-1} - lambda1``
    lies in ``[floor, window_threshold]`` (threshold defaults to 1e-2 times
    the initial error; a positive floor keeps ratios clear of the arithmetic
    noise level when lambda1 itself is only known approximately).  Steps
    whose decrease exceeds the square root of the previous decrease are the
    exceptional large-improvement branch: flagged, not failed.  The bound's
    higher-order term is covered by ``slack``, which is an engineering
    choice surfaced as a parameter.

    Raises :class:`EmptyWindowError` when fewer than three converging
    iterations are available or the window is empty.
    """
    rhos = _rho_sequence(trace)
    errs = [r - lambda1 for r in rhos]
    if sum(1 for e in errs if e > 0.0) < 3:
        raise EmptyWindowError("need at least 3 iterations with positive error")
    if window_threshold is None:
        window_threshold = 1e-2 * errs[0]
    centres = _window_indices(errs, window_threshold, floor)
    if not centres:
        raise EmptyWindowError("asymptotic window is empty; widen the threshold")

    indices, ratios, exceptional, violations = [], [], [], []
    bound = eta**2 + slack
    for i in centres:
        delta_prev = errs[i - 1] - errs[i]
        delta_here = errs[i] - errs[i + 1]
        ratio = max(errs[i + 1], 0.0) / errs[i - 1]
        indices.append(i)
        ratios.append(ratio)
        if delta_prev >= 0.0 and delta_here >= math.sqrt(max(delta_prev, 0.0)):
            exceptional.append(i)
            continue
        if ratio > bound:
            violations.append(i)
    return RateCheckReport(
        indices=indices, ratios=ratios, bound=bound,
        exceptional=exceptional, violations=violations,
    )


def per_step_ratios(trace, lambda1, window_threshold=None, floor=0.0):
    """Observed single-step ratios (rho_{i+1} - lambda1)/(rho_i - lambda1)
    over the window of iterations whose error lies in
    [floor, window_threshold].  Used against the stepwise m_e = 1 prediction
    2/(Delta**2 + Delta**(-2))."""
    rhos = _rho_sequence(trace)
    errs = [r - lambda1 for r in rhos]
    if sum(1 for e in errs if e > 0.0) < 2:
        raise EmptyWindowError("need at least 2 iterations with positive error")
    if window_threshold is None:
        window_threshold = 1e-2 * errs[0]
    ratios = []
    for i in range(len(errs) - 1):
        if floor <= errs[i] <= window_threshold and errs[i] > 0.0 and errs[i + 1] > floor:
            ratios.append(errs[i + 1] / errs[i])
    if not ratios:
        raise EmptyWindowError("asymptotic window is empty; widen the threshold")
    return np.array(ratios)
