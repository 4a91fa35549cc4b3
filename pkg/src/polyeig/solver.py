"""Locally optimal preconditioned extended CG iteration for the smallest
positive-type eigenvalue of a Hermitian matrix polynomial, with a
steepest-descent baseline.

One iteration builds an orthonormal basis of the preconditioned Krylov
subspace

    span{x_i, (K F(rho_i)) x_i, ..., (K F(rho_i))**m_e x_i}

extended by the previous iterate x_{i-1} (the "locally optimal" ingredient;
the SD variant omits it), performs Rayleigh-Ritz on it, and takes the
smallest proper Ritz pair as the next iterate.  The functional value
decreases monotonically until the normalized residual passes the tolerance;
a vanishing residual at any iterate is an exact eigenpair and terminates
immediately (lucky breakdown).

Per-iteration diagnostics verify the structural identities the iteration
satisfies: Galerkin orthogonality of the next residual against the search
basis, and the line-search identities relating consecutive iterates through
the deflated polynomial.
"""

import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import rayleigh
from .exceptions import (
    AssumptionViolatedError,
    NoAdmissibleStartError,
    NoRitzValueError,
    NotInDomainError,
)
from .linalg import herm_eig, symmetrize
from .matpoly import deflated_eval, divided_difference, oblique_projection
from .rayleigh import RayleighEvaluation
from .ritz import project, select_smallest_proper

__all__ = [
    "LinesearchReport",
    "SolveResult",
    "SolverConfig",
    "SolverState",
    "StepDiagnostics",
    "TraceRow",
    "build_subspace",
    "check_linesearch_identities",
    "constraint_normalize",
    "solve",
    "step",
]

# status values
RUNNING = "running"
CONVERGED = "converged"
LUCKY_BREAKDOWN = "lucky_breakdown"
MAX_ITERS = "max_iters"
FAILED = "failed"

# residual level at which an iterate counts as an exact eigenpair
LUCKY_BREAKDOWN_FLOOR = 1e-14
# relative drop tolerance for Krylov directions
KRYLOV_DROP_TOL = 1e-12
# monotonicity slack: rho may not increase by more than this, relatively
MONOTONE_SLACK = 1e-12
# start-vector redraw budget
MAX_START_DRAWS = 100


@dataclass(frozen=True)
class SolverConfig:
    """Iteration parameters.

    ``m_e`` is the Krylov extension depth (the Krylov block has dimension
    ``m_e + 1``); ``variant`` selects "locg" (with previous iterate) or "sd"
    (without).  Convergence is declared on the normalized residual, which
    stays informative when the per-step decrease stagnates transiently.
    ``diagnostics_level`` is "off", "cheap" or "full"; the fixed trace
    schema is always populated, "full" additionally evaluates the
    line-search identities and records the projected-derivative positivity
    margin each iteration.  ``lambda1``, when known, fills the
    absolute-error trace column.
    """

    m_e: int = 1
    variant: str = "locg"
    tol: float = 1e-10
    max_iters: int = 500
    seed: int = 0
    diagnostics_level: str = "cheap"
    lambda1: Optional[float] = None

    def __post_init__(self):
        if self.m_e < 1:
            raise ValueError("m_e must be >= 1")
        if self.variant not in ("locg", "sd"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.diagnostics_level not in ("off", "cheap", "full"):
            raise ValueError(f"unknown diagnostics level {self.diagnostics_level!r}")


@dataclass(frozen=True)
class SolverState:
    """One iterate: index, current and previous vectors (constraint
    normalized), the Rayleigh record of the current vector, and the
    iteration status."""

    i: int
    x_curr: np.ndarray
    x_prev: Optional[np.ndarray]
    rho_curr: float
    eval_curr: Optional[RayleighEvaluation]
    status: str = RUNNING
    reason: Optional[str] = None


@dataclass
class TraceRow:
    """Per-iterate diagnostic record (one CSV row).

    ``delta`` is the decrease achieved by the step leaving this iterate
    (zero on the terminal row), ``orth_check`` the Galerkin residual
    ``||Z_i^H r_{i+1}||`` of that step, and ``linesearch_rho_check`` the
    relative error of the value-difference identity when full diagnostics
    are on.
    """

    iter: int
    rho: float
    abs_err: Optional[float]
    delta: float
    residual_norm: float
    normalized_residual: float
    subspace_dim: int
    orth_check: float
    linesearch_rho_check: Optional[float]
    wall_time_s: float


@dataclass(frozen=True)
class LinesearchReport:
    """Relative errors of the consecutive-iterate identities.

    ``rho_identity`` compares rho_next - rho_prev against
    d^H F(rho_next) d / (x^H Phi x); ``r_identity`` compares the residual
    difference against the deflated polynomial applied to d.  The ``orth_*``
    entries are cosines of the next residual against the previous iterate,
    its residual and the iterate before that; the residual one is exact only
    under identity preconditioning, where r_i itself lies in the search
    space (otherwise K r_i does).
    """

    rho_identity: float
    r_identity: Optional[float]
    orth_x_prev: float
    orth_r_prev: float
    orth_x_prev_prev: Optional[float]
    skipped: bool = False
    reason: Optional[str] = None


@dataclass(frozen=True)
class StepDiagnostics:
    """Full-level per-step record: line-search identity errors plus the
    smallest eigenvalue of the projected derivative form Z^H F'(rho_i) Z
    (positive when the rate theory's positivity hypothesis holds; recorded,
    never enforced)."""

    iter: int
    linesearch: LinesearchReport
    fprime_projected_min_eig: float


@dataclass
class SolveResult:
    lambda_hat: float
    x_hat: np.ndarray
    status: str
    iterations: int
    reason: Optional[str] = None
    diagnostics: list = field(default_factory=list)


def constraint_normalize(F, x):
    """Scale x so that x^H A_0 x = 1 (the instance constraint: B-form for
    pencils, A-form for hyperbolic quadratics)."""
    x = np.asarray(x, dtype=complex)
    c = np.vdot(x, F.coeffs[0] @ x).real
    if c <= 0.0:
        raise NotInDomainError("constraint form x^H A_0 x is not positive")
    return x / np.sqrt(c)


def build_subspace(F, K, state, m_e, variant, rng=None, randomize_seed=False):
    """Orthonormal basis of the search subspace at the current iterate.

    The Krylov block is orthogonalized incrementally: each product
    ``K F(rho_i) v`` is orthogonalized against the accumulated basis before
    the next product, and directions whose orthogonal part falls below the
    drop tolerance end the block (the Krylov space became invariant).  For
    "locg" the previous iterate is appended when present, so the dimension
    is at most ``m_e + 2`` ("sd": at most ``m_e + 1``).

    ``randomize_seed`` replaces the Krylov seed by a random direction; the
    solver uses this once when Ritz selection finds no admissible value.
    """
    x = state.x_curr
    F_rho = F.eval(state.rho_curr)
    op_scale = np.linalg.norm(F_rho, 1)
    cols = [x / np.linalg.norm(x)]

    prev = cols[0]
    budget = m_e
    if randomize_seed:
        if rng is None:
            rng = np.random.default_rng(0)
        g = rng.standard_normal(F.n) + 1j * rng.standard_normal(F.n)
        w = g / np.linalg.norm(g)
        for q in cols:
            w = w - q * np.vdot(q, w)
        nrm = np.linalg.norm(w)
        if nrm > KRYLOV_DROP_TOL:
            prev = w / nrm
            cols.append(prev)
            budget = m_e - 1

    for _ in range(max(budget, 0)):
        u = F_rho @ prev
        if np.linalg.norm(u) <= 1e-14 * op_scale * np.linalg.norm(prev):
            break  # residual collapse: the Krylov block stops at span{x}
        w = K.apply(u)
        wnorm0 = np.linalg.norm(w)
        if wnorm0 == 0.0:
            break
        for _ in range(2):
            for q in cols:
                w = w - q * np.vdot(q, w)
        wnorm = np.linalg.norm(w)
        if wnorm <= KRYLOV_DROP_TOL * wnorm0:
            break
        prev = w / wnorm
        cols.append(prev)

    if variant == "locg" and state.x_prev is not None:
        w = state.x_prev.astype(complex).copy()
        wnorm0 = np.linalg.norm(w)
        for _ in range(2):
            for q in cols:
                w = w - q * np.vdot(q, w)
        wnorm = np.linalg.norm(w)
        if wnorm > KRYLOV_DROP_TOL * wnorm0:
            cols.append(w / wnorm)

    return np.column_stack(cols)


def check_linesearch_identities(F, state_prev, state_next, diagnostics_level="full"):
    """Verify the identities linking two consecutive iterates.

    The next iterate is rescaled so that
    ``x_prev^H Phi x_next = x_prev^H Phi x_prev`` (with Phi the divided
    difference at the two functional values), which puts
    ``d = x_next - x_prev`` into the parametrized stationary form the
    identities are stated in.  Relative errors of

    (a) ``rho_next - rho_prev = d^H F(rho_next) d / (x^H Phi x)`` and
    (b) ``r_next - r_prev = deflated(F)(rho_next) d``

    are reported, along with the orthogonality cosines of ``r_next``.  Both
    identities are exact in exact arithmetic for any stationary Ritz step.
    (b) needs a dense deflated evaluation and is only computed at the
    "full" level.  A degenerate rescaling denominator skips the check with
    a flag.
    """
    if diagnostics_level == "off":
        return LinesearchReport(
            rho_identity=0.0, r_identity=None, orth_x_prev=0.0, orth_r_prev=0.0,
            orth_x_prev_prev=None, skipped=True, reason="diagnostics off",
        )
    x = state_prev.x_curr
    rho_prev = state_prev.rho_curr
    rho_next = state_next.rho_curr
    r_prev = state_prev.eval_curr.residual
    r_next = state_next.eval_curr.residual
    x_next = state_next.x_curr

    if np.array_equal(x, x_next) and rho_next == rho_prev:
        # trivial case (lucky breakdown): d = 0 and both sides vanish
        return LinesearchReport(
            rho_identity=0.0,
            r_identity=0.0 if diagnostics_level == "full" else None,
            orth_x_prev=0.0, orth_r_prev=0.0, orth_x_prev_prev=None,
        )

    phi = divided_difference(F, rho_next, rho_prev)
    xphix = np.vdot(x, phi @ x).real
    denom = np.vdot(x, phi @ x_next)
    phi_scale = np.linalg.norm(phi, 1) * np.linalg.norm(x) * np.linalg.norm(x_next)
    if abs(denom) <= 1e-12 * phi_scale:
        return LinesearchReport(
            rho_identity=np.nan, r_identity=None, orth_x_prev=np.nan,
            orth_r_prev=np.nan, orth_x_prev_prev=None, skipped=True,
            reason="degenerate rescaling denominator",
        )
    c = xphix / denom
    xn = c * x_next
    d = xn - x

    lhs = rho_next - rho_prev
    rhs = np.vdot(d, F.eval(rho_next) @ d).real / xphix
    rho_err = abs(lhs - rhs) / max(abs(lhs), np.finfo(float).tiny)

    r_err = None
    if diagnostics_level == "full":
        P = oblique_projection(F, x, rho_next, rho_prev)
        F_defl = deflated_eval(F, rho_next, P)
        diff = c * r_next - r_prev
        pred = F_defl @ d
        r_err = float(
            np.linalg.norm(diff - pred)
            / max(np.linalg.norm(diff), np.finfo(float).tiny)
        )

    def _cos(u, v):
        return float(
            abs(np.vdot(u, v))
            / max(np.linalg.norm(u) * np.linalg.norm(v), np.finfo(float).tiny)
        )

    return LinesearchReport(
        rho_identity=float(rho_err),
        r_identity=r_err,
        orth_x_prev=_cos(r_next, x),
        orth_r_prev=_cos(r_next, r_prev),
        orth_x_prev_prev=(
            _cos(r_next, state_prev.x_prev) if state_prev.x_prev is not None else None
        ),
    )


def _row(state, config, delta=0.0, subspace_dim=1, orth_check=0.0,
         linesearch_rho_check=None, wall_time=0.0):
    ev = state.eval_curr
    abs_err = None if config.lambda1 is None else state.rho_curr - config.lambda1
    return TraceRow(
        iter=state.i,
        rho=state.rho_curr,
        abs_err=abs_err,
        delta=delta,
        residual_norm=ev.residual_norm,
        normalized_residual=ev.normalized_residual,
        subspace_dim=subspace_dim,
        orth_check=orth_check,
        linesearch_rho_check=linesearch_rho_check,
        wall_time_s=wall_time,
    )


def step(F, K, state, config, rng=None):
    """One iteration: subspace, Rayleigh-Ritz, constraint renormalization.

    Returns ``(new_state, trace_row)``.  A residual already at the lucky
    breakdown level returns the unchanged iterate with status
    ``lucky_breakdown`` (it is an eigenpair).  When Ritz selection fails,
    the Krylov seed is re-randomized once; a second failure ends the run
    with status ``failed``.  Monotone decrease of the functional is
    asserted with relative slack 1e-12.
    """
    if state.status != RUNNING:
        raise ValueError(f"cannot step a solver in status {state.status!r}")
    t0 = time.perf_counter()

    lucky_tol = max(config.tol, LUCKY_BREAKDOWN_FLOOR)
    if state.eval_curr.normalized_residual <= lucky_tol:
        new = replace(state, status=LUCKY_BREAKDOWN)
        return new, _row(new, config, wall_time=time.perf_counter() - t0)

    Z = build_subspace(F, K, state, config.m_e, config.variant)
    try:
        sel = select_smallest_proper(project(F, Z), F.interval)
    except NoRitzValueError:
        Z = build_subspace(
            F, K, state, config.m_e, config.variant, rng=rng, randomize_seed=True
        )
        try:
            sel = select_smallest_proper(project(F, Z), F.interval)
        except NoRitzValueError:
            new = replace(
                state, status=FAILED,
                reason="no admissible Ritz value after seed re-randomization",
            )
            return new, _row(new, config, subspace_dim=Z.shape[1],
                             wall_time=time.perf_counter() - t0)

    ev_new = rayleigh.evaluate(F, sel.x)
    slack = MONOTONE_SLACK * (1.0 + abs(state.rho_curr))
    if ev_new.rho > state.rho_curr + slack:
        raise AssumptionViolatedError(
            f"functional increased: {state.rho_curr!r} -> {ev_new.rho!r}"
        )

    new = SolverState(
        i=state.i + 1,
        x_curr=sel.x,
        x_prev=state.x_curr,
        rho_curr=ev_new.rho,
        eval_curr=ev_new,
        status=RUNNING,
    )
    row = _row(
        state, config,
        delta=state.rho_curr - ev_new.rho,
        subspace_dim=Z.shape[1],
        orth_check=float(np.linalg.norm(Z.conj().T @ ev_new.residual)),
        wall_time=time.perf_counter() - t0,
    )
    return new, row


def _projected_derivative_min_eig(F, K, state, config):
    """Smallest eigenvalue of Z^H F'(rho_i) Z on the search basis, the
    congruent form of the rate theory's positivity hypothesis."""
    Z = build_subspace(F, K, state, config.m_e, config.variant)
    small = symmetrize(Z.conj().T @ F.eval_derivative(state.rho_curr) @ Z)
    w, _ = herm_eig(small)
    return float(w[0])


def _draw_start(F, rng):
    for _ in range(MAX_START_DRAWS):
        x = rng.standard_normal(F.n) + 1j * rng.standard_normal(F.n)
        try:
            return constraint_normalize(F, x)
        except NotInDomainError:
            continue
    raise NoAdmissibleStartError(
        f"no admissible start vector in {MAX_START_DRAWS} draws"
    )


def solve(F, K, config=None, x0=None):
    """Run the iteration to convergence.

    Parameters
    ----------
    F : HermMatrixPolynomial
        The problem; degree 1 (pencil) and degree 2 (hyperbolic) instances
        are fully supported.
    K : Preconditioner
        Fixed preconditioner applied inside the Krylov block.
    config : SolverConfig, optional
    x0 : array_like, optional
        Start vector.  When absent, a seeded standard-normal complex vector
        is drawn and re-drawn (at most 100 times) until it admits a
        functional value.

    Returns
    -------
    (SolveResult, list[TraceRow])
        The result carries the final functional value, iterate, status
        ("converged", "lucky_breakdown", "max_iters" or "failed") and, at
        full diagnostics, the per-step identity reports.  The trace has one
        row per visited iterate; the last row is terminal (zero delta).
        Identical problem, config and seed reproduce the trace bit for bit
        except for the wall-time column.
    """
    if config is None:
        config = SolverConfig()
    rng = np.random.default_rng(config.seed)

    if x0 is None:
        x0 = _draw_start(F, rng)
    else:
        x0 = constraint_normalize(F, x0)
    ev0 = rayleigh.evaluate(F, x0)
    state = SolverState(i=0, x_curr=x0, x_prev=None, rho_curr=ev0.rho, eval_curr=ev0)

    rows = []
    diagnostics = []
    while True:
        if state.i > 0 and state.eval_curr.normalized_residual <= config.tol:
            state = replace(state, status=CONVERGED)
            rows.append(_row(state, config))
            break
        if state.i >= config.max_iters:
            state = replace(state, status=MAX_ITERS)
            rows.append(_row(state, config))
            break
        prev = state
        state, row = step(F, K, prev, config, rng)
        if config.diagnostics_level == "full" and state.i == prev.i + 1:
            report = check_linesearch_identities(F, prev, state, "full")
            if not report.skipped:
                row.linesearch_rho_check = report.rho_identity
            diagnostics.append(
                StepDiagnostics(
                    iter=prev.i,
                    linesearch=report,
                    fprime_projected_min_eig=_projected_derivative_min_eig(
                        F, K, prev, config
                    ),
                )
            )
        rows.append(row)
        if state.status != RUNNING:
            break

    result = SolveResult(
        lambda_hat=state.rho_curr,
        x_hat=state.x_curr,
        status=state.status,
        iterations=state.i,
        reason=state.reason,
        diagnostics=diagnostics,
    )
    return result, rows
