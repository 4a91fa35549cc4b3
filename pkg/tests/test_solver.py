import dataclasses

import numpy as np
import pytest
from numpy.testing import assert_allclose

import polyeig.solver as solver
from polyeig import (
    HermMatrixPolynomial,
    Interval,
    Preconditioner,
    SolverConfig,
    bisect_lambda1,
    build_subspace,
    check_linesearch_identities,
    coefficient_preconditioner,
    herm_eig,
    prescribed_hyperbolic,
    solve,
    step,
    symmetric_spectrum,
    wiresaw1,
)
from polyeig.solver import constraint_normalize

from conftest import random_unit


def make_state(F, x, x_prev=None):
    from polyeig import rayleigh

    x = constraint_normalize(F, x)
    ev = rayleigh.evaluate(F, x)
    return solver.SolverState(
        i=0 if x_prev is None else 1,
        x_curr=x,
        x_prev=None if x_prev is None else constraint_normalize(F, x_prev),
        rho_curr=ev.rho,
        eval_curr=ev,
    )


def eigvec_of_lambda1(F, lam):
    w, V = herm_eig(F.eval(lam))
    return V[:, np.argmin(np.abs(w))]


def test_build_subspace_dimensions(hyper10, hyper10_K, rng):
    F = hyper10.polynomial
    x = random_unit(rng, F.n)
    st0 = make_state(F, x)
    Z0 = build_subspace(F, hyper10_K, st0, m_e=1, variant="locg")
    assert Z0.shape[1] <= 2  # no previous iterate yet
    st1 = make_state(F, x, x_prev=random_unit(rng, F.n))
    Z1 = build_subspace(F, hyper10_K, st1, m_e=1, variant="locg")
    assert Z1.shape[1] <= 3
    Zsd = build_subspace(F, hyper10_K, st1, m_e=1, variant="sd")
    assert Zsd.shape[1] <= 2
    Z2 = build_subspace(F, hyper10_K, st1, m_e=3, variant="locg")
    assert Z2.shape[1] <= 5
    assert np.linalg.norm(Z2.conj().T @ Z2 - np.eye(Z2.shape[1])) <= 1e-12 * Z2.shape[1]


def test_build_subspace_collapses_at_eigenvector(hyper10, hyper10_K, rng):
    F = hyper10.polynomial
    u = eigvec_of_lambda1(F, 1.0)
    st = make_state(F, u, x_prev=random_unit(rng, F.n))
    Z = build_subspace(F, hyper10_K, st, m_e=2, variant="locg")
    assert Z.shape[1] == 2  # {x_i} plus x_{i-1}: the Krylov block collapsed


def test_step_lucky_breakdown_at_exact_eigenvector(hyper10, hyper10_K):
    F = hyper10.polynomial
    u = eigvec_of_lambda1(F, 1.0)
    res, trace = solve(F, hyper10_K, SolverConfig(seed=0), x0=u)
    assert res.status == "lucky_breakdown"
    assert res.iterations == 0
    assert len(trace) == 1
    assert res.lambda_hat == pytest.approx(1.0, abs=1e-10)


def test_step_strict_decrease(rng):
    bundle = prescribed_hyperbolic(4, [1.0, 2.0, 3.0, 4.0], [-1.0, -2.0, -3.0, -4.0],
                                   seed=42)
    F = bundle.polynomial
    K = Preconditioner.identity(4)
    st = make_state(F, random_unit(rng, 4))
    new, row = step(F, K, st, SolverConfig(m_e=1, seed=42))
    assert new.rho_curr < st.rho_curr
    assert row.delta > 0.0


def test_locg_step_dominates_sd_step(hyper10, hyper10_K, rng):
    F = hyper10.polynomial
    cfg_locg = SolverConfig(m_e=1, variant="locg", seed=0)
    cfg_sd = SolverConfig(m_e=1, variant="sd", seed=0)
    for _ in range(10):
        st = make_state(F, random_unit(rng, F.n), x_prev=random_unit(rng, F.n))
        locg_state, _ = step(F, hyper10_K, st, cfg_locg)
        sd_state, _ = step(F, hyper10_K, st, cfg_sd)
        assert locg_state.rho_curr <= sd_state.rho_curr + 1e-12 * (1 + abs(sd_state.rho_curr))


def test_solve_prescribed_hyperbolic(hyper10, hyper10_K):
    res, trace = solve(F := hyper10.polynomial, hyper10_K,
                       SolverConfig(m_e=1, tol=1e-10, seed=42))
    assert res.status == "converged"
    assert res.lambda_hat == pytest.approx(1.0, abs=1e-8)
    assert trace[-1].normalized_residual <= 1e-10


def test_solve_standard_pencil():
    # lambda I - diag(1..5): plain symmetric eigenproblem
    A = np.diag(np.arange(1.0, 6.0))
    F = HermMatrixPolynomial([np.eye(5), -A], Interval(0.0))
    res, _ = solve(F, Preconditioner.identity(5), SolverConfig(seed=1))
    assert res.status == "converged"
    assert res.lambda_hat == pytest.approx(1.0, abs=1e-9)


def test_solve_wiresaw_inner_cg_matches_bisection():
    bundle = wiresaw1(50, 0.1)
    F = bundle.polynomial
    K = coefficient_preconditioner(F, inexact=True, rel_tol=0.1, max_steps=10)
    res, _ = solve(F, K, SolverConfig(m_e=1, tol=1e-10, seed=3))
    assert res.status == "converged"
    lam = bisect_lambda1(F, tol=1e-10)
    assert res.lambda_hat == pytest.approx(lam, abs=1e-8)


def test_monotonicity_and_trace_invariants(hyper10, hyper10_K):
    res, trace = solve(hyper10.polynomial, hyper10_K,
                       SolverConfig(tol=1e-10, seed=9, lambda1=1.0))
    rhos = [row.rho for row in trace]
    for a, b in zip(rhos, rhos[1:]):
        assert b <= a + 1e-12 * (1 + abs(a))
    for row in trace:
        assert row.delta >= -1e-12 * (1 + abs(row.rho))
        assert row.abs_err == pytest.approx(row.rho - 1.0)


def test_galerkin_orthogonality(hyper10, hyper10_K):
    F = hyper10.polynomial
    res, trace = solve(F, hyper10_K, SolverConfig(tol=1e-10, seed=5))
    for row in trace[:-1]:
        scale = F.coefficient_scale(row.rho)
        assert row.orth_check <= 1e-8 * scale


def test_determinism_bit_identical(hyper10, hyper10_K):
    cfg = SolverConfig(tol=1e-10, seed=77)
    res1, tr1 = solve(hyper10.polynomial, hyper10_K, cfg)
    res2, tr2 = solve(hyper10.polynomial, hyper10_K, cfg)
    assert res1.lambda_hat == res2.lambda_hat
    assert len(tr1) == len(tr2)
    for a, b in zip(tr1, tr2):
        da = dataclasses.asdict(a)
        db = dataclasses.asdict(b)
        da.pop("wall_time_s")
        db.pop("wall_time_s")
        assert da == db


def test_max_iters_status(hyper10, hyper10_K):
    res, trace = solve(hyper10.polynomial, hyper10_K,
                       SolverConfig(tol=1e-10, max_iters=2, seed=4))
    assert res.status == "max_iters"
    assert res.iterations == 2
    assert trace[-1].delta == 0.0


def test_solve_rejects_inadmissible_x0(pencil10):
    from polyeig import NotInDomainError

    F = pencil10.polynomial
    wB, VB = herm_eig(F.coeffs[0])
    x_bad = VB[:, 0]  # most negative B eigendirection: x^H B x < 0
    assert np.vdot(x_bad, F.coeffs[0] @ x_bad).real < 0
    with pytest.raises(NotInDomainError):
        solve(F, Preconditioner.identity(F.n), SolverConfig(seed=0), x0=x_bad)


def test_linesearch_identities_converged_regime(hyper10):
    # identity preconditioner keeps many iterations in the healthy window
    F = hyper10.polynomial
    K = Preconditioner.identity(F.n)
    cfg = SolverConfig(tol=1e-5, seed=21, diagnostics_level="full", lambda1=1.0)
    res, trace = solve(F, K, cfg)
    assert res.status == "converged"
    assert res.diagnostics, "full diagnostics must produce reports"
    window = [
        d for row, d in zip(trace, res.diagnostics)
        if row.abs_err is not None and row.abs_err <= 1e-3
    ]
    assert window
    for d in window:
        assert not d.linesearch.skipped
        assert d.linesearch.rho_identity <= 1e-6
        assert d.linesearch.r_identity <= 1e-6
        # identity K puts r_i in the search space: next residual orthogonal
        assert d.linesearch.orth_x_prev <= 1e-8
        assert d.linesearch.orth_r_prev <= 1e-8
        assert d.fprime_projected_min_eig > 0.0


def test_linesearch_identities_pencil_reduction(pencil10, pencil10_K):
    # for a pencil the divided difference is constant (Phi = B) and the value
    # identity reduces to the classical Rayleigh-quotient difference formula
    F = pencil10.polynomial
    cfg = SolverConfig(tol=1e-6, seed=13, diagnostics_level="full",
                       lambda1=pencil10.known_lambda1)
    res, trace = solve(F, pencil10_K, cfg)
    assert res.status == "converged"
    healthy = [
        d for row, d in zip(trace, res.diagnostics)
        if row.abs_err is not None and 1e-9 <= row.abs_err <= 1e-2
    ]
    assert healthy
    for d in healthy:
        assert d.linesearch.rho_identity <= 1e-6


def test_linesearch_trivial_case(hyper10):
    F = hyper10.polynomial
    u = eigvec_of_lambda1(F, 1.0)
    st = make_state(F, u)
    report = check_linesearch_identities(F, st, st, "full")
    assert report.rho_identity == 0.0
    assert report.r_identity == 0.0


def test_trace_linesearch_column_filled_at_full(hyper10, hyper10_K):
    cfg = SolverConfig(tol=1e-8, seed=3, diagnostics_level="full")
    res, trace = solve(hyper10.polynomial, hyper10_K, cfg)
    stepped = trace[:-1]
    assert any(row.linesearch_rho_check is not None for row in stepped)
    cfg_cheap = SolverConfig(tol=1e-8, seed=3, diagnostics_level="cheap")
    res2, trace2 = solve(hyper10.polynomial, hyper10_K, cfg_cheap)
    assert all(row.linesearch_rho_check is None for row in trace2)
