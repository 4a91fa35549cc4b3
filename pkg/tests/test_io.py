import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import polyeig.io as pio
from polyeig import ParseError, SolverConfig, solve, wiresaw1
from polyeig.solver import TraceRow

from conftest import random_hermitian


def test_matrix_market_roundtrip_diagonal(tmp_path):
    path = tmp_path / "diag.mtx"
    M = np.diag([1.0, 2.0]).astype(complex)
    pio.write_matrix_market(M, path)
    text = path.read_text().splitlines()
    assert text[0] == "%%MatrixMarket matrix coordinate complex hermitian"
    assert text[1].split() == ["2", "2", "2"]
    back = pio.read_matrix_market(path)
    assert np.array_equal(back, M)


def test_matrix_market_roundtrip_wiresaw_b(tmp_path):
    # purely imaginary off-diagonal entries survive bit exactly
    B = wiresaw1(4, 0.1).polynomial.coeffs[1]
    path = tmp_path / "B.mtx"
    pio.write_matrix_market(B, path)
    back = pio.read_matrix_market(path)
    assert np.array_equal(back, B)


def test_matrix_market_roundtrip_random(tmp_path, rng):
    M = random_hermitian(rng, 7)
    path = tmp_path / "M.mtx"
    pio.write_matrix_market(M, path)
    back = pio.read_matrix_market(path)
    assert np.array_equal(back, M)


def test_matrix_market_rejects_upper_triangle_entry(tmp_path):
    path = tmp_path / "bad.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate complex hermitian\n"
        "2 2 1\n"
        "1 2 1.0 0.0\n"
    )
    with pytest.raises(ParseError) as err:
        pio.read_matrix_market(path)
    assert err.value.line == 3


def test_matrix_market_rejects_imaginary_diagonal(tmp_path):
    path = tmp_path / "bad.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate complex hermitian\n"
        "1 1 1\n"
        "1 1 1.0 0.5\n"
    )
    with pytest.raises(ParseError):
        pio.read_matrix_market(path)


def test_matrix_market_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.mtx"
    path.write_text("%%MatrixMarket matrix coordinate complex skew-symmetric\n0 0 0\n")
    with pytest.raises(ParseError):
        pio.read_matrix_market(path)


def test_matrix_market_rejects_shape_mismatch(tmp_path):
    path = tmp_path / "bad.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate complex hermitian\n"
        "2 2 2\n"
        "1 1 1.0 0.0\n"
    )
    with pytest.raises(ParseError):
        pio.read_matrix_market(path)


def test_matrix_market_reads_array_format(tmp_path):
    path = tmp_path / "arr.mtx"
    path.write_text(
        "%%MatrixMarket matrix array real symmetric\n"
        "2 2\n"
        "1.5\n"
        "2.5\n"
        "-3.5\n"
    )
    M = pio.read_matrix_market(path)
    assert_allclose(M, [[1.5, 2.5], [2.5, -3.5]])


def test_matrix_market_reads_general_when_hermitian(tmp_path):
    path = tmp_path / "gen.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate complex general\n"
        "2 2 4\n"
        "1 1 1.0 0.0\n"
        "2 2 2.0 0.0\n"
        "1 2 0.0 1.0\n"
        "2 1 0.0 -1.0\n"
    )
    M = pio.read_matrix_market(path)
    assert_allclose(M, [[1.0, 1.0j], [-1.0j, 2.0]])


def test_matrix_market_rejects_non_hermitian_general(tmp_path):
    path = tmp_path / "gen.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 2\n"
        "1 2 1.0\n"
        "2 1 5.0\n"
    )
    with pytest.raises(ParseError):
        pio.read_matrix_market(path)


def _sample_rows():
    return [
        TraceRow(iter=0, rho=4.1882588699534997, abs_err=None, delta=0.5,
                 residual_norm=1.25e-3, normalized_residual=7.5e-6,
                 subspace_dim=3, orth_check=3.2e-15, linesearch_rho_check=None,
                 wall_time_s=0.001),
        TraceRow(iter=1, rho=1.0000000012, abs_err=1.2e-9, delta=0.0,
                 residual_norm=2.2e-11, normalized_residual=4.4e-13,
                 subspace_dim=1, orth_check=0.0, linesearch_rho_check=5.5e-9,
                 wall_time_s=0.0009),
    ]


def test_trace_roundtrip_bit_exact(tmp_path):
    path = tmp_path / "t.csv"
    rows = _sample_rows()
    pio.write_trace(rows, path)
    back = pio.read_trace(path)
    assert back == rows


def test_trace_rejects_empty():
    with pytest.raises(ValueError):
        pio.write_trace([], "/tmp/never.csv")


def test_trace_determinism_modulo_wall_time(tmp_path, hyper10, hyper10_K):
    cfg = SolverConfig(tol=1e-10, seed=123)
    _, tr1 = solve(hyper10.polynomial, hyper10_K, cfg)
    _, tr2 = solve(hyper10.polynomial, hyper10_K, cfg)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    pio.write_trace(tr1, p1)
    pio.write_trace(tr2, p2)
    strip = lambda text: [line.rsplit(",", 1)[0] for line in text.splitlines()]
    assert strip(p1.read_text()) == strip(p2.read_text())


def test_metadata_roundtrip(tmp_path):
    path = tmp_path / "m.meta"
    meta = {
        "kind": "hyperbolic",
        "degree": 2,
        "n": 10,
        "interval_min": 0.0,
        "interval_max": math.inf,
        "nu": 0.1,
        "certified": True,
        "spectrum": "pm1..10",
    }
    pio.write_metadata(meta, path)
    back = pio.read_metadata(path)
    assert back["kind"] == "hyperbolic"
    assert back["degree"] == 2
    assert back["interval_max"] == math.inf
    assert back["nu"] == 0.1
    assert back["certified"] is True
    assert back["spectrum"] == "pm1..10"


def test_problem_roundtrip(tmp_path, hyper10):
    directory = tmp_path / "prob"
    pio.save_problem(hyper10, directory)
    back = pio.load_problem(directory)
    assert back.kind == hyper10.kind
    assert back.known_lambda1 == hyper10.known_lambda1
    F0, F1 = hyper10.polynomial, back.polynomial
    assert F1.interval.lo == F0.interval.lo
    assert F1.interval.hi == F0.interval.hi
    for A0, A1 in zip(F0.coeffs, F1.coeffs):
        assert np.array_equal(A0, A1)
    assert back.metadata["generator"] == "prescribed_hyperbolic"
