"""Shared fixtures: the canonical problem instances most tests run against."""

import numpy as np
import pytest

from polyeig import (
    HermMatrixPolynomial,
    Interval,
    coefficient_preconditioner,
    definite_pencil,
    prescribed_hyperbolic,
    symmetric_spectrum,
    wiresaw1,
)


@pytest.fixture(scope="session")
def hyper10():
    """Hyperbolic quadratic with spectrum +-1..+-10 (lambda1 = 1 exactly)."""
    return prescribed_hyperbolic(10, *symmetric_spectrum(10), seed=7)


@pytest.fixture(scope="session")
def hyper10_K(hyper10):
    return coefficient_preconditioner(hyper10.polynomial)


@pytest.fixture(scope="session")
def pencil10():
    """Definite pencil, positive-type eigenvalues 1..5 plus five negative-type."""
    return definite_pencil(10, np.arange(1.0, 6.0), seed=5)


@pytest.fixture(scope="session")
def pencil10_K(pencil10):
    return coefficient_preconditioner(pencil10.polynomial)


@pytest.fixture(scope="session")
def wiresaw20():
    return wiresaw1(20, 0.1)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def diag_pencil3():
    """lambda I - diag(1, 2, 3) on (0, inf): the textbook standard problem."""
    A = np.diag([1.0, 2.0, 3.0])
    return HermMatrixPolynomial([np.eye(3), -A], Interval(0.0))


def random_hermitian(rng, n, scale=1.0):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (Z + Z.conj().T)


def random_unit(rng, n):
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)
