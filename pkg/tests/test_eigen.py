import time

import numpy as np
import pytest

from app.errors import ConfigurationError, ConvergenceError
from app.services.eigen import ql_implicit, symmetric_eigenvalues, tridiagonalize


def random_symmetric(n, seed):
    a = np.random.default_rng(seed).standard_normal((n, n))
    return (a + a.T) / 2


def test_identity_and_diagonal():
    np.testing.assert_array_equal(symmetric_eigenvalues(np.eye(2)), [1.0, 1.0])
    np.testing.assert_allclose(symmetric_eigenvalues(np.diag([3.0, 1.0, 2.0])), [3.0, 2.0, 1.0])


def test_trace_and_residuals_6x6():
    M = random_symmetric(6, 0)
    values = symmetric_eigenvalues(M)
    assert values.sum() == pytest.approx(np.trace(M), abs=1e-10)
    for lam in values:
        # smallest singular value of M - lam I bounds min ||Mv - lam v|| over unit v
        sigma = np.linalg.svd(M - lam * np.eye(6), compute_uv=False).min()
        assert sigma <= 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 10, 40])
def test_agrees_with_lapack(n):
    M = random_symmetric(n, n)
    np.testing.assert_allclose(symmetric_eigenvalues(M), np.linalg.eigvalsh(M)[::-1], atol=1e-10)


def test_tridiagonal_form_preserves_spectrum():
    M = random_symmetric(8, 3)
    diagonal, off = tridiagonalize(M)
    T = np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1)
    np.testing.assert_allclose(np.linalg.eigvalsh(T), np.linalg.eigvalsh(M), atol=1e-12)


@pytest.mark.parametrize("n, panel", [(70, 32), (70, 1), (45, 7), (33, 32), (34, 32)])
def test_panelled_reduction_preserves_spectrum(n, panel):
    M = random_symmetric(n, 10 + n)
    diagonal, off = tridiagonalize(M, panel=panel)
    T = np.diag(diagonal) + np.diag(off, 1) + np.diag(off, -1)
    np.testing.assert_allclose(np.linalg.eigvalsh(T), np.linalg.eigvalsh(M), atol=1e-10)


def test_panel_width_does_not_change_the_reduction():
    M = random_symmetric(50, 4)
    d1, e1 = tridiagonalize(M, panel=1)
    d32, e32 = tridiagonalize(M, panel=32)
    np.testing.assert_allclose(d32, d1, atol=1e-12)
    np.testing.assert_allclose(e32, e1, atol=1e-12)


def test_walk_sized_matrix_reduces_quickly():
    M = random_symmetric(600, 8)
    start = time.perf_counter()
    values = symmetric_eigenvalues(M, backend="householder_ql")
    assert time.perf_counter() - start < 20.0
    np.testing.assert_allclose(values, np.linalg.eigvalsh(M)[::-1], atol=1e-9)


def test_sweep_cap_raises():
    diagonal, off = tridiagonalize(random_symmetric(5, 1))
    with pytest.raises(ConvergenceError):
        ql_implicit(diagonal, off, tol=1e-12, max_sweeps=0)


def test_lapack_backend(monkeypatch):
    monkeypatch.setenv("RGG_EIGEN_BACKEND", "lapack")
    M = random_symmetric(7, 5)
    np.testing.assert_array_equal(symmetric_eigenvalues(M), np.linalg.eigvalsh(M)[::-1])


def test_unknown_backend():
    with pytest.raises(ConfigurationError):
        symmetric_eigenvalues(np.eye(2), backend="arpack")
