import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oasis_svar.errors import NegativeEigenvalue, NotPositiveDefinite, NotSymmetric
from oasis_svar.matprim import (
    CovMatrix,
    cholesky_lower,
    cholesky_upper,
    corr_from_cov,
    eigh_desc,
    equicorrelation,
    fix_column_signs,
    is_orthonormal,
    sym_inv_sqrt,
    sym_sqrt,
)

from _gen import random_pd


def test_corr_from_cov_identity():
    cs = corr_from_cov(np.eye(3))
    assert np.array_equal(cs.C, np.eye(3))
    assert np.array_equal(cs.sigma, np.ones(3))


def test_corr_from_cov_two_by_two():
    cs = corr_from_cov(np.array([[4.0, 1.0], [1.0, 1.0]]))
    assert np.allclose(cs.C, [[1.0, 0.5], [0.5, 1.0]], atol=1e-15)
    assert np.allclose(cs.sigma, [2.0, 1.0], atol=1e-15)


def test_corr_from_cov_singular_rejected():
    with pytest.raises(NotPositiveDefinite):
        corr_from_cov(np.array([[4.0, 2.0], [2.0, 1.0]]))


def test_corr_from_cov_asymmetric_rejected():
    with pytest.raises(NotSymmetric):
        corr_from_cov(np.array([[1.0, 0.2], [0.3, 1.0]]))


def test_eigen_ordering_and_signs(rng):
    S = random_pd(rng, 6)
    lam, Q = eigh_desc(S)
    assert np.all(np.diff(lam) <= 0)
    idx = np.argmax(np.abs(Q), axis=0)
    assert np.all(Q[idx, np.arange(6)] > 0)
    assert np.allclose((Q * lam) @ Q.T, S, atol=1e-12 * np.abs(S).max())


def test_fix_column_signs_first_index_wins_ties():
    V = np.array([[-1.0, 0.5], [1.0, -0.5]])
    out = fix_column_signs(V)
    assert np.array_equal(out, [[1.0, 0.5], [-1.0, -0.5]])


def test_sym_sqrt_examples():
    assert np.allclose(sym_sqrt(np.eye(4)), np.eye(4), atol=1e-15)
    assert np.allclose(sym_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    S = np.array([[1.0, 0.5], [0.5, 1.0]])
    M = sym_sqrt(S)
    assert np.allclose(M @ M, S, atol=1e-12)
    assert np.array_equal(M, M.T)


def test_sym_sqrt_errors():
    with pytest.raises(NotSymmetric):
        sym_sqrt(np.array([[1.0, 0.2], [0.1, 1.0]]))
    with pytest.raises(NegativeEigenvalue):
        sym_sqrt(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_sym_inv_sqrt_examples():
    assert np.allclose(sym_inv_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    assert np.allclose(sym_inv_sqrt(np.diag([4.0, 0.25])), np.diag([0.5, 2.0]), atol=1e-14)
    C = equicorrelation(3, 0.5)
    X = sym_inv_sqrt(C)
    assert np.allclose(X @ C @ X, np.eye(3), atol=1e-10)
    with pytest.raises(NotPositiveDefinite):
        sym_inv_sqrt(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_cholesky_examples():
    assert np.array_equal(cholesky_lower(np.eye(3)), np.eye(3))
    assert np.allclose(cholesky_lower(np.array([[4.0, 2.0], [2.0, 2.0]])), [[2.0, 0.0], [1.0, 1.0]], atol=1e-15)
    L = cholesky_lower(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert np.allclose(L, [[1.0, 0.0], [0.5, np.sqrt(0.75)]], atol=1e-15)
    with pytest.raises(NotPositiveDefinite):
        cholesky_lower(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_cholesky_upper(rng):
    for n in range(1, 8):
        S = random_pd(rng, n)
        U = cholesky_upper(S)
        assert np.array_equal(U, np.triu(U))
        assert np.all(np.diag(U) > 0)
        assert np.allclose(U @ U.T, S, atol=1e-12 * np.abs(S).max())


def test_cov_matrix_read_only():
    S = CovMatrix(np.eye(2))
    with pytest.raises(ValueError):
        S.values[0, 0] = 2.0


def test_random_pd_battery(rng):
    """Square roots and factors over 1000 random PD matrices of dimension 2..12."""
    worst = dict(sqrt=0.0, inv=0.0, chol=0.0, sym=0.0)
    for _ in range(1000):
        n = int(rng.integers(2, 13))
        S = random_pd(rng, n, m=n + int(rng.integers(1, 3 * n)))
        nS = np.linalg.norm(S)
        M = sym_sqrt(S)
        X = sym_inv_sqrt(S)
        L = cholesky_lower(S)
        worst["sqrt"] = max(worst["sqrt"], np.linalg.norm(M @ M - S) / nS)
        worst["inv"] = max(worst["inv"], np.linalg.norm(X @ S @ X - np.eye(n)) / np.linalg.cond(S))
        worst["chol"] = max(worst["chol"], np.linalg.norm(L @ L.T - S) / nS)
        worst["sym"] = max(worst["sym"], np.abs(M - M.T).max(), np.abs(X - X.T).max())
    assert worst["sqrt"] < 1e-12
    assert worst["inv"] < 1e-12
    assert worst["chol"] < 1e-14
    assert worst["sym"] == 0.0


def test_is_orthonormal():
    th = 0.3
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert is_orthonormal(R)
    assert not is_orthonormal(2 * R)
    assert not is_orthonormal(np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(2, 8),
    exps=st.lists(st.integers(-6, 6), min_size=8, max_size=8),
)
def test_scale_equivariance_power_of_two(seed, n, exps):
    rng = np.random.default_rng(seed)
    S = random_pd(rng, n, scale=False)
    D = 2.0 ** np.array(exps[:n], dtype=float)
    a = corr_from_cov(S)
    b = corr_from_cov(S * np.outer(D, D))
    assert np.array_equal(a.C, b.C)
    assert np.array_equal(a.sigma * D, b.sigma)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 8))
def test_scale_equivariance_general(seed, n):
    rng = np.random.default_rng(seed)
    S = random_pd(rng, n, scale=False)
    D = np.exp(rng.normal(scale=2.0, size=n))
    a = corr_from_cov(S)
    b = corr_from_cov(S * np.outer(D, D))
    assert np.max(np.abs(a.C - b.C)) <= 1e-14
    assert np.max(np.abs(a.sigma * D / b.sigma - 1)) <= 1e-14
