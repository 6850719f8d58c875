"""Symmetric-matrix primitives.

Everything here works on dense float64 arrays. Eigendecompositions are
returned with eigenvalues in descending order and each eigenvector column
signed so that its largest-magnitude entry is positive (first index wins
ties), which makes every derived matrix reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEigenvalue,
    NotPositiveDefinite,
    NotSymmetric,
)

SYMMETRY_RTOL = 1e-12
EPS = np.finfo(np.float64).eps


def _square(S, name: str = "matrix") -> np.ndarray:
    S = np.array(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {S.shape}")
    return S


def _symmetric(S, name: str = "matrix") -> np.ndarray:
    S = _square(S, name)
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T), initial=0.0) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise NotSymmetric(f"{name} is not symmetric")
    return 0.5 * (S + S.T)


def pd_threshold(eigvals: np.ndarray) -> float:
    """Eigenvalues at or below this value count as zero."""
    n = eigvals.shape[0]
    return n * EPS * float(np.max(eigvals))


def fix_column_signs(V: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude entry of each is positive."""
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def eigh_desc(S) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix, descending, sign-normalized."""
    S = _symmetric(S)
    lam, Q = np.linalg.eigh(S)
    lam = lam[::-1].copy()
    Q = fix_column_signs(Q[:, ::-1])
    return lam, Q


@dataclass(frozen=True)
class CovMatrix:
    """A validated positive definite covariance matrix."""

    values: np.ndarray

    def __post_init__(self):
        S = _symmetric(self.values, "covariance")
        lam = np.linalg.eigvalsh(S)
        if S.shape[0] == 0 or lam[0] <= pd_threshold(lam):
            raise NotPositiveDefinite(
                f"covariance is not positive definite (min eigenvalue {lam[0]:.3e})"
            )
        S.setflags(write=False)
        object.__setattr__(self, "values", S)

    @property
    def n(self) -> int:
        return self.values.shape[0]


CovLike = Union[CovMatrix, np.ndarray, list]


def as_cov(sigma: CovLike) -> CovMatrix:
    return sigma if isinstance(sigma, CovMatrix) else CovMatrix(sigma)


@dataclass(frozen=True)
class CorrStructure:
    C: np.ndarray
    sigma: np.ndarray
    eigvalues: np.ndarray
    eigvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.C.shape[0]


def corr_from_cov(sigma_mat: CovLike) -> CorrStructure:
    """Split a covariance into correlations and standard deviations."""
    S = as_cov(sigma_mat).values
    sd = np.sqrt(np.diag(S))
    C = S / np.outer(sd, sd)
    C = np.clip(0.5 * (C + C.T), -1.0, 1.0)
    np.fill_diagonal(C, 1.0)
    lam, Q = eigh_desc(C)
    if lam[-1] <= pd_threshold(lam):
        raise NotPositiveDefinite("correlation matrix is not positive definite")
    return CorrStructure(C=C, sigma=sd, eigvalues=lam, eigvectors=Q)


def sym_sqrt(S) -> np.ndarray:
    """Symmetric PSD square root Q Λ^{1/2} Q′."""
    lam, Q = eigh_desc(S)
    if lam[-1] < -pd_threshold(np.abs(lam)):
        raise NegativeEigenvalue(f"matrix has negative eigenvalue {lam[-1]:.3e}")
    root = (Q * np.sqrt(np.clip(lam, 0.0, None))) @ Q.T
    return 0.5 * (root + root.T)


def sym_inv_sqrt(S) -> np.ndarray:
    """Symmetric inverse square root Q Λ^{-1/2} Q′ of a positive definite matrix."""
    lam, Q = eigh_desc(S)
    if lam[-1] <= pd_threshold(lam):
        raise NotPositiveDefinite(f"matrix is not positive definite (min eigenvalue {lam[-1]:.3e})")
    root = (Q / np.sqrt(lam)) @ Q.T
    return 0.5 * (root + root.T)


def cholesky_lower(S: CovLike) -> np.ndarray:
    """Lower-triangular L with positive diagonal and LL′ = S."""
    S = as_cov(S).values
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def cholesky_upper(S: CovLike) -> np.ndarray:
    """Upper-triangular U with positive diagonal and UU′ = S.

    Computed column by column from the last variable backwards.
    """
    S = as_cov(S).values
    n = S.shape[0]
    U = np.zeros_like(S)
    for j in range(n - 1, -1, -1):
        tail = U[j, j + 1:]
        d = S[j, j] - tail @ tail
        if d <= 0:
            raise NotPositiveDefinite("pivot became non-positive in upper factorization")
        U[j, j] = np.sqrt(d)
        U[:j, j] = (S[:j, j] - U[:j, j + 1:] @ tail) / U[j, j]
    return U


def is_orthonormal(R, tol: float = 1e-10) -> bool:
    R = np.asarray(R, dtype=np.float64)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        return False
    return bool(np.max(np.abs(R.T @ R - np.eye(R.shape[0]))) <= tol)


def equicorrelation(n: int, rho: float) -> np.ndarray:
    C = np.full((n, n), float(rho))
    np.fill_diagonal(C, 1.0)
    return C
