"""Proxy-VAR identification by maximum correlation with external instruments.

r structural shocks u = a′ε are aligned with r instruments z by taking the
SVD of Ξ = C_εε^{-1/2} C_εz Λ_w; the singular values measure how much
identifying content each instrument direction carries.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonpositiveWeight,
    NotInFeasibleSet,
    OasisError,
    RankDeficientInstruments,
    SingularSubset,
)
from .matprim import CovLike, CovMatrix, as_cov, corr_from_cov, fix_column_signs, sym_inv_sqrt

FEASIBILITY_TOL = 1e-6
RANK_RTOL = 1e-10


@dataclass(frozen=True)
class ProxyInputs:
    sigma: CovMatrix
    c_eps_z: np.ndarray  # (n, r) corr(ε, z)
    w: np.ndarray  # (r,)

    def __post_init__(self):
        sigma = as_cov(self.sigma)
        c = np.array(self.c_eps_z, dtype=np.float64)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2 or c.shape[0] != sigma.n:
            raise DimensionMismatch(f"C_εz shape {c.shape} does not match n={sigma.n}")
        if c.shape[1] > sigma.n:
            raise DimensionMismatch(f"r={c.shape[1]} instruments exceed n={sigma.n}")
        if np.any(np.abs(c) > 1 + 1e-12):
            raise OasisError("cross-correlations must lie in [-1, 1]")
        w = np.ones(c.shape[1]) if self.w is None else np.array(self.w, dtype=np.float64).reshape(-1)
        if w.shape[0] != c.shape[1]:
            raise DimensionMismatch(f"{w.shape[0]} weights for {c.shape[1]} instruments")
        if not np.all(w > 0):
            raise NonpositiveWeight("instrument weights must be strictly positive")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "c_eps_z", c)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.sigma.n

    @property
    def r(self) -> int:
        return self.c_eps_z.shape[1]

    @classmethod
    def from_samples(cls, eps, z, w=None) -> "ProxyInputs":
        """Build inputs from aligned sample paths of residuals and instruments.

        Both covariances use the plain 1/T moment divisor around sample means.
        """
        eps = np.asarray(eps, dtype=np.float64)
        z = np.asarray(z, dtype=np.float64)
        if z.ndim == 1:
            z = z[:, None]
        if eps.shape[0] != z.shape[0]:
            raise DimensionMismatch(f"{eps.shape[0]} residual rows vs {z.shape[0]} instrument rows")
        ec = eps - eps.mean(axis=0)
        zc = z - z.mean(axis=0)
        T = eps.shape[0]
        sigma = ec.T @ ec / T
        cov_ez = ec.T @ zc / T
        sd_e = np.sqrt(np.diag(sigma))
        sd_z = np.sqrt(np.sum(zc * zc, axis=0) / T)
        if np.any(sd_z == 0):
            raise OasisError("an instrument has zero variance")
        return cls(sigma=CovMatrix(sigma), c_eps_z=cov_ez / np.outer(sd_e, sd_z), w=w)


@dataclass(frozen=True)
class ProxyResult:
    a_star: np.ndarray  # (n, r)
    xi: np.ndarray  # (r,) descending
    objective: float
    full_rank: bool
    U: np.ndarray
    V: np.ndarray


def proxy_oasis(inputs: ProxyInputs) -> ProxyResult:
    cs = corr_from_cov(inputs.sigma)
    c_inv_half = sym_inv_sqrt(cs.C)
    Xi = c_inv_half @ inputs.c_eps_z * inputs.w
    U, xi, Vt = np.linalg.svd(Xi, full_matrices=False)
    V = Vt.T
    signed = fix_column_signs(U)
    flips = np.sign(np.sum(signed * U, axis=0))
    U, V = signed, V * flips
    full_rank = bool(xi[-1] > RANK_RTOL * xi[0]) if xi[0] > 0 else False
    if not full_rank:
        warnings.warn(
            f"instrument correlations are rank deficient (ξ = {np.array2string(xi, precision=3)}); "
            "the maximiser is not unique",
            RankDeficientInstruments,
            stacklevel=2,
        )
    a_star = (c_inv_half @ U @ V.T) / cs.sigma[:, None]
    return ProxyResult(a_star=a_star, xi=xi, objective=float(np.sum(xi)), full_rank=full_rank, U=U, V=V)


def proxy_objective(a, inputs: ProxyInputs) -> float:
    """g(a) = Σ_j w_j corr(a_j′ε, z_j) = tr(a′Λ_σ C_εz Λ_w)."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape != (inputs.n, inputs.r):
        raise DimensionMismatch(f"a has shape {a.shape}, expected {(inputs.n, inputs.r)}")
    S = inputs.sigma.values
    gap = np.linalg.norm(a.T @ S @ a - np.eye(inputs.r))
    if not gap <= FEASIBILITY_TOL:
        raise NotInFeasibleSet(f"‖a′Σa − I‖_F = {gap:.3e} exceeds {FEASIBILITY_TOL:.0e}")
    sd = np.sqrt(np.diag(S))
    return float(np.einsum("ij,ij->", a * sd[:, None], inputs.c_eps_z * inputs.w))


def subset_oasis(sigma: CovLike, subset: Sequence[int], w: Optional[Sequence[float]] = None) -> ProxyResult:
    """OASIS restricted to r chosen reduced-form shocks used as their own instruments."""
    sigma = as_cov(sigma)
    subset = [int(i) for i in subset]
    if len(set(subset)) != len(subset) or not subset:
        raise SingularSubset(f"subset {subset} must be a non-empty list of distinct indices")
    if any(i < 0 or i >= sigma.n for i in subset):
        raise SingularSubset(f"subset {subset} has indices outside 0..{sigma.n - 1}")
    try:
        CovMatrix(sigma.values[np.ix_(subset, subset)])
    except OasisError:
        raise SingularSubset(f"covariance of subset {subset} is singular") from None
    C = corr_from_cov(sigma).C
    return proxy_oasis(ProxyInputs(sigma=sigma, c_eps_z=C[:, subset], w=w))
