"""Least-squares VAR(p) estimation, MA coefficients and local projections."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import CollinearRegressors, DimensionMismatch, InsufficientSample, OasisError
from .matprim import CovMatrix

TRANSFORMS = ("levels", "diff", "log-diff")
MAX_REGRESSOR_COND = 1e12


@dataclass(frozen=True)
class TimeSeriesPanel:
    """Observed series after transformation, one column per variable."""

    names: tuple
    data: np.ndarray
    transforms: tuple = ()
    index: tuple = ()

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise DimensionMismatch(f"panel data must be 2-D, got shape {data.shape}")
        names = tuple(str(s) for s in self.names)
        if len(names) != data.shape[1]:
            raise DimensionMismatch(f"{len(names)} names for {data.shape[1]} columns")
        if len(set(names)) != len(names):
            raise OasisError("variable names must be unique")
        if not np.all(np.isfinite(data)):
            row, col = np.argwhere(~np.isfinite(data))[0]
            raise OasisError(f"non-finite value at row {row}, column {names[col]!r}")
        transforms = tuple(self.transforms) or ("levels",) * len(names)
        if len(transforms) != len(names) or any(t not in TRANSFORMS for t in transforms):
            raise OasisError(f"transforms must be one of {TRANSFORMS} per variable")
        index = tuple(self.index) or tuple(str(i) for i in range(data.shape[0]))
        if len(index) != data.shape[0]:
            raise DimensionMismatch("time index length does not match data rows")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "transforms", transforms)
        object.__setattr__(self, "index", index)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class VarModel:
    p: int
    mu: np.ndarray
    phi: np.ndarray  # (p, n, n); phi[i] is Φ_{i+1}
    residuals: np.ndarray  # (T - p, n), row k is ε at panel row k + p
    sigma: CovMatrix
    names: tuple = ()
    trend: Optional[np.ndarray] = None
    df_adjust: bool = False
    coef: np.ndarray = field(default=None, repr=False)  # (1 [+1] + np, n) stacked OLS coefficients

    @property
    def n(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class MaCoefficients:
    psi: np.ndarray  # (H + 1, n, n)

    @property
    def horizon(self) -> int:
        return self.psi.shape[0] - 1


@dataclass(frozen=True)
class LpResult:
    theta: np.ndarray  # (H + 1, n, n)
    mu: np.ndarray  # (H + 1, n)
    residuals: list  # per-horizon (rows_h, n) arrays e_{t,t+h}

    @property
    def horizon(self) -> int:
        return self.theta.shape[0] - 1


def lag_matrix(data: np.ndarray, p: int, trend: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Regressand rows X_t and regressors Z_{t-1} = (1, [t,] X_{t-1}, ..., X_{t-p}) for t = p..T-1."""
    T = data.shape[0]
    cols = [np.ones((T - p, 1))]
    if trend:
        cols.append(np.arange(p, T, dtype=np.float64)[:, None])
    cols.extend(data[p - i:T - i] for i in range(1, p + 1))
    return data[p:], np.hstack(cols)


def _ols(Y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    ZtZ = Z.T @ Z
    if np.linalg.cond(ZtZ) > MAX_REGRESSOR_COND:
        raise CollinearRegressors(
            f"regressor cross-product condition number {np.linalg.cond(ZtZ):.3e} exceeds {MAX_REGRESSOR_COND:.0e}"
        )
    coef, *_ = np.linalg.lstsq(Z, Y, rcond=None)
    return coef


def estimate_var(
    panel: TimeSeriesPanel,
    p: int,
    trend: bool = False,
    df_adjust: bool = False,
) -> VarModel:
    """Equation-by-equation OLS of X_t on an intercept and p lags.

    The residual covariance uses the divisor T - p unless ``df_adjust`` is
    set, in which case the number of regressors per equation is subtracted too.
    """
    if p < 1:
        raise OasisError(f"lag order must be >= 1, got {p}")
    T, n = panel.data.shape
    if T <= n * p + n + 1:
        raise InsufficientSample(f"T={T} observations, need more than n*p + n + 1 = {n * p + n + 1}")
    Y, Z = lag_matrix(panel.data, p, trend)
    coef = _ols(Y, Z)
    resid = Y - Z @ coef
    k = Z.shape[1]
    divisor = (T - p - k) if df_adjust else (T - p)
    if divisor <= 0:
        raise InsufficientSample("no degrees of freedom left for the covariance")
    S = resid.T @ resid / divisor
    off = 2 if trend else 1
    phi = np.stack([coef[off + i * n: off + (i + 1) * n].T for i in range(p)])
    return VarModel(
        p=p,
        mu=coef[0].copy(),
        phi=phi,
        residuals=resid,
        sigma=CovMatrix(S),
        names=panel.names,
        trend=coef[1].copy() if trend else None,
        df_adjust=df_adjust,
        coef=coef,
    )


def ma_coefficients(model: VarModel, H: int) -> MaCoefficients:
    """Ψ_0 = I and Ψ_h = Σ_{i=1}^{min(h,p)} Φ_i Ψ_{h-i}."""
    if H < 0:
        raise OasisError(f"horizon must be >= 0, got {H}")
    phi = np.asarray(model.phi)
    p, n = phi.shape[0], phi.shape[1]
    psi = np.zeros((H + 1, n, n))
    psi[0] = np.eye(n)
    for h in range(1, H + 1):
        for i in range(1, min(h, p) + 1):
            psi[h] += phi[i - 1] @ psi[h - i]
    return MaCoefficients(psi=psi)


def local_projection(
    panel: TimeSeriesPanel,
    residuals: np.ndarray,
    H: int,
    offset: Optional[int] = None,
) -> LpResult:
    """Regress X_{t+h} on (1, ε_t) separately for h = 0..H.

    ``residuals[k]`` is taken to be ε at panel row ``k + offset``; by default
    the offset aligns the last residual with the last panel row, which is how
    :func:`estimate_var` returns them.
    """
    eps = np.asarray(residuals, dtype=np.float64)
    X = panel.data
    T, n = X.shape
    if eps.ndim != 2 or eps.shape[1] != n:
        raise DimensionMismatch(f"residuals shape {eps.shape} does not match panel with {n} variables")
    if offset is None:
        offset = T - eps.shape[0]
    if offset < 0 or offset + eps.shape[0] > T:
        raise DimensionMismatch("residuals are not time-aligned with the panel")
    if H < 0:
        raise OasisError(f"horizon must be >= 0, got {H}")
    theta = np.zeros((H + 1, n, n))
    mu = np.zeros((H + 1, n))
    errs = []
    for h in range(H + 1):
        rows = min(eps.shape[0], T - offset - h)
        if rows < n + 2:
            raise InsufficientSample(f"horizon {h}: only {max(rows, 0)} usable rows, need {n + 2}")
        Z = np.hstack([np.ones((rows, 1)), eps[:rows]])
        Y = X[offset + h: offset + h + rows]
        coef = _ols(Y, Z)
        mu[h] = coef[0]
        theta[h] = coef[1:].T
        errs.append(Y - Z @ coef)
    return LpResult(theta=theta, mu=mu, residuals=errs)


def simulate_var(
    phi: Sequence[np.ndarray],
    sigma: np.ndarray,
    T: int,
    rng: np.random.Generator,
    mu: Optional[np.ndarray] = None,
    burn: int = 200,
) -> np.ndarray:
    """Draw T observations from a Gaussian VAR(p) after a burn-in period."""
    phi = np.asarray(phi, dtype=np.float64)
    p, n = phi.shape[0], phi.shape[1]
    mu = np.zeros(n) if mu is None else np.asarray(mu, dtype=np.float64)
    L = np.linalg.cholesky(np.asarray(sigma, dtype=np.float64))
    shocks = rng.standard_normal((T + burn, n)) @ L.T
    X = np.zeros((T + burn + p, n))
    for t in range(p, T + burn + p):
        X[t] = mu + shocks[t - p]
        for i in range(p):
            X[t] += phi[i] @ X[t - 1 - i]
    return X[p + burn:]
