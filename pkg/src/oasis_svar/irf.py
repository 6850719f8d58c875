"""Structural impulse responses and their rotation between schemes."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import DimensionMismatch, NotOrthonormal
from .ident import IdentificationResult
from .matprim import is_orthonormal
from .var_engine import LpResult, MaCoefficients

DEFAULT_HORIZON = 40


@dataclass(frozen=True)
class IrfSet:
    """values[h, i, j]: response of variable i at horizon h to a one-sd shock j."""

    values: np.ndarray
    scheme: str
    horizon: int


def _impact(ident: Union[IdentificationResult, np.ndarray]) -> tuple[np.ndarray, str]:
    if isinstance(ident, IdentificationResult):
        return ident.B, ident.scheme
    return np.asarray(ident, dtype=np.float64), "custom"


def _compose(coefs: np.ndarray, ident) -> IrfSet:
    B, scheme = _impact(ident)
    if coefs.shape[2] != B.shape[0] or B.ndim != 2:
        raise DimensionMismatch(f"coefficients of size {coefs.shape[1:]} vs impact matrix {B.shape}")
    return IrfSet(values=coefs @ B, scheme=scheme, horizon=coefs.shape[0] - 1)


def structural_irf(ma: MaCoefficients, ident) -> IrfSet:
    """IRF(h) = Ψ_h B."""
    return _compose(np.asarray(ma.psi), ident)


def lp_structural_irf(lp: LpResult, ident) -> IrfSet:
    """IRF(h) = Θ_h B."""
    return _compose(np.asarray(lp.theta), ident)


def rotate_irf(base: IrfSet, R, tol: float = 1e-8) -> IrfSet:
    """Re-express IRFs of scheme A as those of scheme A·R.

    With A2 = A1·R the impact matrices satisfy B2 = B1·R, so every horizon
    is right-multiplied by R (R = rotation_between(A1, A2)).
    """
    R = np.asarray(R, dtype=np.float64)
    if R.ndim != 2 or R.shape[0] != base.values.shape[2]:
        raise DimensionMismatch(f"rotation {R.shape} vs {base.values.shape[2]} shocks")
    if not is_orthonormal(R, tol):
        raise NotOrthonormal("rotation matrix is not orthonormal")
    return replace(base, values=base.values @ R, scheme=f"{base.scheme}@rotated")
