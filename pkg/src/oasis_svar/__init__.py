"""Order- and scale-invariant identification of structural VAR shocks."""

__version__ = "0.1.0"

from .errors import OasisError  # noqa: E402
from .ident import (  # noqa: E402
    IdentificationResult,
    avg_corr,
    cholesky_id,
    cross_scheme_corr,
    diagnostics,
    eigen_downscale_decomposition,
    equicorr_closed_forms,
    oasis,
    permutation_scan,
    rotation_between,
    sequential_max_corr,
    weighted_oasis,
)
from .irf import IrfSet, lp_structural_irf, rotate_irf, structural_irf  # noqa: E402
from .matprim import CovMatrix, cholesky_lower, corr_from_cov, sym_inv_sqrt, sym_sqrt  # noqa: E402
from .proxy import ProxyInputs, ProxyResult, proxy_objective, proxy_oasis, subset_oasis  # noqa: E402
from .var_engine import (  # noqa: E402
    TimeSeriesPanel,
    VarModel,
    estimate_var,
    local_projection,
    ma_coefficients,
)
