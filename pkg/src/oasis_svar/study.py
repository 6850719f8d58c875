"""Study configuration, the estimate → identify → report pipeline, and outputs.

A study is described by a YAML file::

    label: LSZ96
    data: lsz96.csv              # relative to the config file
    variables:
      - {name: GDP, transform: log-diff}
      - {name: DEF, transform: log-diff}
      - {name: FFR, transform: levels}
      - {name: M2, transform: log-diff}
    lags: 4
    ordering: [GDP, DEF, FFR, M2]   # default: variable order
    weights: {FFR: 2.0}             # optional, unnamed variables get 1
    horizon: 40
    trend: false
    df_adjust: false
    local_projection: false
    scan: {budget: 5040000, seed: 0}
    proxy:                          # optional
      instruments: [mp_surprise]    # data columns, used in levels
      subset: [FFR]                 # or: reduced-form shocks as instruments
      weights: [1.0]
    output: out/lsz96

A manifest lists several studies: ``{studies: [a.yaml, b.yaml], output: out}``.
"""

from __future__ import annotations

import contextlib
import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .data_io import atomic_write, csv_text, fmt_full, ingest_csv, matrix_csv
from .errors import ConfigError, InvalidPermutation, OasisError, StageError
from .ident import (
    DEFAULT_SCAN_BUDGET,
    Diagnostics,
    ScanResult,
    cholesky_id,
    cross_scheme_corr,
    diagnostics,
    eigen_downscale_decomposition,
    oasis,
    permutation_scan,
    rotation_between,
    weighted_oasis,
)
from .irf import DEFAULT_HORIZON, IrfSet, lp_structural_irf, structural_irf
from .matprim import corr_from_cov
from .proxy import ProxyInputs, ProxyResult, proxy_oasis, subset_oasis
from .var_engine import TRANSFORMS, TimeSeriesPanel, VarModel, estimate_var, local_projection, ma_coefficients

log = logging.getLogger(__name__)

REPORT_COLUMNS = (
    "study", "n", "rho_star", "rho_chol", "min_chol", "max_chol",
    "rho_star_chol", "abs_corr_mean", "ratio", "d_C", "exhaustive",
)


@dataclass(frozen=True)
class StudyConfig:
    label: str
    data: Path
    variables: tuple  # ((name, transform), ...)
    lags: int
    ordering: tuple  # variable names
    weights: Optional[tuple] = None
    horizon: int = DEFAULT_HORIZON
    trend: bool = False
    df_adjust: bool = False
    local_projection: bool = False
    scan_budget: int = DEFAULT_SCAN_BUDGET
    scan_seed: int = 0
    proxy_instruments: tuple = ()
    proxy_subset: tuple = ()
    proxy_weights: Optional[tuple] = None
    output: Optional[Path] = None

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.variables)

    @property
    def ordering_index(self) -> tuple:
        return tuple(self.names.index(v) for v in self.ordering)


def _variables_from(raw) -> tuple:
    if isinstance(raw, dict):
        raw = [{"name": k, "transform": v} for k, v in raw.items()]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("'variables' must be a non-empty list")
    out = []
    for item in raw:
        if isinstance(item, str):
            out.append((item, "levels"))
        elif isinstance(item, dict) and "name" in item:
            t = str(item.get("transform", "levels"))
            if t not in TRANSFORMS:
                raise ConfigError(f"variable {item['name']!r}: transform must be one of {TRANSFORMS}")
            out.append((str(item["name"]), t))
        else:
            raise ConfigError(f"cannot read variable entry {item!r}")
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate variable names")
    return tuple(out)


def config_from_dict(raw: dict, base: Path = Path(".")) -> StudyConfig:
    if not isinstance(raw, dict):
        raise ConfigError("study config must be a mapping")
    unknown = set(raw) - {
        "label", "data", "variables", "lags", "ordering", "weights", "horizon", "trend",
        "df_adjust", "local_projection", "scan", "proxy", "output",
    }
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("data", "variables", "lags"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
    variables = _variables_from(raw["variables"])
    names = tuple(n for n, _ in variables)
    ordering = tuple(str(v) for v in raw.get("ordering", names))
    if sorted(ordering) != sorted(names) or len(ordering) != len(names):
        raise InvalidPermutation(f"ordering {list(ordering)} is not a permutation of variables {list(names)}")
    weights = None
    if raw.get("weights") is not None:
        w = raw["weights"]
        if isinstance(w, dict):
            extra = set(w) - set(names)
            if extra:
                raise ConfigError(f"weights given for unknown variables {sorted(extra)}")
            weights = tuple(float(w.get(n, 1.0)) for n in names)
        else:
            weights = tuple(float(x) for x in w)
        if len(weights) != len(names) or not all(x > 0 for x in weights):
            raise ConfigError("weights must be positive, one per variable")
    scan = raw.get("scan") or {}
    proxy = raw.get("proxy") or {}
    subset = tuple(str(s) for s in proxy.get("subset", ()))
    if any(s not in names for s in subset):
        raise ConfigError(f"proxy subset {list(subset)} not among variables {list(names)}")
    lags = int(raw["lags"])
    if lags < 1:
        raise ConfigError("lags must be >= 1")
    out = raw.get("output")
    return StudyConfig(
        label=str(raw.get("label", Path(str(raw["data"])).stem)),
        data=(base / str(raw["data"])),
        variables=variables,
        lags=lags,
        ordering=ordering,
        weights=weights,
        horizon=int(raw.get("horizon", DEFAULT_HORIZON)),
        trend=bool(raw.get("trend", False)),
        df_adjust=bool(raw.get("df_adjust", False)),
        local_projection=bool(raw.get("local_projection", False)),
        scan_budget=int(scan.get("budget", DEFAULT_SCAN_BUDGET)),
        scan_seed=int(scan.get("seed", 0)),
        proxy_instruments=tuple(str(s) for s in proxy.get("instruments", ())),
        proxy_subset=subset,
        proxy_weights=tuple(float(x) for x in proxy["weights"]) if proxy.get("weights") else None,
        output=(base / str(out)) if out is not None else None,
    )


def _read_yaml(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        try:
            return yaml.safe_load(fh) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: {exc}") from None


def load_config(path) -> StudyConfig:
    path = Path(path)
    return config_from_dict(_read_yaml(path), base=path.parent)


def load_configs(path) -> tuple[list, Optional[Path]]:
    """Study configs from a single study file or a manifest, plus the manifest output dir."""
    path = Path(path)
    raw = _read_yaml(path)
    if "studies" in raw:
        configs = [load_config(path.parent / str(p)) for p in raw["studies"]]
        out = raw.get("output")
        return configs, (path.parent / str(out)) if out is not None else None
    return [config_from_dict(raw, base=path.parent)], None


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except (OasisError, np.linalg.LinAlgError) as exc:
        raise StageError(name, exc) from exc


# -- pipeline -----------------------------------------------------------------


@dataclass(frozen=True)
class StudyReportRow:
    study: str
    n: int
    rho_star: float
    rho_chol: float
    min_chol: float
    max_chol: float
    rho_star_chol: float
    abs_corr_mean: float
    ratio: Optional[float]
    d_C: float
    exhaustive: bool

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in REPORT_COLUMNS)


@dataclass
class StudyOutcome:
    config: StudyConfig
    panel: TimeSeriesPanel
    model: VarModel
    instruments: Optional[np.ndarray] = None
    idents: dict = field(default_factory=dict)
    diagnostics: Optional[Diagnostics] = None
    scan: Optional[ScanResult] = None
    rotation: Optional[np.ndarray] = None  # R = A*⁻¹A_c
    downscale: object = None
    shock_corr_ucu: Optional[np.ndarray] = None  # corr(u*_i, u^c_i)
    rho_star_chol: Optional[float] = None
    irfs: dict = field(default_factory=dict)
    lp_irfs: dict = field(default_factory=dict)
    proxy: Optional[ProxyResult] = None
    row: Optional[StudyReportRow] = None


def load_panel(cfg: StudyConfig) -> tuple[TimeSeriesPanel, Optional[np.ndarray]]:
    with stage("ingest"):
        full = ingest_csv(cfg.data, cfg.variables, extra=cfg.proxy_instruments)
    n = len(cfg.variables)
    panel = TimeSeriesPanel(
        names=full.names[:n], data=full.data[:, :n], transforms=full.transforms[:n], index=full.index
    )
    inst = full.data[:, n:] if cfg.proxy_instruments else None
    return panel, inst


def fit(cfg: StudyConfig, panel: TimeSeriesPanel) -> VarModel:
    with stage("estimate"):
        return estimate_var(panel, cfg.lags, trend=cfg.trend, df_adjust=cfg.df_adjust)


def identify(cfg: StudyConfig, model: VarModel) -> dict:
    S = model.sigma
    with stage("identify"):
        out = {
            "oasis": oasis(S),
            "cholesky": cholesky_id(S, cfg.ordering_index),
            "cholesky_upper": cholesky_id(S, cfg.ordering_index[::-1]),
        }
        if cfg.weights is not None:
            out["weighted_oasis"] = weighted_oasis(S, cfg.weights)
    return out


def run_proxy(cfg: StudyConfig, model: VarModel, instruments: Optional[np.ndarray]) -> Optional[ProxyResult]:
    if not cfg.proxy_instruments and not cfg.proxy_subset:
        return None
    with stage("proxy"), warnings.catch_warnings():
        warnings.simplefilter("always")
        if cfg.proxy_instruments:
            z = instruments[cfg.lags:]
            inputs = ProxyInputs.from_samples(model.residuals, z, cfg.proxy_weights)
            # keep Σ on the model's divisor so a* is feasible for the reported covariance
            inputs = ProxyInputs(sigma=model.sigma, c_eps_z=inputs.c_eps_z, w=inputs.w)
            return proxy_oasis(inputs)
        idx = [cfg.names.index(s) for s in cfg.proxy_subset]
        return subset_oasis(model.sigma, idx, cfg.proxy_weights)


ALL_PARTS = frozenset({"identify", "scan", "irf", "proxy"})


def run_study(
    cfg: StudyConfig,
    budget: Optional[int] = None,
    seed: Optional[int] = None,
    horizon: Optional[int] = None,
    parts=ALL_PARTS,
) -> StudyOutcome:
    """Estimate, identify, scan orderings, and compute IRFs for one study.

    ``parts`` limits the work to a subset of identify/scan/irf/proxy; the
    report row is only built when both identify and scan ran.
    """
    parts = frozenset(parts)
    panel, inst = load_panel(cfg)
    model = fit(cfg, panel)
    out = StudyOutcome(config=cfg, panel=panel, model=model, instruments=inst)
    S = model.sigma
    if parts & {"identify", "irf", "scan"}:
        out.idents = identify(cfg, model)
        with stage("diagnostics"):
            o, c = out.idents["oasis"], out.idents["cholesky"]
            out.diagnostics = diagnostics(S, cfg.ordering_index)
            out.rotation = rotation_between(o.A, c.A)
            out.downscale = eigen_downscale_decomposition(c.A, S)
            out.shock_corr_ucu = np.diag(o.A.T @ S.values @ c.A)
            out.rho_star_chol = cross_scheme_corr(o.A, c.A, S)
    if "scan" in parts:
        with stage("scan"):
            out.scan = permutation_scan(
                S,
                budget=cfg.scan_budget if budget is None else budget,
                seed=cfg.scan_seed if seed is None else seed,
            )
    if "irf" in parts:
        H = cfg.horizon if horizon is None else horizon
        with stage("irf"):
            ma = ma_coefficients(model, H)
            out.irfs = {k: structural_irf(ma, v) for k, v in out.idents.items()}
            if cfg.local_projection:
                lp = local_projection(panel, model.residuals, H)
                out.lp_irfs = {k: lp_structural_irf(lp, v) for k, v in out.idents.items()}
    if "proxy" in parts:
        out.proxy = run_proxy(cfg, model, inst)
    if out.diagnostics is not None and out.scan is not None:
        diag, scan = out.diagnostics, out.scan
        out.row = StudyReportRow(
            study=cfg.label,
            n=S.n,
            rho_star=diag.rho_star,
            rho_chol=diag.rho_chol,
            min_chol=scan.min_corr,
            max_chol=scan.max_corr,
            rho_star_chol=out.rho_star_chol,
            abs_corr_mean=diag.abs_corr_mean,
            ratio=diag.proximity_ratio,
            d_C=diag.d_C,
            exhaustive=scan.exhaustive,
        )
    return out


# -- formatting -----------------------------------------------------------------


def _f(x, digits: int) -> str:
    return "undefined" if x is None else f"{x:.{digits}f}"


def format_report_table(rows) -> str:
    """Plain-text table in the layout of the cross-study summary table."""
    header = ("Study", "n", "rho*", "rho_c", "min", "max", "rho*,c", "|C|1*", "ratio", "d(C)", "exhaustive")
    body = [
        (
            r.study, str(r.n), _f(r.rho_star, 4), _f(r.rho_chol, 4), _f(r.min_chol, 4), _f(r.max_chol, 4),
            _f(r.rho_star_chol, 4), _f(r.abs_corr_mean, 2), _f(r.ratio, 2), _f(r.d_C, 2),
            "yes" if r.exhaustive else "no",
        )
        for r in rows
    ]
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) if i == 0 else h.rjust(w) for i, (h, w) in enumerate(zip(header, widths)))]
    for b in body:
        lines.append("  ".join(v.ljust(w) if i == 0 else v.rjust(w) for i, (v, w) in enumerate(zip(b, widths))))
    return "\n".join(lines) + "\n"


def report_csv(rows) -> str:
    return csv_text(REPORT_COLUMNS, (r.values() for r in rows))


def read_report_csv(path) -> list:
    import csv

    with Path(path).open(newline="", encoding="utf-8") as fh:
        recs = list(csv.DictReader(fh))
    rows = []
    for r in recs:
        num = lambda k: None if r[k] == "undefined" else float(r[k])  # noqa: E731
        rows.append(
            StudyReportRow(
                study=r["study"], n=int(r["n"]), rho_star=num("rho_star"), rho_chol=num("rho_chol"),
                min_chol=num("min_chol"), max_chol=num("max_chol"), rho_star_chol=num("rho_star_chol"),
                abs_corr_mean=num("abs_corr_mean"), ratio=num("ratio"), d_C=num("d_C"),
                exhaustive=r["exhaustive"] == "true",
            )
        )
    return rows


def _positions(ordering: tuple, n: int) -> list:
    pos = [0] * n
    for k, i in enumerate(ordering):
        pos[i] = k + 1
    return pos


def shock_table_rows(out: StudyOutcome) -> list:
    """Per-variable rows: corr(ε, u*), corr(ε, u_c) lower/upper, min/max ordering position, corr(u*, u_c)."""
    names = out.config.names
    n = len(names)
    o, lo, up = out.idents["oasis"], out.idents["cholesky"], out.idents["cholesky_upper"]
    if out.scan is not None:
        pmin, pmax = _positions(out.scan.argmin, n), _positions(out.scan.argmax, n)
    else:
        pmin = pmax = [""] * n
    return [
        (names[i], o.per_shock_corr[i], lo.per_shock_corr[i], up.per_shock_corr[i], pmin[i], pmax[i], out.shock_corr_ucu[i])
        for i in range(n)
    ]


SHOCK_COLUMNS = ("variable", "corr_eps_u_oasis", "corr_eps_u_chol_lower", "corr_eps_u_chol_upper",
                 "min_ordering_position", "max_ordering_position", "corr_u_oasis_u_chol")


def format_shock_table(out: StudyOutcome) -> str:
    rows = shock_table_rows(out)
    lines = [f"{'':6}  {'OASIS':>8}  {'Lower':>8}  {'Upper':>8}  {'min':>6}  {'max':>6}  {'u*,u_c':>8}"]
    for name, a, b, c, pmn, pmx, d in rows:
        lines.append(f"{name:6}  {a:8.4f}  {b:8.4f}  {c:8.4f}  {pmn:>6}  {pmx:>6}  {d:8.4f}")
    lo = f"{out.scan.min_corr:.4f}" if out.scan is not None else ""
    hi = f"{out.scan.max_corr:.4f}" if out.scan is not None else ""
    lines.append(
        f"{'mean':6}  {out.idents['oasis'].avg_corr:8.4f}  {out.idents['cholesky'].avg_corr:8.4f}  "
        f"{out.idents['cholesky_upper'].avg_corr:8.4f}  {lo:>6}  {hi:>6}  {out.rho_star_chol:8.4f}"
    )
    return "\n".join(lines) + "\n"


def _irf_csv(irf: IrfSet, names) -> str:
    H, n, _ = irf.values.shape
    return csv_text(
        ("horizon", "response", "shock", "value"),
        ((h, names[i], names[j], irf.values[h, i, j]) for h in range(H) for i in range(n) for j in range(n)),
    )


# -- writers --------------------------------------------------------------------


def write_estimation(out_dir: Path, cfg: StudyConfig, panel: TimeSeriesPanel, model: VarModel) -> list:
    names = cfg.names
    files = {
        "sigma.csv": matrix_csv(model.sigma.values, names, names),
        "residuals.csv": csv_text(
            ("period", *names), ((panel.index[model.p + t], *model.residuals[t]) for t in range(model.residuals.shape[0]))
        ),
        "var_coefficients.csv": matrix_csv(
            model.coef,
            ["const"] + (["trend"] if cfg.trend else []) + [f"L{l}.{v}" for l in range(1, model.p + 1) for v in names],
            names,
            corner="regressor",
        ),
    }
    for name, text in files.items():
        atomic_write(out_dir / name, text)
    return sorted(files)


def write_identification(out_dir: Path, out: StudyOutcome) -> list:
    names = out.config.names
    files = {}
    for key, res in out.idents.items():
        files[f"A_{key}.csv"] = matrix_csv(res.A, names, names)
        files[f"B_{key}.csv"] = matrix_csv(res.B, names, names)
    files["R_oasis_cholesky.csv"] = matrix_csv(out.rotation, names, names)
    k = len(names)
    eig = [f"eig{i + 1}" for i in range(k)]
    files["M_oasis_cholesky.csv"] = matrix_csv(out.downscale.M, eig, eig)
    cs = corr_from_cov(out.model.sigma)
    files["eigen.csv"] = csv_text(
        ("component", "lambda", "sqrt_lambda", "M_ii"),
        ((eig[i], cs.eigvalues[i], out.downscale.lam_sqrt[i], out.downscale.M[i, i]) for i in range(k)),
    )
    files["shock_correlations.csv"] = csv_text(SHOCK_COLUMNS, shock_table_rows(out))
    files["shock_correlations.txt"] = format_shock_table(out)
    for name, text in files.items():
        atomic_write(out_dir / name, text)
    return sorted(files)


def write_scan(out_dir: Path, out: StudyOutcome) -> list:
    if out.scan is None:
        return []
    names = out.config.names
    s = out.scan
    text = csv_text(
        ("statistic", "value", "ordering", "exhaustive", "method"),
        [
            ("min", s.min_corr, " ".join(names[i] for i in s.argmin), s.exhaustive, s.method),
            ("max", s.max_corr, " ".join(names[i] for i in s.argmax), s.exhaustive, s.method),
        ],
    )
    atomic_write(out_dir / "scan.csv", text)
    return ["scan.csv"]


def write_irfs(out_dir: Path, out: StudyOutcome) -> list:
    names = out.config.names
    files = {f"irf_{k}.csv": _irf_csv(v, names) for k, v in out.irfs.items()}
    files.update({f"lp_irf_{k}.csv": _irf_csv(v, names) for k, v in out.lp_irfs.items()})
    for name, text in files.items():
        atomic_write(out_dir / name, text)
    return sorted(files)


def write_proxy(out_dir: Path, out: StudyOutcome) -> list:
    if out.proxy is None:
        return []
    cfg = out.config
    labels = list(cfg.proxy_instruments or cfg.proxy_subset)
    p = out.proxy
    files = {
        "proxy_a_star.csv": matrix_csv(p.a_star, cfg.names, labels),
        "proxy_xi.csv": csv_text(("component", "xi"), ((i + 1, x) for i, x in enumerate(p.xi))),
    }
    for name, text in files.items():
        atomic_write(out_dir / name, text)
    return sorted(files)


def _config_echo(cfg: StudyConfig) -> dict:
    d = asdict(cfg)
    d["data"] = cfg.data.name
    d["output"] = None
    d["variables"] = [{"name": n, "transform": t} for n, t in cfg.variables]
    return json.loads(json.dumps(d, default=list))


def metadata(out: StudyOutcome, files: list, kind: str) -> dict:
    cfg = out.config
    meta = {
        "tool": "oasis_svar",
        "version": __version__,
        "command": kind,
        "config": _config_echo(cfg),
        "variables": list(cfg.names),
        "sample": {
            "first": out.panel.index[0],
            "last": out.panel.index[-1],
            "observations": out.panel.T,
            "effective": int(out.model.residuals.shape[0]),
        },
        "undefined_sentinel": "undefined",
        "files": sorted(files),
    }
    if out.row is not None:
        meta["report"] = {k: fmt_full(v) for k, v in zip(REPORT_COLUMNS, out.row.values())}
    if out.scan is not None:
        meta["scan"] = {
            "method": out.scan.method,
            "exhaustive": out.scan.exhaustive,
            "evaluated": out.scan.evaluated,
            "argmin": [cfg.names[i] for i in out.scan.argmin],
            "argmax": [cfg.names[i] for i in out.scan.argmax],
        }
    if out.proxy is not None:
        meta["proxy"] = {
            "xi": [fmt_full(x) for x in out.proxy.xi],
            "objective": fmt_full(out.proxy.objective),
            "full_rank": out.proxy.full_rank,
        }
    return meta


def write_metadata(out_dir: Path, meta: dict) -> None:
    atomic_write(out_dir / "metadata.json", json.dumps(meta, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def write_study(out_dir, out: StudyOutcome) -> list:
    """Write every artifact of a completed study run into ``out_dir``."""
    out_dir = Path(out_dir)
    files = write_estimation(out_dir, out.config, out.panel, out.model)
    files += write_identification(out_dir, out)
    files += write_scan(out_dir, out)
    files += write_irfs(out_dir, out)
    files += write_proxy(out_dir, out)
    atomic_write(out_dir / "report_row.csv", report_csv([out.row]))
    atomic_write(out_dir / "report.txt", format_report_table([out.row]) + "\n" + format_shock_table(out))
    files += ["report_row.csv", "report.txt"]
    write_metadata(out_dir, metadata(out, files + ["metadata.json"], "report"))
    return sorted(files + ["metadata.json"])


# -- scatter --------------------------------------------------------------------


@dataclass(frozen=True)
class ScatterData:
    points: list  # (study, scheme, log d(C), -log(1 - rho), d(C), rho)
    lines: list  # (name, slope, intercept)
    skipped: list  # (study, reason)


def emit_scatter(rows) -> ScatterData:
    """Points (log d(C), −log(1−ρ̄)) for OASIS and Cholesky plus the reference lines."""
    points, skipped = [], []
    for r in rows:
        d = r.d_C
        if d is None or not d > 0:
            skipped.append((r.study, "d(C) is not positive"))
            warnings.warn(f"scatter: skipping {r.study}: d(C) is not positive", stacklevel=2)
            continue
        for scheme, rho in (("oasis", r.rho_star), ("cholesky", r.rho_chol)):
            if rho is None or not rho < 1:
                skipped.append((r.study, f"{scheme} correlation is 1"))
                warnings.warn(f"scatter: skipping {r.study} {scheme}: correlation is 1", stacklevel=2)
                continue
            points.append((r.study, scheme, math.log(d), -math.log(1 - rho), d, rho))
    lines = [("oasis", -1.0, math.log(8)), ("cholesky", -1.0, math.log(4))]
    return ScatterData(points=points, lines=lines, skipped=skipped)


def write_scatter(out_dir, data: ScatterData) -> list:
    out_dir = Path(out_dir)
    atomic_write(
        out_dir / "scatter.csv",
        csv_text(("study", "scheme", "log_d", "neg_log_gap", "d_C", "rho"), data.points),
    )
    atomic_write(out_dir / "scatter_lines.csv", csv_text(("line", "slope", "intercept"), data.lines))
    return ["scatter.csv", "scatter_lines.csv"]
