import json
import math

import numpy as np
import pytest
import yaml

from oasis_svar.cli import main
from oasis_svar.data_io import ingest_csv, read_matrix_csv
from oasis_svar.errors import (
    FileNotFound,
    InvalidPermutation,
    NonFiniteValue,
    NonPositiveValueUnderLog,
    RaggedRows,
    UnknownVariable,
)
from oasis_svar.ident import equicorr_closed_forms
from oasis_svar.matprim import equicorrelation
from oasis_svar.study import (
    StudyReportRow,
    config_from_dict,
    emit_scatter,
    load_config,
    read_report_csv,
    run_study,
)
from oasis_svar.var_engine import simulate_var


def write_csv(path, names, X, labels=True):
    lines = [",".join((["date"] if labels else []) + list(names))]
    for t, row in enumerate(X):
        cells = [repr(float(v)) for v in row]
        lines.append(",".join(([f"t{t}"] if labels else []) + cells))
    path.write_text("\n".join(lines) + "\n")


def make_study(tmp_path, rng, T=300, sigma=None, extra=None, label="sim"):
    n = 3 if sigma is None else sigma.shape[0]
    sigma = np.array([[1.0, 0.3, 0.1], [0.3, 1.0, 0.2], [0.1, 0.2, 1.0]]) if sigma is None else sigma
    X = simulate_var([0.4 * np.eye(n)], sigma, T, rng)
    names = [f"v{i}" for i in range(n)]
    write_csv(tmp_path / f"{label}.csv", names, X)
    cfg = {"label": label, "data": f"{label}.csv", "variables": names, "lags": 1, "horizon": 6}
    cfg.update(extra or {})
    path = tmp_path / f"{label}.yaml"
    path.write_text(yaml.safe_dump(cfg))
    return path


# -- ingestion --------------------------------------------------------------------


def test_ingest_levels(tmp_path, rng):
    X = rng.standard_normal((20, 2))
    write_csv(tmp_path / "d.csv", ["a", "b"], X)
    p = ingest_csv(tmp_path / "d.csv", [("a", "levels"), ("b", "levels")])
    assert np.array_equal(p.data, X)
    assert p.index[0] == "t0"


def test_ingest_without_label_column(tmp_path, rng):
    X = rng.standard_normal((10, 2))
    write_csv(tmp_path / "d.csv", ["a", "b"], X, labels=False)
    assert np.array_equal(ingest_csv(tmp_path / "d.csv", ["a", "b"]).data, X)


def test_ingest_log_diff(tmp_path):
    t = np.arange(40.0)
    write_csv(tmp_path / "d.csv", ["g", "r"], np.column_stack([np.exp(0.01 * t), t]))
    p = ingest_csv(tmp_path / "d.csv", [("g", "log-diff"), ("r", "levels")])
    assert p.T == 39
    assert np.allclose(p.data[:, 0], 0.01, atol=1e-12)
    assert np.array_equal(p.data[:, 1], t[1:])


def test_ingest_errors(tmp_path):
    (tmp_path / "neg.csv").write_text("date,a\nq1,1.0\nq2,-2.0\n")
    with pytest.raises(NonPositiveValueUnderLog, match="q2.*'a'"):
        ingest_csv(tmp_path / "neg.csv", [("a", "log-diff")])
    with pytest.raises(FileNotFound):
        ingest_csv(tmp_path / "missing.csv", ["a"])
    with pytest.raises(UnknownVariable):
        ingest_csv(tmp_path / "neg.csv", ["b"])
    (tmp_path / "rag.csv").write_text("date,a,b\nq1,1.0\n")
    with pytest.raises(RaggedRows):
        ingest_csv(tmp_path / "rag.csv", ["a"])
    (tmp_path / "gap.csv").write_text("date,a\nq1,1.0\nq2,\nq3,2.0\n")
    with pytest.raises(NonFiniteValue, match="q2"):
        ingest_csv(tmp_path / "gap.csv", ["a"])


# -- configs and studies ------------------------------------------------------------


def test_invalid_ordering_raised_before_data(tmp_path):
    raw = {"data": "does_not_exist.csv", "variables": ["a", "b"], "lags": 1, "ordering": ["a", "c"]}
    with pytest.raises(InvalidPermutation):
        config_from_dict(raw, tmp_path)


def test_white_noise_study(tmp_path, rng):
    path = make_study(tmp_path, rng, T=5000, sigma=np.eye(3))
    out = run_study(load_config(path), parts={"identify", "scan"})
    assert out.diagnostics.d_C <= 0.05
    assert out.diagnostics.rho_star > 0.99
    assert out.diagnostics.rho_chol > 0.99


def test_equicorrelated_study(tmp_path, rng):
    path = make_study(tmp_path, rng, T=20_000, sigma=equicorrelation(4, 0.5))
    out = run_study(load_config(path), parts={"identify", "scan"})
    target = equicorr_closed_forms(4, 0.5)[0]
    assert abs(out.diagnostics.rho_star - target) <= 0.01


def test_report_row_ratio_consistency(tmp_path, rng):
    out = run_study(load_config(make_study(tmp_path, rng)))
    r = out.row
    assert r.ratio == pytest.approx((1 - r.rho_chol) / (1 - r.rho_star), rel=1e-9)
    assert r.min_chol <= r.rho_chol <= r.max_chol
    assert r.exhaustive


def test_proxy_study_with_instrument(tmp_path, rng):
    n, T = 3, 400
    S = np.array([[1.0, 0.3, 0.1], [0.3, 1.0, 0.2], [0.1, 0.2, 1.0]])
    X = simulate_var([0.4 * np.eye(n)], S, T, rng)
    z = np.concatenate([[0.0], X[1:, 0] - 0.4 * X[:-1, 0]]) + 0.5 * rng.standard_normal(T)
    write_csv(tmp_path / "p.csv", ["v0", "v1", "v2", "z"], np.column_stack([X, z]))
    cfg = {"label": "p", "data": "p.csv", "variables": ["v0", "v1", "v2"], "lags": 1,
           "proxy": {"instruments": ["z"]}}
    (tmp_path / "p.yaml").write_text(yaml.safe_dump(cfg))
    out = run_study(load_config(tmp_path / "p.yaml"), parts={"proxy"})
    a = out.proxy.a_star
    assert np.allclose(a.T @ out.model.sigma.values @ a, np.eye(1), atol=1e-9)
    assert 0.5 < out.proxy.xi[0] <= 1.0


# -- scatter ----------------------------------------------------------------------------


def _row(study, d, rho_star, rho_chol):
    return StudyReportRow(study, 3, rho_star, rho_chol, rho_chol, rho_chol, 0.9, 0.2, None, d, True)


def test_scatter_point():
    data = emit_scatter([_row("s", 0.25, 0.96593, 0.93301)])
    (_, scheme, x, y, _, _) = data.points[0]
    assert scheme == "oasis"
    assert x == pytest.approx(math.log(0.25))
    assert y == pytest.approx(-math.log(1 - 0.96593))
    assert ("oasis", -1.0, math.log(8)) in data.lines


def test_scatter_empty_and_degenerate():
    data = emit_scatter([])
    assert data.points == [] and len(data.lines) == 2
    with pytest.warns(UserWarning):
        data = emit_scatter([_row("flat", 0.0, 1.0, 1.0)])
    assert data.points == [] and data.skipped


# -- CLI ----------------------------------------------------------------------------------


def test_cli_subcommands(tmp_path, rng):
    cfg = make_study(tmp_path, rng, extra={"proxy": {"subset": ["v0", "v2"]}, "local_projection": True})
    expected = {
        "estimate": "sigma.csv",
        "identify": "A_oasis.csv",
        "scan": "scan.csv",
        "proxy": "proxy_a_star.csv",
        "irf": "irf_cholesky.csv",
        "report": "report.txt",
    }
    for cmd, fname in expected.items():
        out = tmp_path / cmd
        assert main([cmd, "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / fname).is_file()
        assert (out / "metadata.json").is_file()
    assert (tmp_path / "irf" / "lp_irf_oasis.csv").is_file()
    rows = tmp_path / "rows.csv"
    rows.write_text((tmp_path / "report" / "report_row.csv").read_text())
    assert main(["scatter", "--rows", str(rows), "--out", str(tmp_path / "sc")]) == 0
    assert (tmp_path / "sc" / "scatter.csv").is_file()


def test_cli_error_exit(tmp_path, capsys):
    (tmp_path / "bad.yaml").write_text(yaml.safe_dump({"data": "nope.csv", "variables": ["a"], "lags": 1}))
    assert main(["estimate", "--config", str(tmp_path / "bad.yaml"), "--out", str(tmp_path / "o")]) != 0
    assert "[ingest]" in capsys.readouterr().err


def test_feasibility_from_written_sigma(tmp_path, rng):
    cfg = make_study(tmp_path, rng)
    assert main(["identify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    _, _, S = read_matrix_csv(tmp_path / "o" / "sigma.csv")
    for scheme in ("oasis", "cholesky", "cholesky_upper"):
        _, _, A = read_matrix_csv(tmp_path / "o" / f"A_{scheme}.csv")
        assert np.abs(A.T @ S @ A - np.eye(3)).max() < 1e-8


def test_manifest_report(tmp_path, rng):
    a = make_study(tmp_path, rng, label="a")
    b = make_study(tmp_path, rng, label="b")
    (tmp_path / "all.yaml").write_text(yaml.safe_dump({"studies": [a.name, b.name], "output": "combined"}))
    assert main(["report", "--config", str(tmp_path / "all.yaml")]) == 0
    rows = read_report_csv(tmp_path / "combined" / "report.csv")
    assert [r.study for r in rows] == ["a", "b"]
    assert (tmp_path / "combined" / "scatter.csv").is_file()
    meta = json.loads((tmp_path / "combined" / "a" / "metadata.json").read_text())
    assert meta["command"] == "report"
