"""Secondary-component tests: render every figure kind from real run output.

The solver package is driven exclusively through its CLI (the external
interface); figures are rendered through the script interface.
"""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

PLOTS_DIR = Path(__file__).resolve().parent
sys.path.insert(0, str(PLOTS_DIR))

from figkinds.common import fit_loglog_slope, read_csv  # noqa: E402


def run_cli(*args: str) -> None:
    subprocess.run([sys.executable, "-m", "fracadapt.cli", *args],
                   check=True, capture_output=True, text=True)


def render(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, str(PLOTS_DIR / "render.py"), *args],
                          capture_output=True, text=True)


@pytest.fixture(scope="session")
def artefacts(tmp_path_factory):
    """One Example-1 sweep, one graded-mesh run and one estimator run."""
    root = tmp_path_factory.mktemp("artefacts")
    run_cli("sweep", "--example", "1", "--alpha", "0.4",
            "--tols", "1e-2,1e-3", "--out", str(root / "sweep"))
    run_cli("run", "--example", "1", "--alpha", "0.4", "--tol", "1e-2",
            "--mesh", "graded:4", "--M", "64", "--out", str(root / "graded"))
    run_cli("run", "--example", "6", "--alpha", "0.8", "--mesh", "uniform:16",
            "--N", "32", "--out", str(root / "ex6"))
    return root


def test_all_four_kinds_render(artefacts, tmp_path):
    jobs = [
        ("error_vs_tol", [artefacts / "sweep" / "sweep.csv"]),
        ("mesh_shape", [artefacts / "graded" / "mesh.csv",
                        artefacts / "sweep" / "tol_1.0e-03" / "mesh.csv"]),
        ("pointwise_error", [artefacts / "sweep" / "tol_1.0e-03" / "report.csv"]),
        ("estimator_dominance", [artefacts / "ex6" / "report.csv",
                                 artefacts / "ex6" / "estimate.csv"]),
    ]
    for kind, inputs in jobs:
        out = tmp_path / f"{kind}.png"
        proc = render("--kind", kind, *["--in", *map(str, inputs)],
                      "--out", str(out))
        assert proc.returncode == 0, proc.stderr
        assert out.exists() and out.stat().st_size > 1000, kind


def test_graded_mesh_slope(artefacts):
    _, cols = read_csv(artefacts / "graded" / "mesh.csv", ["t"])
    t = cols["t"]
    m = t.size - 1
    assert m == 64
    frac = np.arange(m + 1) / m
    slope = fit_loglog_slope(frac[1:], t[1:])
    assert abs(slope - 4.0) <= 0.01


def test_error_markers_at_or_below_tolerance(artefacts):
    _, cols = read_csv(artefacts / "sweep" / "sweep.csv", ["tol", "max_error"])
    assert np.all(cols["max_error"] <= 1.05 * cols["tol"])


def test_empty_rows_rejected(tmp_path):
    bad = tmp_path / "empty.csv"
    bad.write_text("# example=1\nt\n")
    out = tmp_path / "fig.png"
    proc = render("--kind", "mesh_shape", "--in", str(bad), "--out", str(out))
    assert proc.returncode != 0
    assert "no data rows" in proc.stderr
    assert not out.exists()


def test_schema_mismatch_names_column(tmp_path):
    bad = tmp_path / "odd.csv"
    bad.write_text("time,value\n0.0,1.0\n")
    proc = render("--kind", "mesh_shape", "--in", str(bad),
                  "--out", str(tmp_path / "fig.png"))
    assert proc.returncode != 0
    assert "'t'" in proc.stderr


def test_rerender_is_idempotent(artefacts, tmp_path):
    out = tmp_path / "mesh.png"
    for _ in range(2):
        proc = render("--kind", "mesh_shape",
                      "--in", str(artefacts / "graded" / "mesh.csv"),
                      "--out", str(out))
        assert proc.returncode == 0
    assert out.exists()
