import csv
import hashlib
import json
import subprocess
import sys

import numpy as np
import pytest

from mainproblem import cli
from mainproblem import propagator as pr

SHORT = ["--case", "gto", "--days", "1", "--cadence", "3600", "--spec", "2:1", "--spec", "1:0"]


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_dump_tables_is_idempotent(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["dump-tables", "--out", str(a)]) == 0
    assert cli.main(["dump-tables", "--out", str(b)]) == 0
    assert digest(a) == digest(b)
    data = json.loads(a.read_text())
    assert data["gamma2"]["0,1"] == [375, -930, 780, -224]
    assert set(data["lambda2"]) == {"0", "1", "2"}
    assert cli.main(["dump-tables"]) == 0
    assert capsys.readouterr().out == a.read_text()


@pytest.mark.parametrize("argv", [
    ["run", "--days", "-1"],
    ["run", "--cadence", "0"],
    ["run", "--oracle-tol", "1e-3"],
    ["run", "--case", "prisma", "--inc", "50"],
    ["run", "--case", "custom", "--e", "1.5"],
])
def test_configuration_errors_exit_2(argv, tmp_path):
    assert cli.main([*argv, "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_malformed_flags_exit_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        cli.main(["run", "--spec", "1:2", "--out", str(tmp_path)])
    assert info.value.code == 2


def test_critical_inclination_exits_3(tmp_path):
    argv = ["run", "--case", "custom", "--inc", "63.4349", "--out", str(tmp_path)]
    assert cli.main(argv) == cli.EXIT_RESONANCE
    assert not (tmp_path / "reference.csv").exists()  # the guard trips before the reference run


def test_reference_accuracy_failure_exits_4(tmp_path):
    argv = ["run", "--case", "gto", "--oracle-tol", "1e-10", "--spec", "1:0", "--out", str(tmp_path)]
    assert cli.main(argv) == cli.EXIT_ACCURACY


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "mainproblem.cli", "run", "--days", "0", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2 and "configuration error" in proc.stderr


@pytest.fixture(scope="module")
def short_runs(tmp_path_factory):
    dirs = [tmp_path_factory.mktemp(f"run{i}") for i in range(2)]
    for d in dirs:
        assert cli.main(["run", *SHORT, "--out", str(d)]) == 0
    return dirs


def test_runs_are_byte_identical(short_runs):
    a, b = short_runs
    names = sorted(p.name for p in a.iterdir())
    assert names == ["gto_1-0.csv", "gto_2-1.csv", "manifest.json", "reference.csv"]
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert digest(a / name) == digest(b / name), name


def test_series_rows_carry_metadata(short_runs):
    with open(short_runs[0] / "gto_2-1.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 25
    assert list(rows[0])[:4] == ["case", "spec", "chart", "inversion"]
    assert {r["case"] for r in rows} == {"gto"} and {r["spec"] for r in rows} == {"2:1"}
    assert set(cli.SERIES_COLUMNS) <= set(rows[0])
    assert float(rows[0]["rss_position"]) < 1e-2  # km


def test_manifest(short_runs):
    m = json.loads((short_runs[0] / "manifest.json").read_text())
    assert m["schema_version"] == cli.SCHEMA_VERSION
    assert set(m) >= {"inputs", "constants", "versions", "reference", "runs", "secular_reference"}
    assert m["inputs"]["specs"] == ["2:1", "1:0"]
    assert m["constants"]["J2"] == 1.08262617e-3
    run = m["runs"]["2:1"]
    assert run["file"] == "gto_2-1.csv"
    assert run["secular_means"]["semimajor_axis_km"] == pytest.approx(24460, rel=1e-2)
    assert m["reference"]["energy_drift"] <= 1e-12


def test_verdict_bands():
    result = {"rss_position": np.array([1e-6, 20.0]), "sma_relative_amplitude": 4e-7, "sma_reference": 6878.0}
    checks = cli.verdicts("prisma", pr.TruncationSpec(1, 1), result)
    assert [v.passed for v in checks] == [True, True]
    result["rss_position"] = np.array([1e-6, 1.0])
    assert not cli.verdicts("prisma", pr.TruncationSpec(1, 1), result)[1].passed
    assert "PASS" in checks[0].row()
