import json
import subprocess
import sys

import jsonschema
import pytest

from impspps.cli import EXIT_CODES, main
from impspps.reporting import SCHEMAS


def run(tmp_path, command, config=None, *flags):
    argv = [command, "--out", str(tmp_path / "out")]
    if config is not None:
        tmp_path.mkdir(parents=True, exist_ok=True)
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(config))
        argv += ["--config", str(p)]
    return main(argv + list(flags))


def load(tmp_path, name):
    return json.loads((tmp_path / "out" / name).read_text())


@pytest.mark.parametrize(
    "command, report, schema",
    [
        ("formal-powers", "formal_powers.json", "formal_powers"),
        ("solve", "solve.json", "solve"),
        ("eigen", "eigen.json", "eigen"),
        ("approx", "approx_exp.json", "approx"),
        ("kernel", "kernel.json", "kernel"),
        ("check", "check.json", "check"),
    ],
)
def test_commands_write_valid_reports(tmp_path, command, report, schema):
    assert run(tmp_path, command) == 0
    doc = load(tmp_path, report)
    jsonschema.validate(doc, SCHEMAS[schema])
    assert (tmp_path / "out" / "config.json").exists()


def test_eigen_report_values(tmp_path):
    assert run(tmp_path, "eigen") == 0
    doc = load(tmp_path, "eigen.json")
    assert max(doc["relative_error"]) <= 1e-6
    assert doc["orthonormality"] <= 1e-7
    lines = (tmp_path / "out" / "eigenvalues.csv").read_text().splitlines()
    assert len(lines) == 6


def test_check_affine_passes(tmp_path):
    assert run(tmp_path, "check") == 0
    doc = load(tmp_path, "check.json")
    assert doc["verdict"] == "pass"
    assert all(c["pass"] for c in doc["checks"].values())


def test_solve_csv_format(tmp_path):
    assert run(tmp_path, "solve", {"rho": [2.0], "kinds": ["S"], "grid_n": 101}) == 0
    lines = (tmp_path / "out" / "solve_S_0.csv").read_text().splitlines()
    assert len(lines) == 102
    assert lines[1].split(",")[0] == "0.00000000000000000e+00"


def test_flags_override_config(tmp_path):
    assert run(tmp_path, "eigen", {"impedance": "affine", "n_max": 2}, "--impedance", "exp:1") == 0
    doc = load(tmp_path, "eigen.json")
    assert doc["impedance"].startswith("exp")
    assert len(doc["eigenvalues"]) == 2


def test_outputs_are_deterministic(tmp_path):
    cfg = {"grid_n": 401, "n_max": 3, "N": [0, 2, 4]}
    for command in ("formal-powers", "eigen", "approx", "kernel"):
        run(tmp_path / "a", command, cfg)
        run(tmp_path / "b", command, cfg)
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    assert files
    for f in files:
        if f.name == "config.json" or f.name == "cfg.json":
            continue
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes(), f


@pytest.mark.parametrize(
    "command, config, code",
    [
        ("eigen", {"impedance": "file:/nonexistent.csv"}, EXIT_CODES["config"]),
        ("eigen", {"interval": [1.0, 0.0]}, EXIT_CODES["config"]),
        ("solve", {"kinds": ["Q"]}, EXIT_CODES["config"]),
        ("eigen", {"unknown_key": 1}, EXIT_CODES["config"]),
        ("eigen", {"interval": [-2.0, 1.0]}, EXIT_CODES["config"]),
        ("eigen", {"lambda_max": 20.0}, EXIT_CODES["eigen"]),
        ("kernel", {"J": 3}, EXIT_CODES["kernel"]),
        ("approx", {"K": 5, "N": [10]}, EXIT_CODES["approx"]),
        ("formal-powers", {"K": 500}, EXIT_CODES["solve"]),
    ],
)
def test_exit_codes(tmp_path, command, config, code):
    assert run(tmp_path, command, config) == code


def test_negative_file_impedance(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("x,a\n0,1\n0.5,-0.2\n1,1\n")
    assert run(tmp_path, "eigen", {"impedance": f"file:{p}"}) == EXIT_CODES["config"]


def test_console_script(tmp_path):
    r = subprocess.run(
        [sys.executable, "-m", "impspps.cli", "eigen", "--out", str(tmp_path), "--grid-n", "401"],
        capture_output=True, text=True, check=False,
    )
    assert r.returncode == 0
    assert r.stdout.startswith("eigen: ")
