import json

import pytest

from lltwalk.cli import main

from conftest import config_path


def test_exact_happy_path(tmp_path, capsys):
    out = tmp_path / "dist.csv"
    rc = main(["exact", "--spec", config_path("lazy_pert_1d.cfg"), "--n", "6", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# n=6 nu=1 route=")
    assert lines[1] == "x1,mass"


def test_exact_route_all(tmp_path, capsys):
    out = tmp_path / "dist.csv"
    rc = main([
        "exact", "--spec", config_path("lazy_pert_1d.cfg"), "--n", "20",
        "--route", "all", "--out", str(out),
    ])
    assert rc == 0
    err = capsys.readouterr().err
    assert "max pairwise deviation" in err


def test_validation_error_names_periodic(capsys):
    rc = main(["exact", "--spec", config_path("periodic_1d.cfg"), "--n", "10"])
    assert rc == 1
    assert "Periodic" in capsys.readouterr().err


def test_missing_spec_file(capsys):
    rc = main(["exact", "--spec", "/nonexistent/walk.cfg", "--n", "5"])
    assert rc == 1


def test_resource_limit_exit_code(capsys):
    rc = main([
        "exact", "--spec", config_path("lazy_pert_1d.cfg"), "--n", "10000000",
        "--mem-limit-mb", "1",
    ])
    assert rc == 2


def test_compare_cli(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main([
        "compare", "--spec", config_path("lazy_pert_1d.cfg"),
        "--n-list", "8,16,32", "--format", "json", "--out", str(out),
    ])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["schema_version"] == 1
    assert "slopes" in payload
    assert "slopes" in capsys.readouterr().err


def test_simulate_byte_identical(tmp_path):
    args = [
        "simulate", "--spec", config_path("lazy_pert_1d.cfg"),
        "--n", "10", "--trials", "2000", "--seed", "42",
    ]
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_coeffs_cli(capsys):
    rc = main(["coeffs", "--spec", config_path("lazy_sym_1d.cfg"), "--order", "4"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "-1/96" in out


def test_identities_cli(capsys):
    rc = main(["identities", "--x", "1.0"])
    assert rc == 0
    assert "PASS" in capsys.readouterr().out


def test_returns_cli(capsys):
    rc = main(["returns", "--spec", config_path("lazy_pert_1d.cfg"), "--n-max", "12"])
    assert rc == 0
    captured = capsys.readouterr()
    assert "f_unperturbed" in captured.out
    assert "max |f_n - f'_n|" in captured.err


def test_asymptotic_cli(tmp_path):
    out = tmp_path / "asym.csv"
    rc = main([
        "asymptotic", "--spec", config_path("lazy_pert_1d.cfg"), "--n", "64",
        "--out", str(out),
    ])
    assert rc == 0
    header = out.read_text().splitlines()[1].split(",")
    assert header == [
        "x1", "gaussian_leading", "perturbation_correction",
        "edgeworth_terms", "total", "within_horizon",
    ]


def test_asymptotic_cli_unperturbed_uses_refinement(tmp_path):
    out = tmp_path / "asym.csv"
    rc = main([
        "asymptotic", "--spec", config_path("lazy_sym_1d.cfg"), "--n", "64",
        "--order", "4", "--out", str(out),
    ])
    assert rc == 0
    rows = out.read_text().splitlines()[2:]
    edge_terms = [float(r.split(",")[3]) for r in rows]
    assert any(abs(v) > 0 for v in edge_terms)


def test_identities_no_convergence_exit_code(capsys):
    rc = main(["identities", "--x", "1.0", "--tol", "1e-13"])
    assert rc == 3
    assert "NoConvergence" in capsys.readouterr().err


def test_exact_unperturbed_law(tmp_path):
    out = tmp_path / "power.csv"
    rc = main([
        "exact", "--spec", config_path("lazy_sym_1d.cfg"), "--n", "4",
        "--law", "unperturbed", "--out", str(out),
    ])
    assert rc == 0
    rows = out.read_text().splitlines()[2:]
    masses = {int(r.split(",")[0]): float(r.split(",")[1]) for r in rows}
    assert masses[0] == pytest.approx(0.2734375, abs=1e-12)  # central mass of the 4-step law
