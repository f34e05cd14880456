import csv
import io
import json
import math
from pathlib import Path

import pytest

from main import main
from schemas import SWEEP_HEADER, EigResponse, OracleResponse, SolveResponse, VerificationReport

P1 = ["--a", "1", "--c", "0.5", "--derive", "b"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def envelope(err):
    return json.loads(err.strip().splitlines()[-1])


# ---------- solve ----------
def test_solve_p1(capsys):
    code, out, _ = run(capsys, "solve", *P1)
    assert code == 0
    doc = SolveResponse.model_validate_json(out)
    assert doc.inputs.derived == "b"
    assert doc.inputs.params.b == pytest.approx(1.0)
    assert doc.views.coulomb.E == pytest.approx(1.0)
    assert doc.views.oscillator.E == pytest.approx(1.0)
    assert (doc.psi.q, doc.psi.lambda_, doc.psi.kappa) == pytest.approx((1.0, 1.0, 0.5))
    assert doc.psi.N0 > 0
    assert [level.E_n for level in doc.spectrum] == pytest.approx([1.0, 2.0, 3.0])
    assert doc.regime == "coulomb-dominant"
    assert doc.constraint.relative <= 1e-15


def test_solve_hydrogen_lists_coulomb_levels(capsys):
    code, out, _ = run(capsys, "solve", "--a", "1", "--nmax", "1")
    assert code == 0
    doc = SolveResponse.model_validate_json(out)
    assert doc.views.oscillator is None
    assert [level.E_n for level in doc.spectrum] == pytest.approx([-0.5, -0.125])


def test_solve_off_constraint_exits_2(capsys):
    code, out, err = run(capsys, "solve", "--a", "1", "--b", "2", "--c", "0.5")
    assert code == 2
    assert out == ""
    error = envelope(err)
    assert error["IsSuccess"] is False
    assert error["data"]["b_required"] == pytest.approx(1.0)
    assert error["data"]["violation"] == pytest.approx(1.0)


def test_solve_charmonium_limit_exits_2(capsys):
    code, _, _ = run(capsys, "solve", "--a", "1", "--b", "1")
    assert code == 2


def test_solve_table(capsys):
    code, out, _ = run(capsys, "solve", *P1, "--out", "table")
    assert code == 0
    assert "coulomb" in out
    assert "E=1" in out


def test_solve_regime_override(capsys):
    _, out, _ = run(capsys, "solve", *P1, "--regime", "oscillator-dominant")
    assert SolveResponse.model_validate_json(out).regime == "oscillator-dominant"
    code, _, _ = run(capsys, "solve", *P1, "--regime", "linear")
    assert code == 1


def test_json_floats_keep_17_digits(capsys):
    _, out, _ = run(capsys, "solve", "--a", "1", "--c", "0.3", "--derive", "b")
    # 17 significant digits round-trip the float exactly
    assert json.loads(out)["inputs"]["params"]["b"] == math.sqrt(0.6)


# ---------- usage errors ----------
@pytest.mark.parametrize("argv", [
    ["solve"],
    ["solve", "--a", "1", "--bogus", "2"],
    ["solve", "--a", "1", "--b", "1", "--c", "0.5", "--derive", "b"],
    ["solve", "--a", "1", "--N", "1"],
    ["solve", "--c", "0.5", "--derive", "b"],
    [],
    ["oracle", "--b", "1", "--c", "0.5"],
    ["eig", "--a", "1", "--k", "0"],
])
def test_usage_errors_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert envelope(err)["IsSuccess"] is False


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0


def test_verbose_logs_to_stderr_only(capsys):
    code, out, err = run(capsys, "solve", *P1, "--verbose")
    assert code == 0
    assert "DEBUG" in err
    assert "DEBUG" not in out
    SolveResponse.model_validate_json(out)


# ---------- config ----------
def test_config_file(capsys, tmp_path):
    path = tmp_path / "p1.conf"
    path.write_text("# P1\na = 1\nc = 0.5\n\nderive = b\n")
    code, out, _ = run(capsys, "solve", "--config", str(path))
    assert code == 0
    assert SolveResponse.model_validate_json(out).views.coulomb.E == pytest.approx(1.0)


def test_flags_override_config(capsys, tmp_path):
    path = tmp_path / "p.conf"
    path.write_text("a = 5\nc = 0.5\n")
    code, out, _ = run(capsys, "solve", "--config", str(path), "--a", "1", "--derive", "b")
    assert code == 0
    assert SolveResponse.model_validate_json(out).inputs.params.a == 1.0


def test_config_unknown_key(capsys, tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("a = 1\ncolour = blue\n")
    code, _, err = run(capsys, "solve", "--config", str(path))
    assert code == 1
    assert "colour" in envelope(err)["message"]


# ---------- verify ----------
def test_verify_p1(capsys):
    code, out, _ = run(capsys, "verify", *P1)
    assert code == 0
    report = VerificationReport.model_validate_json(out)
    assert report.failed == []
    checks = {check.name: check for check in report.checks}
    for name in (
        "riccati_coulomb",
        "riccati_coulomb_unperturbed",
        "perturbation_coulomb",
        "riccati_oscillator",
        "perturbation_oscillator",
        "dual_view_energy",
        "dual_view_psi",
        "eigensolver_ground",
        "ground_h_residual",
        "spectrum_spacing",
        "oracle_n0_root",
    ):
        assert checks[name].kind == "assert"
        assert checks[name].pass_
    shape = checks["shape_invariance"].value
    assert shape["R"] == pytest.approx(1.0)
    assert shape["mismatch"]["-1"] == pytest.approx(1.0)
    assert shape["a1_minus_a0"] == pytest.approx(1.0)
    roots = checks["oracle_n1_roots"].value
    assert roots["straddles"] is True
    assert roots["node_counts"] == [0, 1]
    ladder = checks["ladder_n1_residual"].value
    assert ladder["a1"] < ladder["a0"]


def test_verify_is_deterministic(capsys):
    _, first, _ = run(capsys, "verify", *P1)
    _, second, _ = run(capsys, "verify", *P1)
    assert first == second


def test_verify_hydrogen(capsys):
    code, out, _ = run(capsys, "verify", "--a", "1")
    assert code == 0
    report = VerificationReport.model_validate_json(out)
    names = [check.name for check in report.checks]
    assert "eigensolver_ground" in names
    assert "spectrum_spacing" not in names


def test_verify_radial_oscillator(capsys):
    code, out, _ = run(capsys, "verify", "--c", "0.5")
    assert code == 0
    report = VerificationReport.model_validate_json(out)
    comparison = next(check for check in report.checks if check.name == "spectrum_vs_numeric").value
    assert comparison["closed_form"] == pytest.approx([1.5, 2.5, 3.5])
    assert comparison["numeric"] == pytest.approx([1.5, 3.5, 5.5], abs=1e-4)


def test_verify_failure_exits_3(capsys, tmp_path):
    path = tmp_path / "strict.conf"
    path.write_text("tol_eigen = 1e-15\n")
    code, out, err = run(capsys, "verify", *P1, "--config", str(path))
    assert code == 3
    report = VerificationReport.model_validate_json(out)
    assert "eigensolver_ground" in report.failed
    assert envelope(err)["data"]["failed"] == report.failed


def test_verify_table(capsys):
    code, out, _ = run(capsys, "verify", *P1, "--out", "table")
    assert code == 0
    assert "all asserts passed" in out


@pytest.mark.parametrize("N", ["2", "4"])
def test_verify_even_dimension(capsys, N):
    code, out, _ = run(capsys, "verify", *P1, "--N", N)
    assert code == 0
    checks = {check.name: check for check in VerificationReport.model_validate_json(out).checks}
    assert checks["eigensolver_ground"].kind == "assert"
    assert checks["eigensolver_ground"].pass_
    assert checks["ground_h_residual"].kind == "info"


# ---------- oracle ----------
def test_oracle_n1(capsys):
    code, out, _ = run(capsys, "oracle", "--b", "1", "--c", "0.5", "--n", "1", "--check")
    assert code == 0
    doc = OracleResponse.model_validate_json(out)
    assert doc.constraint_polynomial == pytest.approx([1.0, -3.0, 1.0])
    assert [s.A_root for s in doc.solutions] == pytest.approx([0.3819660112501051, 2.618033988749895], abs=1e-10)
    assert all(s.residual <= 1e-6 for s in doc.solutions)
    assert all(s.E == pytest.approx(2.0) for s in doc.solutions)
    assert all(s.grid.count == 60000 for s in doc.solutions)


def test_oracle_n3_check(capsys):
    code, out, _ = run(capsys, "oracle", "--b", "1", "--c", "0.5", "--n", "3", "--check")
    assert code == 0
    doc = OracleResponse.model_validate_json(out)
    assert len(doc.solutions) == 4
    assert all(s.residual <= 1e-6 for s in doc.solutions)


def test_oracle_without_check_has_no_residual(capsys):
    _, out, _ = run(capsys, "oracle", "--b", "1", "--c", "0.5", "--n", "0")
    doc = OracleResponse.model_validate_json(out)
    assert doc.solutions[0].residual is None
    assert doc.solutions[0].A_root == pytest.approx(1.0)


def test_oracle_cap(capsys):
    code, _, _ = run(capsys, "oracle", "--b", "1", "--c", "0.5", "--n", "9")
    assert code == 1


# ---------- eig ----------
def test_eig_hydrogen(capsys):
    code, out, _ = run(capsys, "eig", "--a", "1", "--k", "2", "--rmax", "40", "--h", "0.004")
    assert code == 0
    doc = EigResponse.model_validate_json(out)
    assert doc.inputs.grid.count == 10000
    assert doc.energies == pytest.approx([-0.5, -0.125], abs=1e-4)


def test_eig_richardson(capsys):
    _, out, _ = run(capsys, "eig", "--a", "1", "--k", "1", "--rmax", "40", "--h", "0.002", "--richardson")
    doc = EigResponse.model_validate_json(out)
    assert doc.richardson
    assert doc.energies[0] == pytest.approx(-0.5, abs=5e-5)


# ---------- sweep ----------
def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_derived_b(capsys):
    code, out, _ = run(capsys, "sweep", "--c", "0.5", "--derive", "b", "--range", "a=0.5,1,2")
    assert code == 0
    assert out.splitlines()[0] == ",".join(SWEEP_HEADER)
    rows = parse_csv(out)
    assert [float(row["b"]) for row in rows] == pytest.approx([0.5, 1.0, 2.0])
    for row in rows:
        assert float(row["abs_err"]) <= 1e-4
        assert abs(float(row["constraint_residual"])) <= 1e-14


def test_sweep_product_order(capsys):
    code, out, _ = run(capsys, "sweep", "--c", "0.5", "--derive", "b", "--range", "a=1,2", "--range", "N=3,5")
    assert code == 0
    rows = parse_csv(out)
    assert [(float(r["a"]), int(r["N"])) for r in rows] == [(1.0, 3), (1.0, 5), (2.0, 3), (2.0, 5)]


def test_sweep_off_constraint_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--a", "1", "--c", "0.5", "--range", "b=0.5,1")
    assert code == 0
    off, on = parse_csv(out)
    assert off["E_closed"] == "" and off["abs_err"] == ""
    assert float(off["constraint_residual"]) == pytest.approx(-0.5)
    assert float(on["E_closed"]) == pytest.approx(1.0)


def test_sweep_empty_range(capsys):
    code, out, _ = run(capsys, "sweep", "--c", "0.5", "--derive", "b", "--range", "a=")
    assert code == 0
    assert out == ",".join(SWEEP_HEADER) + "\n"


@pytest.mark.parametrize("spec", ["x=1,2", "a", "a=1,two", "N=3.5"])
def test_sweep_malformed_range(capsys, spec):
    code, _, _ = run(capsys, "sweep", "--c", "0.5", "--derive", "b", "--range", spec)
    assert code == 1


def test_sweep_jobs_preserve_order(capsys):
    argv = ["sweep", "--c", "0.5", "--derive", "b", "--range", "a=0.5:2:4"]
    _, serial, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--jobs", "2")
    assert serial == parallel
    assert len(parse_csv(serial)) == 4


def test_sweep_two_dimensional_row(capsys):
    code, out, _ = run(capsys, "sweep", "--c", "0.5", "--derive", "b", "--N", "2", "--range", "a=1")
    assert code == 0
    (row,) = parse_csv(out)
    assert float(row["b"]) == pytest.approx(2.0)
    assert float(row["E_closed"]) == pytest.approx(-1.0)
    assert float(row["abs_err"]) <= 1e-4


# ---------- schema ----------
def test_schema_report(capsys):
    code, out, _ = run(capsys, "schema", "--model", "report")
    assert code == 0
    schema = json.loads(out)
    assert "checks" in schema["properties"]


# ---------- golden documents ----------
GOLDEN = Path(__file__).parent / "golden"


def assert_subset(expected, actual, path="$"):
    """Every key in expected is present in actual with an equal value; floats to 1e-12."""
    if isinstance(expected, dict):
        assert isinstance(actual, dict), path
        for key, value in expected.items():
            assert key in actual, f"{path}.{key} missing"
            assert_subset(value, actual[key], f"{path}.{key}")
    elif isinstance(expected, list):
        assert isinstance(actual, list) and len(actual) == len(expected), path
        for i, (e, a) in enumerate(zip(expected, actual)):
            assert_subset(e, a, f"{path}[{i}]")
    elif isinstance(expected, (int, float)) and not isinstance(expected, bool):
        assert actual == pytest.approx(expected, rel=1e-12, abs=1e-12), path
    else:
        assert actual == expected, path


@pytest.mark.parametrize("name, argv", [
    ("solve_p1", ["solve", *P1]),
    ("solve_hydrogen", ["solve", "--a", "1", "--rmax", "40", "--h", "0.001"]),
])
def test_solve_golden(capsys, name, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    expected = json.loads((GOLDEN / f"{name}.json").read_text())
    actual = json.loads(out)
    if name == "solve_hydrogen":
        # trapezoid normalization on the grid
        assert actual["psi"]["N0"] == pytest.approx(expected["psi"].pop("N0"), rel=1e-6)
    assert_subset(expected, actual)
