import json
import shutil
import subprocess
import sys

import pytest

from polyalaw.cli import ConfigError, RunConfig, default_order, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_certified_equation_exits_zero(capsys):
    code, out, _ = run(capsys, "analyze", "w = z + z*w^2", "--order", "400")
    assert code == 0
    assert "rho" in out and "Certified" in out


def test_rejected_equation_exits_two(capsys):
    code, out, _ = run(capsys, "analyze", "w = z + z*w", "--order", "64")
    assert code == 2
    assert "linear" in out


def test_parse_error_exits_one(capsys):
    code, _, err = run(capsys, "analyze", "w = z + * w")
    assert code == 1
    assert "parse error" in err and "column" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "w = z + z*w^2", "--order", "10"],
        ["analyze", "w = z + z*w^2", "--order", "5000"],
        ["analyze", "w = z + z*w^2", "--tol", "0.1"],
        ["analyze", "w = z + z*w^2", "--fit-threshold", "1.5"],
        ["analyze", "w = z + z*w^2", "--m-max", "2"],
        ["analyze"],
        ["selftest", "--tol", "1"],
    ],
)
def test_bad_configuration_exits_one(capsys, argv):
    assert run(capsys, *argv)[0] == 1


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["analyze", "--order", "many", "w = z"]])
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1
    capsys.readouterr()


def test_json_output_parses(capsys):
    code, out, _ = run(capsys, "analyze", "w = z + z*Seq(w)", "--order", "300", "--json")
    d = json.loads(out)
    assert code == d["exit_code"] == 0
    assert d["rho"] == pytest.approx(0.25, abs=1e-9)


def test_file_input(capsys, tmp_path):
    f = tmp_path / "eq.txt"
    f.write_text("w = z + z*MSet(w)\n")
    code, out, _ = run(capsys, "analyze", "-f", str(f), "--order", "200")
    assert code == 0
    code2, out2, _ = run(capsys, "analyze", str(f), "--order", "200")
    assert code2 == 0 and out2 == out


def test_missing_file_exits_one(capsys, tmp_path):
    assert run(capsys, "analyze", "-f", str(tmp_path / "nope.txt"))[0] == 1


def test_inline_and_file_conflict(capsys, tmp_path):
    f = tmp_path / "eq.txt"
    f.write_text("w = z + z*w^2")
    assert run(capsys, "analyze", "w = z + z*w^2", "-f", str(f))[0] == 1


def test_order_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("POLYA_ORDER", "48")
    code, out, _ = run(capsys, "coeffs", "w = z + z*w^2", "--json")
    assert code == 0
    assert json.loads(out)["order"] == 48
    monkeypatch.setenv("POLYA_ORDER", "lots")
    assert run(capsys, "coeffs", "w = z + z*w^2")[0] == 1


def test_coeffs_plain(capsys):
    code, out, _ = run(capsys, "coeffs", "w = z + z*MSet(w)", "--order", "5")
    assert code == 0
    lines = out.split()
    assert lines[:5] == ["1", "1", "2", "4", "9"]
    assert lines[-1] == "1,1,2,4,9"


def test_coeffs_fractions(capsys):
    code, out, _ = run(capsys, "coeffs", "w = z + z*expm1(w)", "--order", "4", "--json")
    assert code == 0
    assert json.loads(out)["coefficients"] == ["1", "1", "3/2", "8/3"]


def test_coeffs_not_retro(capsys):
    code, _, err = run(capsys, "coeffs", "w = z + w + z*w^2", "--order", "5")
    assert code == 2
    assert "not retro" in err


def test_coeffs_order_bounds(capsys):
    assert run(capsys, "coeffs", "w = z + z*w", "--order", "0")[0] == 1
    assert run(capsys, "coeffs", "w = z + z*w", "--order", "1")[0] == 0


def test_run_config_validation():
    RunConfig()
    with pytest.raises(ConfigError):
        RunConfig(output="yaml")
    with pytest.raises(ConfigError):
        RunConfig(order=31)
    assert default_order({}) == 600
    assert default_order({"POLYA_ORDER": "100"}) == 100


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "polyalaw", "analyze", "w = z + z*w", "--order", "64"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2


@pytest.mark.skipif(shutil.which("polyalaw") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(
        ["polyalaw", "coeffs", "w = z + z*w^2", "--order", "7"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "1,0,1,0,2,0,5"
