import json
import os

import pytest

from twistmoyal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_stdout(capsys):
    code, out, _ = run(capsys, "spectrum", "--e1", "1.5", "--n", "2")
    assert code == 0
    data = json.loads(out)
    assert data["solution"]["E"] == 4.0


def test_deterministic_output(capsys):
    a = run(capsys, "residuals", "--which", "ode1,ode2", "--n-max", "3")
    b = run(capsys, "residuals", "--which", "ode1,ode2", "--n-max", "3")
    assert a[0] == 0 and a[1] == b[1]


@pytest.mark.parametrize("argv", [
    ["algebra-verify", "--params", "theta"],
    ["algebra-verify", "--params", "bogus=1"],
    ["algebra-verify", "--order", "0"],
    ["transform-verify", "--params", "theta=0"],
    ["residuals", "--grid", "ode1=xt1:1:0:5"],
    ["residuals", "--grid", "nope=xt1:0:1:5"],
    ["spectrum", "--e1", "1", "--n", "1", "--format", "csv"],
    ["spectrum", "--e1", "1", "--n", "1", "--config", "/nonexistent/file"],
    ["spectrum", "--e1", "-1", "--n", "1"],
    ["no-such-command"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_config_file_and_out_dir(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# preset\nparams=theta=1/2,omega2=2\nformat=both\n")
    out = tmp_path / "out"
    code, _, _ = run(capsys, "transform-verify", "--config", str(cfg), "--out", str(out))
    assert code == 0
    data = json.loads((out / "transform-verify.json").read_text())
    assert data["params"]["theta"] == "1/2"
    code, _, _ = run(capsys, "spectrum", "--e1", "1", "--n", "0", "--config", str(cfg), "--out", str(out))
    assert code == 0
    assert any(name.endswith(".csv") for name in os.listdir(out))


def test_hamiltonian_expand_compare(capsys):
    code, out, _ = run(capsys, "hamiltonian-expand", "--compare")
    assert code == 0
    assert "comparison" in json.loads(out)
