import io
import json
import subprocess
import sys

import pytest

from test_scenarios import LABELS
from revode.cli import EXIT_FAILED, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, run_command


def run(argv):
    out = io.StringIO()
    rep, code = run_command(argv, out)
    return rep, code, out.getvalue()


@pytest.mark.parametrize("name", ["7.1", "7.2", "7.3", "7.4", "r2.3", "r3.17"], ids=LABELS)
def test_verify_example_exit_ok(name):
    _, code, text = run(["verify-example", name])
    assert code == EXIT_OK
    assert text.rstrip().endswith("result: ok")


def test_output_is_deterministic(tmp_path):
    j1, j2 = tmp_path / "a.json", tmp_path / "b.json"
    _, _, t1 = run(["--json", str(j1), "verify-example", "7.4"])
    _, _, t2 = run(["verify-example", "7.4", "--json", str(j2)])
    assert t1 == t2
    assert j1.read_text() == j2.read_text()
    assert json.loads(j1.read_text())["ok"] is True


def test_analyze():
    _, code, text = run(["analyze", "y'' - (z^4 - 3*z^2 - 1)/(z^4 - 1)^2 * y", "--point", "2"])
    assert code == EXIT_OK
    assert "singular point oo" in text
    assert "exponents: {0, 1}" in text


def test_series_command():
    _, code, text = run(["series", "z^2*y'' - 2*y", "--exponent", "2", "--order", "10"])
    assert code == EXIT_OK and "[PASS] residual vanishes" in text


def test_invariants_command():
    _, code, text = run(["invariants", "G27", "--degree", "3", "--variables", "X,Y,Z"])
    assert code == EXIT_OK and "dimension:" in text


def test_symmetries_command():
    op = "y''' + 21*(x^2-x+1)/(25*x^2*(x-1)^2)*y' + 21*(-2*x^3+3*x^2-5*x+2)/(50*x^3*(x-1)^3)*y"
    _, code, text = run(["symmetries", op, "--var", "x"])
    assert code == EXIT_OK
    assert "-x + 1: factor -1" in text and "order: 2" in text


def test_lift_command():
    op = "y'' - (z^4 - 3*z^2 - 1)/(z^4 - 1)^2 * y"
    _, code, text = run(["lift", op, "--map", "z -> -z", "--point", "0", "--order", "40"])
    assert code == EXIT_OK
    assert "C: [1, 0; 0, -1]" in text and "F: [1, 0; 0, -1]" in text
    _, code, _ = run(["lift", op, "--map", "z -> z + 1", "--point", "oo"])
    assert code == EXIT_FAILED


def test_descend_command():
    _, code, _ = run(["descend", "x*y'' - y'", "--var", "x", "--map", "x^2", "--downstairs", "y''"])
    assert code == EXIT_OK
    _, code, text = run(["descend", "y'' + y", "--map", "z^2", "--downstairs", "y''"])
    assert code == EXIT_FAILED and "residual" in text


def test_groups_command():
    _, code, text = run(["groups", "G27", "--normal-in", "F36"])
    assert code == EXIT_OK
    assert "order: 27" in text and "index: 4" in text


def test_knabla_command():
    _, code, text = run(["knabla", "7.2", "--witness", "(4*X41 + X21^2)/(2*X44)", "--unit", "X21"])
    assert code == EXIT_OK and "classification: basic" in text


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["analyze", "y'' + + y"],
        ["verify-example", "9.9"],
        ["groups", "NoSuchGroup"],
        ["series", "y''"],
    ],
)
def test_usage_errors(argv):
    _, code, _ = run(argv)
    assert code == EXIT_USAGE


def test_bad_order_environment(monkeypatch):
    monkeypatch.setenv("REVODE_ORDER", "abc")
    _, code, _ = run(["verify-example", "7.4"])
    assert code == EXIT_USAGE


def test_order_environment_is_used(monkeypatch):
    rep_default, _, _ = run(["verify-example", "7.2"])
    monkeypatch.setenv("REVODE_ORDER", "50")
    rep, code, _ = run(["verify-example", "7.2"])
    assert code == EXIT_OK
    assert [c.certified_order for c in rep.checks] != [c.certified_order for c in rep_default.checks]


def test_internal_error_exit_code(monkeypatch):
    import revode.cli as cli

    def boom(args):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "cmd_analyze", boom)
    _, code, _ = run(["analyze", "y''"])
    assert code == EXIT_INTERNAL


def test_console_entry_point():
    p = subprocess.run([sys.executable, "-m", "revode.cli", "verify-example", "r3.17"], capture_output=True, text=True)
    assert p.returncode == EXIT_OK
    assert "result: ok" in p.stdout
