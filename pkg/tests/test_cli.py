"""CLI surface: documented examples, exit codes, determinism, round-trip."""

import json

import pytest

from ultralift import cli
from ultralift.errors import StallError
from ultralift.lifting import LiftCertificate
from ultralift.padics import parse_padic


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_lift1d_documented_example(capsys):
    code, out, _ = run_cli(capsys, "lift1d", "--ground", "padic:3:12",
                           "--poly", "1*X0^2 + -7", "--point", "1")
    assert code == 0
    sol_line = next(l for l in out.splitlines() if l.startswith("solution:"))
    root = parse_padic(sol_line.split(": ", 1)[1])
    assert root.residue % 9 == 4
    befores = [int(l.split()[1]) for l in out.splitlines()
               if l.strip() and l.split()[0].isdigit()]
    assert befores == sorted(befores)
    assert "reverified: True" in out


def test_integrate_t_inverse_exits_2_naming_the_exponent(capsys):
    code, out, err = run_cli(capsys, "integrate", "--ground", "rosenlicht:1:20",
                             "--target", "1*t^(-1) + O(t^(20))")
    assert code == 2
    assert "-1" in out


def test_invert_series_documented_example(capsys):
    code, out, _ = run_cli(capsys, "invert-series", "--ground", "series:q:1:12",
                           "--coeffs", "1;1",
                           "--target", "1*t^(1) + O(t^(12))")
    assert code == 0
    sol = next(l for l in out.splitlines() if l.startswith("solution:"))
    assert sol.split(": ", 1)[1].startswith(
        "1*t^(1) + -1*t^(2) + 2*t^(3)")


def test_boundary_hypothesis_exits_2(capsys):
    code, out, _ = run_cli(capsys, "lift1d", "--ground", "padic:3:12",
                           "--poly", "3*X0 + -9", "--point", "0")
    assert code == 2
    assert "v f(b)" in out


def test_parse_error_exits_64(capsys):
    code, _, err = run_cli(capsys, "lift1d", "--ground", "nonsense",
                           "--poly", "1*X0", "--point", "0")
    assert code == 64
    assert "bad ground" in err


def test_missing_payload_exits_64(capsys):
    code, _, err = run_cli(capsys, "lift1d", "--ground", "padic:3:10",
                           "--point", "1")
    assert code == 64


def test_tower_cap_exits_70(capsys):
    code, out, _ = run_cli(capsys, "dsolve", "--ground", "vdfield:2:8",
                           "--target", "1*t^(1) + O(t^(8))",
                           "--tower-cap", "1")
    assert code == 70


def test_dhensel_non_surjective_residue_exits_2(capsys):
    # F_p-only residue field: x^2 - x misses 1, reported with the equation
    code, out, _ = run_cli(capsys, "dhensel", "--ground", "vdfield:2:8",
                           "--poly", "1*X1 + -1*{1*t^(1) + O(t^(8))}",
                           "--point", "0", "--nvars", "2",
                           "--tower-cap", "1")
    assert code == 2
    assert "surjective" in out


def test_stall_exit_code_mapping(capsys, monkeypatch):
    def stall(job, rep):
        raise StallError("synthetic stall",
                         certificate=LiftCertificate((), None, None, "stalled"))

    monkeypatch.setitem(cli._HANDLERS, "lift1d", stall)
    code, out, _ = run_cli(capsys, "lift1d", "--ground", "padic:3:10",
                           "--poly", "1*X0", "--point", "0")
    assert code == 3
    assert "stalled" in out


def test_byte_identical_reports(capsys):
    args = ("dhensel", "--ground", "vdfield:2:10",
            "--poly", "1*X1^2 + 1*X1 + -1*{1*t^(2) + O(t^(10))}",
            "--point", "0", "--nvars", "2", "--seed", "7")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_structured_report_is_json(capsys):
    code, out, _ = run_cli(capsys, "lift1d", "--ground", "padic:3:12",
                           "--poly", "1*X0^2 + -7", "--point", "1",
                           "--report", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "lift1d"
    assert doc["outcome"] == "converged-at-precision"
    assert doc["reverified"] is True
    befores = [s[0] for s in doc["steps"]]
    assert befores == sorted(befores, key=lambda v: float(v))


def test_liftnd_and_implicit_commands(capsys):
    code, out, _ = run_cli(capsys, "liftnd", "--ground", "padic:3:12",
                           "--poly", "1*X0^2 + -7", "--poly", "1*X1^2 + -1*X0",
                           "--point", "1;1", "--precision", "10")
    assert code == 0 and "reverified: True" in out
    code, out, _ = run_cli(capsys, "implicit", "--ground", "padic:3:12",
                           "--poly", "1*X1^2 + -1*X0 + -1",
                           "--point", "0;1", "--target", "9",
                           "--precision", "10")
    assert code == 0 and "reverified: True" in out


def test_ode_and_subgroup_commands(capsys):
    code, out, _ = run_cli(capsys, "ode", "--ground", "rosenlicht:1:24",
                           "--poly", "1*X0^2", "--target",
                           "1*t^(2) + O(t^(24))", "--r", "2",
                           "--precision", "21", "--nvars", "2")
    assert code == 0 and "reverified: True" in out
    assert "1/3*t^(3)" in out
    code, out, _ = run_cli(capsys, "subgroup", "--ground", "series:f2:1:20",
                           "--addpoly", "0;1", "--window", "0:6",
                           "--approx", "1*t^(1) + O(t^(60))")
    assert code == 0
    assert "pseudo-direct on window: True" in out
    assert "achieved value: 1" in out


def test_pinv_lift_command(capsys):
    code, out, _ = run_cli(capsys, "pinv-lift", "--ground", "padic:3:12",
                           "--poly", "1*X0 + -9",
                           "--point", "0", "--pseudo-inverse", "1",
                           "--precision", "10")
    assert code == 0 and "reverified: True" in out


def test_headroom_does_not_change_certified_digits(capsys):
    outs = []
    for headroom in ("6", "12"):
        code, out, _ = run_cli(capsys, "lift1d", "--ground", "padic:3:12",
                               "--poly", "1*X0^2 + -7", "--point", "1",
                               "--headroom", headroom)
        assert code == 0
        outs.append(next(l for l in out.splitlines()
                         if l.startswith("solution:")))
    assert outs[0] == outs[1]


def test_stated_truncation_is_not_fabricated_past(capsys):
    # asking for more precision than the literal states must exit 70
    code, _, _ = run_cli(capsys, "invert-series", "--ground", "series:q:1:12",
                         "--coeffs", "1;1",
                         "--target", "1*t^(1) + O(t^(8))",
                         "--precision", "12")
    assert code == 70
