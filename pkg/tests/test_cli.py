"""Command-line behaviour: exit codes, JSON schema, config files and determinism."""
import json

import pytest

from b3gc import cli
from b3gc.config import ConfigError, build_config, parse_config_text, parse_surgery

SCHEMA = {"case", "grid", "step", "checks", "surgeries", "totals", "timing"}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_pass_json(capsys):
    code, out, _ = run(capsys, "verify", "--case", "typechange-CxR", "--grid", "12", "--format", "json")
    assert code == 0
    rep = cli.parse_report(out)
    assert SCHEMA <= set(rep)
    assert rep["totals"]["verdict"] == "pass"
    assert all(c["verdict"] == "pass" for c in rep["checks"])
    assert set(rep["checks"][0]) >= {"name", "verdict", "worst_residual", "worst_point"}


def test_verify_fail_exit_one(capsys):
    code, _, err = run(capsys, "verify", "--case", "glued-S2xS1", "--grid", "12", "--tol-overlap", "1e-17")
    assert code == 1 and "check failed" in err


@pytest.mark.parametrize("argv", [
    ["verify", "--case", "no-such-case"],
    ["verify"],
    ["verify", "--case", "typechange-CxR", "--grid", "4"],
    ["surgery", "--surgery", "0,2"],
    ["surgery", "--surgery", "0,1", "--grid", "16"],
    ["verify", "--bogus"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_text_format(capsys):
    code, out, _ = run(capsys, "verify", "--case", "cosymplectic-T3", "--grid", "8")
    assert code == 0
    assert "verdict: pass" in out and "[PASS]" in out


def test_json_roundtrip_and_determinism(capsys, tmp_path):
    reps = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert cli.main(["verify", "--case", "nacs-T3", "--grid", "8", "--format", "json",
                         "--out", str(path), "--seed", "7"]) == 0
        reps.append(json.loads(path.read_text()))
    for r in reps:
        r.pop("timing")
    assert reps[0] == reps[1]
    assert cli.parse_report(cli.emit(reps[0], "json")) == reps[0]


def test_surgery_command(capsys):
    code, out, _ = run(capsys, "surgery", "--surgery", "0,1", "--grid", "32", "--period-grid", "32",
                       "--format", "json")
    assert code == 0
    rep = cli.parse_report(out)
    assert rep["locus_count"] == 1 and rep["totals"]["verdict"] == "twisted B3-structure"
    assert set(rep["surgeries"][0]) == {"p", "q", "c", "h_period", "f_period_proxy", "glue_residual"}


def test_sweep_rejects_c_zero_and_reports_convergence(capsys):
    code, out, _ = run(capsys, "sweep", "--p", "1", "--q", "-1", "--c", "0,2", "--grid", "32",
                       "--period-grid", "16", "--convergence", "--format", "json")
    assert code == 0
    rep = cli.parse_report(out)
    verdicts = [c["verdict"] for c in rep["checks"]]
    assert verdicts == ["rejected", "pass"]
    row = rep["surgeries"][0]
    assert 3 < row["fd_ratio"] < 5 and row["fd_residual_h"] > row["fd_residual_h2"]


CONFIG = """
# run settings
case = typechange-CxR
grid = 20
tol.integrability = 1e-5

[surgery]
p = 0
q = 1

[surgery]
p = 1
q = -1
c = 2
center = 5, 0
"""


def test_config_parsing_and_precedence(tmp_path):
    settings, surgeries = parse_config_text(CONFIG)
    assert settings["grid"] == 20 and settings["case"] == ["typechange-CxR"]
    assert [(s.p, s.q, s.c) for s in surgeries] == [(0, 1, 1.0), (1, -1, 2.0)]
    cfg = build_config(settings, surgeries, {"grid": 24, "step": None})
    assert cfg.grid == 24 and cfg.step is None and cfg.tol.integrability == 1e-5
    assert len(cfg.surgeries) == 2
    cfg = build_config(settings, surgeries, {"surgeries": [parse_surgery("2,1")]})
    assert [(s.p, s.q) for s in cfg.surgeries] == [(2, 1)]
    path = tmp_path / "run.cfg"
    path.write_text(CONFIG)
    args = cli.build_parser().parse_args(["verify", "--config", str(path), "--grid", "12"])
    cfg = cli.config_from_args(args)
    assert cfg.grid == 12 and cfg.cases == ["typechange-CxR"]


@pytest.mark.parametrize("text", ["[other]\n", "grid\n", "grid = x\n", "tol.nope = 1\n",
                                  "[surgery]\nfoo = 1\n", "bogus = 1\n"])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_parse_surgery():
    s = parse_surgery("2,-1,0.5,1.2,1.6")
    assert (s.p, s.q, s.c, s.a, s.b) == (2, -1, 0.5, 1.2, 1.6)
    for bad in ("1", "a,b", "1,1,2,3,4,5"):
        with pytest.raises(ConfigError):
            parse_surgery(bad)
