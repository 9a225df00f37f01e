import csv
import json

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from otfkm import cli
from otfkm.report import REPORT_SCHEMA, CheckRecord, ConfigError, RunConfig, load_config
from otfkm.suites import CASES


def test_empty_config_defaults(tmp_path):
    f = tmp_path / "c.json"
    f.write_text("")
    cfg = load_config(f)
    assert (cfg.samples, cfg.fd_step, cfg.seed) == (100, 1e-5, 0)
    f.write_text("{}")
    assert load_config(f) == cfg
    assert load_config() == cfg


def test_config_accepts_registry_case():
    cfg = load_config(known_cases=CASES, case="prop1", m=2, k=2)
    assert (cfg.case, cfg.m, cfg.k) == ("prop1", 2, 2)


@pytest.mark.parametrize(
    "kw,match",
    [
        ({"m": 9}, "Clifford systems supported for m ≤ 7"),
        ({"k": 0}, "k:"),
        ({"samples": 0}, "samples:"),
        ({"fd_step": -1.0}, "fd_step:"),
        ({"case": "nope"}, "unknown case"),
    ],
)
def test_config_rejects(kw, match):
    with pytest.raises(ConfigError, match=match):
        load_config(known_cases=CASES, **kw)


def test_config_parse_error_line(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{\n  "samples": 10,\n  "seed": ,\n}\n')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(f)


def test_config_unknown_key(tmp_path):
    f = tmp_path / "c.json"
    f.write_text('{"sample": 3}')
    with pytest.raises(ConfigError, match="sample"):
        load_config(f)


def test_config_file_and_flags_merge(tmp_path):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"case": "jtilde", "samples": 5, "tolerances": {"a": 1.0}}))
    cfg = load_config(f, known_cases=CASES, samples=7, tolerances={"b": 2.0})
    assert cfg.samples == 7 and cfg.case == "jtilde"
    assert cfg.tolerances == {"a": 1.0, "b": 2.0}


def test_tol_flag_malformed(capsys):
    assert cli.main(["verify", "--case", "algebra", "--tol", "oops"]) == 2
    assert "--tol" in capsys.readouterr().err


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0, 1e3), st.sampled_from(["max", "min"]))
def test_pass_monotone_in_tolerance(value, tol, extra, kind):
    loose = tol + extra if kind == "max" else tol - extra
    a = CheckRecord("c", value, tol, kind)
    b = CheckRecord("c", value, loose, kind)
    assert not a.passed or b.passed


def test_failed_status_never_passes():
    assert not CheckRecord("c", 0.0, 1.0, status="sampler-failure").passed
    assert not CheckRecord("c", float("nan"), 1.0).passed


def test_list_cases(capsys):
    assert cli.main(["list-cases"]) == 0
    out = capsys.readouterr().out
    for name in ["prop1", "theorem-m1", "prop3-frames", "prop4", "remark-curvature", "algebra", "jtilde"]:
        assert name in out


@pytest.mark.parametrize("case", ["algebra", "prop1", "jtilde", "infrastructure"])
def test_report_byte_identical(case, tmp_path):
    args = ["verify", "--case", case, "--samples", "10", "--seed", "3"]
    assert cli.main(args + ["--out", str(tmp_path / "a.json")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b.json")]) == 0
    a, b = (tmp_path / "a.json").read_bytes(), (tmp_path / "b.json").read_bytes()
    assert a == b
    assert b"\r" not in a and a.endswith(b"\n")
    doc = json.loads(a)
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert list(doc) == ["case", "seed", "samples", "fd_step", "checks", "duration_ms"]
    assert doc["duration_ms"] is None


def test_csv_summary(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["verify", "--case", "algebra", "--samples", "5", "--format", "csv-summary", "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    rep = cli.run_case(load_config(known_cases=CASES, case="algebra", samples=5))
    assert rows[0] == ["name", "max_residual", "tolerance", "pass", "gating"]
    assert len(rows) - 1 == len(rep.checks)


def test_floats_have_17_digits(tmp_path):
    out = tmp_path / "a.json"
    cli.main(["verify", "--case", "prop1", "--samples", "3", "--out", str(out)])
    doc = json.loads(out.read_text())
    assert doc["fd_step"] == "1.0000000000000001e-05"
    for c in doc["checks"]:
        for key in ("max_residual", "tolerance"):
            assert format(float(c[key]), ".17g") == c[key]


def test_timing_opt_in(tmp_path):
    out = tmp_path / "a.json"
    cli.main(["verify", "--case", "algebra", "--samples", "2", "--timing", "--out", str(out)])
    assert json.loads(out.read_text())["duration_ms"] >= 0


def test_failing_tolerance_exit_status(tmp_path, capsys):
    # a zero tolerance on a floating-point residual must fail and set the exit status
    args = ["verify", "--case", "jtilde", "--samples", "5", "--tol", "jtilde_squared_dim6=0", "--out", str(tmp_path / "r.json")]
    assert cli.main(args) == 1
    doc = json.loads((tmp_path / "r.json").read_text())
    names = [c["name"] for c in doc["checks"]]
    assert names.index("jtilde_squared_dim6") < len(names) - 1  # later checks still ran
    assert {c["name"]: c["pass"] for c in doc["checks"]}["jtilde_squared_dim6"] is False


def test_report_only_checks_do_not_gate():
    rep = cli.run_case(load_config(known_cases=CASES, case="prop1", m=2, k=2, samples=3))
    probe = [c for c in rep.checks if c.name.startswith("m0_nijenhuis_probe")]
    assert probe and not probe[0].gating
    assert rep.ok


def test_witness_gating_depends_on_seed():
    default = cli.run_case(load_config(known_cases=CASES, case="jtilde", samples=5))
    other = cli.run_case(load_config(known_cases=CASES, case="jtilde", samples=5, seed=11))
    pick = lambda rep: next(c for c in rep.checks if "witness" in c.name)  # noqa: E731
    assert pick(default).gating and not pick(other).gating
    assert pick(default).witness is not None


def test_sampler_failure_is_recorded(monkeypatch):
    from otfkm import geometry

    def broken(*a, **k):
        raise geometry.ProjectionError("no convergence", 1.0)

    monkeypatch.setattr(geometry, "sample_point", broken)
    rep = cli.run_case(RunConfig(case="prop1", samples=2))
    assert rep.checks and all(c.status == "sampler-failure" for c in rep.checks)
    assert not rep.ok


def test_curvature_scan(tmp_path):
    out = tmp_path / "k.csv"
    assert cli.main(["curvature-scan", "--points", "2", "--planes", "5", "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["point_index", "plane_index", "K"]
    assert len(rows) == 11
    assert rows[1][:2] == ["0", "0"]
