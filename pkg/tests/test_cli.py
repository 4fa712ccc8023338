# tests/test_cli.py
import json

import pytest

from cycleweights.config import settings
from cycleweights.main import run_command


def test_saddle_prints_summary(capsys):
    assert run_command(["saddle", "--alpha", "1", "--n", "100"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["v_n"] == pytest.approx(0.0999584, abs=1e-7)
    assert out["scales"]["typical_cycle_scale"] == pytest.approx(10.0)
    assert set(out["diagnostics"]) == {"residual", "width", "monotonicity_violations", "bn_ratio"}


def test_saddle_small_n_skips_diagnostics(capsys):
    assert run_command(["saddle", "--vartheta", "2", "--n", "20"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["diagnostics"] is None
    assert out["ell_n"] is None


def test_oracle_longest_cycle_pmf(capsys):
    assert run_command(["oracle", "--alpha", "1", "--n", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "L1 pmf {1: 1/13, 2: 6/13, 3: 6/13}"
    assert lines[-1] == "pass"


def test_oracle_ewens_report(tmp_path):
    out = tmp_path / "oracle.json"
    assert run_command(["oracle", "--vartheta", "2", "--n", "8", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert any(c["name"] == "h_8_rising_factorial" and c["pass"] for c in report["checks"])


@pytest.mark.parametrize("argv", [
    ["saddle", "--alpha", "1", "--vartheta", "2", "--n", "100"],
    ["saddle", "--n", "100"],
    ["saddle", "--alpha", "1", "--n", "0"],
    ["saddle", "--alpha", "-1", "--n", "100"],
    ["saddle", "--alpha", "1", "--n", "100", "--unknown"],
    ["saddle", "--alpha", "1", "--n", "100", "--tol", "nonsense=1"],
    ["saddle", "--alpha", "1", "--n", "100", "--tol", "ks_gumbel"],
    ["verify", "poisson", "--alpha", "1", "--n", "100", "--y-grid", "1,0.5"],
    ["verify", "--alpha", "1", "--n", "100"],
    ["htable", "--alpha", "1"],
    ["bogus"],
])
def test_validation_errors_exit_2(argv):
    assert run_command(argv) == 2


def test_numeric_failure_exits_3(monkeypatch):
    monkeypatch.setattr(settings, "SADDLE_MAX_ITER", 1)
    assert run_command(["saddle", "--alpha", "1", "--n", "100"]) == 3


def test_htable_then_sample_respects_cache_size(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    assert run_command(["htable", "--alpha", "1", "--n-max", "50", "--cache-dir", cache]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_max"] == 50

    out = tmp_path / "samples.jsonl"
    argv = ["sample", "--alpha", "1", "--n", "80", "--samples", "5", "--seed", "3", "--cache-dir", cache, "--out", str(out)]
    assert run_command(argv) == 2
    assert run_command(argv + ["--build"]) == 0
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(records) == 5
    assert all(sum(m * c for m, c in r["cycles"]) == 80 for r in records)


def test_expansions_polylog_csv(capsys):
    assert run_command(["expansions", "--kind", "polylog", "--deltas", "0,1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "delta,v,direct,approx,abs_error"
    assert len(lines) == 1 + 2 * 4
    delta, v, direct, approx, err = map(float, lines[1].split(","))
    assert (delta, v) == (0.0, 0.2)
    assert err == pytest.approx(abs(direct - approx))


def test_expansions_partial_csv(tmp_path):
    out = tmp_path / "partial.csv"
    argv = ["expansions", "--kind", "partial", "--deltas", "0", "--v-grid", "0.05", "--xv-grid", "10", "--out", str(out)]
    assert run_command(argv) == 0
    header, row = out.read_text().splitlines()
    assert header.split(",")[:3] == ["delta", "v", "x"]
    fields = dict(zip(header.split(","), row.split(",")))
    assert float(fields["x"]) == pytest.approx(200.0)
    assert float(fields["abs_error"]) <= 0.05 * float(fields["boundary"])
    assert fields["in_regime"] == "1"


def test_verify_is_deterministic(tmp_path):
    reports = []
    for i in range(2):
        out = tmp_path / f"bn-{i}.json"
        argv = [
            "verify", "bn", "--alpha", "1", "--n", "500", "--samples", "200", "--seed", "3",
            "--cache-dir", str(tmp_path / "cache"), "--out", str(out), "--tol", "bn_freq=0.5",
        ]
        assert run_command(argv) in (0, 1)
        report = json.loads(out.read_text())
        report.pop("created_at")
        reports.append(report)
    assert reports[0] == reports[1]
    assert reports[0]["config"]["tolerances"]["bn_freq"] == 0.5


@pytest.mark.slow
def test_verify_gumbel_at_desk_scale(tmp_path, capsys):
    argv = [
        "verify", "gumbel", "--alpha", "1", "--n", "20000", "--samples", "5000", "--seed", "7",
        "--cache-dir", str(tmp_path / "cache"),
    ]
    assert run_command(argv) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["distances"]["ks_gumbel_L1"] < 0.1
