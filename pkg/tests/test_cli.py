from __future__ import annotations

import csv
import io
import json

import pytest
from click.testing import CliRunner

from suqhodge import corep
from suqhodge.cli import main

Q = 0.5


@pytest.fixture
def runner():
    return CliRunner()


def _rows(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_m1_values(runner):
    res = runner.invoke(main, ["spectrum", "--max-M", "1", "--grade", "1"])
    assert res.exit_code == 0, res.output
    vals = sorted(float(r["eigenvalue"]) for r in _rows(res.output))
    expect = sorted([Q**18 * (1 + Q * Q) ** 2, Q**10, Q**2 * (1 + Q * Q) ** 2])
    assert vals == pytest.approx(expect, rel=1e-14)


def test_spectrum_grade0_column_is_nu(runner):
    res = runner.invoke(main, ["spectrum", "--max-M", "3", "--grade", "0"])
    assert res.exit_code == 0
    for r in _rows(res.output):
        assert float(r["eigenvalue"]) == pytest.approx(corep.nu(Q, int(r["M"]), int(r["k2"])), rel=1e-14)


def test_spectrum_oracle_cross_check(runner):
    res = runner.invoke(main, ["spectrum", "--max-M", "4", "--oracle", "--format", "json"])
    assert res.exit_code == 0, res.output
    payload = json.loads(res.output)
    assert payload["config"]["q"] == Q and payload["config"]["oracle"] is True
    methods = {r["method"] for r in payload["rows"]}
    assert methods == {"closed-form", "brute-force"}
    assert max(r["residual"] for r in payload["rows"]) < 1e-9


def test_spectrum_oracle_fails_on_tight_tolerance(runner):
    res = runner.invoke(main, ["spectrum", "--q", "0.3", "--max-M", "9", "--grade", "1", "--oracle", "--tol", "1e-15"])
    assert res.exit_code == 1
    assert "cross-check failed" in res.output


@pytest.mark.parametrize(
    "args",
    [
        ["spectrum", "--max-M", "0"],
        ["spectrum", "--q", "1.0"],
        ["commutator", "--beta", "0.3", "--delta", "0.3"],
        ["commutator", "--a", "alpha", "--max-M", "40"],
        ["verify", "--suite", "nonsense"],
    ],
)
def test_usage_errors_exit_2(runner, args):
    assert runner.invoke(main, args).exit_code == 2


def test_verify_hodge_suite(runner):
    res = runner.invoke(main, ["verify", "--suite", "hodge", "--max-M", "3"])
    assert res.exit_code == 0, res.output
    assert all(r["status"] == "pass" for r in _rows(res.output))


def test_commutator_flags_unproven_regime(runner):
    res = runner.invoke(main, ["commutator", "--a", "gamma", "--beta", "0.3", "--delta", "0.3", "--max-M", "3"])
    assert res.exit_code == 0
    assert "outside the proven regime" in res.output


def test_commutator_json_summary(runner):
    res = runner.invoke(main, ["commutator", "--a", "alpha", "--max-M", "4", "--format", "json"])
    assert res.exit_code == 0, res.output
    payload = json.loads(res.output)
    assert [r["M"] for r in payload["rows"]] == [1, 2, 3, 4]
    s = payload["summary"]
    assert s["resolvent_bound_violations"] == []
    assert s["C_adjusted"] <= s["C"]


def test_output_is_deterministic_and_out_writes_file(runner, tmp_path):
    args = ["spectrum", "--max-M", "5", "--oracle"]
    first = runner.invoke(main, args).output
    assert runner.invoke(main, args).output == first
    out = tmp_path / "spec.csv"
    res = runner.invoke(main, args + ["--out", str(out)])
    assert res.exit_code == 0 and res.output == ""
    assert out.read_text() == first


def test_version(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0 and "0.1.0" in res.output
