import json
import math

import numpy as np
import pytest

from quasiminimal import report
from quasiminimal.charts import Grid
from quasiminimal.families import (FlatThetaSpec, GridThetaChart, ThetaField, goursat_solve)
from quasiminimal.verify import SUITES, SuiteTolerances, run_suites


def statuses(results):
    return {r.name: r.status for r in results}


def test_all_suites_pass_on_builtins(builtin_charts):
    for name, chart in builtin_charts.items():
        results = run_suites(chart, Grid(5, 5))
        assert [r.name for r in results] == list(SUITES)
        assert all(r.passed for r in results), (name, [r.to_json() for r in results])


def test_suite_applicability(builtin_charts):
    assert statuses(run_suites(builtin_charts["nonflat"], Grid(4, 4),
                               ("constraints", "coefficients"))) == {
        "constraints": "pass", "coefficients": "pass"}
    assert statuses(run_suites(builtin_charts["theta_uv"], Grid(4, 4),
                               ("constraints", "field"))) == {
        "constraints": "skipped", "field": "skipped"}


def test_field_suite_detects_corrupted_cache(tmp_path):
    spec = FlatThetaSpec(n=8)
    fld = goursat_solve(spec)
    path = tmp_path / "field.csv"
    fld.to_csv(path)
    good = ThetaField.from_csv(path, spec)
    assert statuses(run_suites(GridThetaChart(good), Grid(5, 5), ("field",))) == {
        "field": "pass"}
    bad = ThetaField.from_csv(path, spec)
    bad.P[0][3, 3] += 1e-6
    res = run_suites(GridThetaChart(bad), Grid(5, 5), ("field",))[0]
    assert res.status == "fail" and res.max_residual > 1e-7


def test_unknown_suite_and_tolerance():
    with pytest.raises(KeyError):
        SuiteTolerances().updated(nope=1)
    with pytest.raises(KeyError):
        run_suites(None, Grid(4, 4), ("nope",))


def test_json_output_is_plain_and_nan_safe():
    text = report.dumps({"a": np.float64(1.5), "b": np.arange(2), "c": math.nan,
                         "d": (np.True_, None)})
    assert json.loads(text) == {"a": 1.5, "b": [0, 1], "c": None, "d": [True, None]}


def test_fmt_round_trips():
    x = 0.1 + 0.2
    assert float(report.fmt(x)) == x
