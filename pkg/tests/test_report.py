import json
import math

from entroflow.grid import Domain
from entroflow.inequalities import (
    InequalityReport,
    from_gns,
    gns_extremizer,
    verify_gns,
    write_report_json,
)


def _report(**overrides):
    data = {
        "inequality": "gns",
        "params": {"alpha": 2.0, "h": None, "d": 1},
        "lhs": 1.0,
        "rhs": 1.5,
        "deficit": 0.5,
        "constants": {"C": 0.9},
        "grid": {"cells": [16]},
        "passed": True,
    }
    data.update(overrides)
    return InequalityReport(**data)


def test_to_dict_layout():
    data = _report().to_dict()
    assert data["schema"] == 1
    assert data["pass"] is True
    assert "timestamp" in data
    assert "extra" not in data
    assert "timestamp" not in _report().to_dict(include_timestamp=False)


def test_non_finite_numbers_become_null():
    report = _report(deficit=math.nan, constants={"C": math.inf, "nested": [1.0, -math.inf]})
    data = json.loads(report.to_json())
    assert data["deficit"] is None
    assert data["constants"] == {"C": None, "nested": [1.0, None]}


def test_json_is_sorted_and_deterministic():
    a = _report(timestamp="2024-01-01T00:00:00+00:00").to_json()
    b = _report(timestamp="2024-01-01T00:00:00+00:00").to_json()
    assert a == b
    keys = list(json.loads(a).keys())
    assert keys == sorted(keys)


def test_write_replaces_the_target(tmp_path):
    path = tmp_path / "reports" / "gns.json"
    write_report_json(_report(lhs=1.0), path)
    write_report_json(_report(lhs=2.0), path)
    assert json.loads(path.read_text())["lhs"] == 2.0
    assert [p.name for p in path.parent.iterdir()] == ["gns.json"]


def test_from_gns_adapter():
    domain = Domain.half_space(1, 1.5, 256)
    report = from_gns(verify_gns(gns_extremizer(domain, 2.0), 2.0), domain.describe())
    data = report.to_dict(include_timestamp=False)
    assert data["inequality"] == "gns"
    assert data["constants"]["theta"] == 0.375
    assert data["extra"]["quotient"] > 0
