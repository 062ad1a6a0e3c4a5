"""
Machine-readable verification reports (JSON, schema 1).

Reports are deterministic apart from the `timestamp` field: keys are sorted,
floats are written with full precision and non-finite numbers become null.
"""

import datetime
import json
import math
import os
import tempfile
import typing
from dataclasses import dataclass, field
from pathlib import Path

from ..functionals import DeficitReport
from .gns import GnsReport
from .trace_gns import TraceGnsReport
from .trace_logsob import TraceLogSobReport

SCHEMA = 1


def _clean(value: typing.Any) -> typing.Any:
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


@dataclass
class InequalityReport:
    inequality: str
    params: typing.Dict[str, typing.Any]
    lhs: float
    rhs: float
    deficit: float
    constants: typing.Dict[str, typing.Any]
    grid: typing.Dict[str, typing.Any]
    passed: bool
    extra: typing.Dict[str, typing.Any] = field(default_factory=dict)
    timestamp: typing.Optional[str] = None

    def to_dict(self, include_timestamp: bool = True) -> typing.Dict[str, typing.Any]:
        data = {
            "schema": SCHEMA,
            "inequality": self.inequality,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "deficit": self.deficit,
            "constants": self.constants,
            "grid": self.grid,
            "pass": bool(self.passed),
        }
        if self.extra:
            data["extra"] = self.extra
        if include_timestamp:
            data["timestamp"] = self.timestamp or datetime.datetime.now(
                datetime.timezone.utc
            ).isoformat(timespec="seconds")
        return _clean(data)  # type: ignore[no-any-return]

    def to_json(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(include_timestamp), sort_keys=True, indent=2)


def write_report_json(report: InequalityReport, path: typing.Union[str, Path]) -> Path:
    """Write through a temporary file in the target directory and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(report.to_json())
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def from_entropy(report: DeficitReport, d: int, rtol: float = 1e-8) -> InequalityReport:
    meta = report.metadata
    nl = meta.get("nonlinearity", {})
    return InequalityReport(
        inequality="entropy",
        params={"alpha": nl.get("alpha"), "h": meta.get("potential", {}).get("h"), "d": d},
        lhs=report.lhs,
        rhs=report.rhs / (2.0 * report.C),
        deficit=report.deficit,
        constants={"C": report.C, "beta": meta.get("beta")},
        grid=meta.get("grid", {}),
        passed=report.passed(rtol),
        extra={"variant": meta.get("variant"), "family": nl.get("family")},
    )


def from_trace_logsob(report: TraceLogSobReport, rtol: float = 1e-8) -> InequalityReport:
    return InequalityReport(
        inequality="trace-logsob",
        params={"alpha": None, "h": report.h, "d": report.d},
        lhs=report.lhs,
        rhs=report.rhs,
        deficit=report.deficit,
        constants={"lambda": report.lam, "C": 1.0, "gaussian_mass": report.gaussian_mass},
        grid=report.metadata.get("grid", {}),
        passed=report.passed(rtol),
        extra={
            "fisher": report.fisher,
            "trace": report.trace,
            "rhs_pre": report.rhs_pre,
            "deficit_pre": report.deficit_pre,
            "rhs_printed": report.rhs_printed,
        },
    )


def from_trace_gns(report: TraceGnsReport, rtol: float = 1e-8) -> InequalityReport:
    c = report.constants
    return InequalityReport(
        inequality="trace-gns",
        params={"alpha": report.alpha, "h": report.h, "d": report.d},
        lhs=report.lhs,
        rhs=report.rhs,
        deficit=report.deficit,
        constants={
            "A": c.A,
            "B": c.B,
            "D": c.D,
            "delta": c.delta,
            "theta": c.theta,
            "lambda": report.lam,
            "beta": c.beta,
            "C": 2.0,
            "a_h": c.a_h,
            "b_h": c.b_h,
        },
        grid=report.metadata.get("grid", {}),
        passed=report.passed(rtol),
        extra={
            "gradient_norm": report.gradient_norm,
            "trace": report.trace,
            "rhs_rescaled": report.rhs_rescaled,
            "entropy_deficit": report.entropy.deficit,
        },
    )


def from_gns(report: GnsReport, grid: typing.Dict[str, typing.Any], rtol: float = 1e-8) -> InequalityReport:
    return InequalityReport(
        inequality="gns",
        params={"alpha": report.alpha, "h": None, "d": report.d},
        lhs=report.lhs,
        rhs=report.rhs,
        deficit=report.deficit,
        constants={"C": report.C, "theta": report.theta},
        grid=grid,
        passed=report.passed(rtol),
        extra={"quotient": report.quotient},
    )
