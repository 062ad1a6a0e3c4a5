"""
The three subcommands. Each returns an exit code: 0 when every check passes,
1 when a mathematical check fails. Configuration problems surface as
ValueError and are mapped to 2 by the entry point.
"""

import concurrent.futures
import logging
import math
import os
import sys
import typing

import numpy as np

from ..errors import DegenerateWindow
from ..flow import (
    DesingularizedNonlinearity,
    FlowConfig,
    check_second_derivative_identity,
    choose_epsilon,
    desingularize,
    fit_decay_rate,
    positive_profile,
    run_flow,
    write_trace_csv,
)
from ..grid import (
    CheckReport,
    Domain,
    Field,
    check_bochner_integral_identity,
    check_cd_condition,
    check_hessian_gamma_identity,
    check_integration_by_parts,
)
from ..inequalities import (
    InequalityReport,
    from_entropy,
    from_gns,
    from_trace_gns,
    from_trace_logsob,
    gns_extremizer,
    gns_profile,
    halfspace_gaussian,
    random_bumps,
    random_smooth_field,
    sample_rng,
    trace_gns_report,
    trace_logsob_report,
    verify_entropy_inequality,
    verify_gns,
    write_report_json,
)
from ..nonlinearity import Family, Nonlinearity, make_nonlinearity
from ..potential import (
    ExtremalProfile,
    Potential,
    extremal_profile,
    make_shifted_quadratic,
    normalize_mass,
)
from .scenario import IdentityCheck, Inequality, Scenario

_logger = logging.getLogger("entroflow.cli")

T = typing.TypeVar("T")

FLOW_BACKGROUND = 0.1


def _emit(line: str) -> None:
    sys.stdout.write(line + "\n")


def worker_count() -> int:
    value = os.environ.get("ENTROFLOW_THREADS")
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def sweep(fn: typing.Callable[[int], T], n: int) -> typing.List[T]:
    """fn(0), ..., fn(n - 1) on the worker pool, results in index order."""
    with concurrent.futures.ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(fn, range(n)))


class _Verifier:
    """One inequality on one grid; the extremal profile is built once and shared by all samples."""

    def __init__(self, scenario: Scenario, cells: typing.Optional[int] = None) -> None:
        self.scenario = scenario
        self.domain = scenario.domain(cells)
        self.ineq = scenario.inequality
        self.alpha = float(scenario.alpha) if scenario.alpha is not None else math.nan
        self.nl = scenario.nonlinearity()
        self.profile: typing.Optional[ExtremalProfile] = None
        if self.ineq == Inequality.TRACE_GNS:
            self.profile = gns_profile(self.alpha, scenario.h, self.domain)
        elif self.ineq == Inequality.ENTROPY:
            self.profile = extremal_profile(self.nl, scenario.potential(), self.domain)

    def equality_report(self) -> InequalityReport:
        s, domain = self.scenario, self.domain
        if self.ineq == Inequality.TRACE_LOGSOB:
            r = trace_logsob_report(halfspace_gaussian(domain, s.h, scale=0.5), s.h)
            report = from_trace_logsob(r)
            # the undilated form is the one with equality
            report.rhs, report.deficit = r.rhs_pre, r.deficit_pre
        elif self.ineq == Inequality.TRACE_GNS:
            assert self.profile is not None
            report = from_trace_gns(
                trace_gns_report(self.profile.field, self.alpha, s.h, lam=1.0, profile=self.profile)
            )
        elif self.ineq == Inequality.GNS:
            f = gns_extremizer(domain, self.alpha)
            report = from_gns(verify_gns(f, self.alpha), domain.describe())
        else:
            assert self.profile is not None
            r = verify_entropy_inequality(self.nl, self.profile, self.profile.field)
            report = from_entropy(r, domain.d)
        return report

    def equality_case(self) -> InequalityReport:
        """
        The equality case on the scenario grid. Its deficit passes within
        tol_equality * (1 + |rhs|) plus twice the change of the deficit when
        the grid is refined once, which covers the discretization error of a
        scheme of order one or higher.
        """
        s = self.scenario
        report = self.equality_report()
        refined = _Verifier(s, 2 * s.cells).equality_report()
        estimate = abs(report.deficit - refined.deficit)
        tolerance = s.tol_equality * (1.0 + abs(report.rhs)) + 2.0 * estimate
        report.passed = abs(report.deficit) <= tolerance
        report.extra.update(refined_deficit=refined.deficit, tolerance=tolerance)
        report.inequality += ":equality"
        return report

    def sample(self, index: int) -> InequalityReport:
        s, domain = self.scenario, self.domain
        u = random_bumps(domain, sample_rng(s.seed, index))
        tol = s.tol_deficit
        if self.ineq == Inequality.TRACE_LOGSOB:
            return from_trace_logsob(trace_logsob_report(u, s.h), tol)
        if self.ineq == Inequality.TRACE_GNS:
            return from_trace_gns(trace_gns_report(u, self.alpha, s.h, profile=self.profile), tol)
        if self.ineq == Inequality.GNS:
            return from_gns(verify_gns(u, self.alpha), domain.describe(), tol)
        assert self.profile is not None
        return from_entropy(verify_entropy_inequality(self.nl, self.profile, u), domain.d, tol)


def cmd_verify(scenario: Scenario) -> int:
    if scenario.inequality is None:
        msg = "verify needs --ineq."
        raise ValueError(msg)
    verifier = _Verifier(scenario)
    equality = verifier.equality_case()
    samples = sweep(verifier.sample, scenario.samples)
    worst = min((s.deficit for s in samples), default=math.nan)
    ok = equality.passed and all(s.passed for s in samples)
    summary = InequalityReport(
        inequality=scenario.inequality.value,
        params={"alpha": scenario.alpha, "h": scenario.h, "d": scenario.dim},
        lhs=equality.lhs,
        rhs=equality.rhs,
        deficit=equality.deficit,
        constants=equality.constants,
        grid=equality.grid,
        passed=ok,
        extra={
            "equality": equality.to_dict(include_timestamp=False),
            "samples": len(samples),
            "worst_sample_deficit": worst,
            "failed_samples": [i for i, s in enumerate(samples) if not s.passed],
            "scenario": scenario.describe(),
        },
    )
    if scenario.output:
        path = write_report_json(summary, scenario.output)
        _logger.info("Report written to %s", path)
    _emit(
        f"{scenario.inequality.value}: equality deficit {equality.deficit:.3e}, "
        f"worst sample deficit {worst:.3e} over {len(samples)} samples -> "
        f"{'PASS' if ok else 'FAIL'}"
    )
    return 0 if ok else 1


def flow_domain(scenario: Scenario, nl: Nonlinearity, pot: Potential) -> Domain:
    """
    The scenario box, cut down to 1.25 times the support of a compactly
    supported profile unless --length was given. Outside the support the
    flow lives on the linear tail of U_eps, where the cell Peclet number
    grows with the box.
    """
    domain = scenario.domain()
    if scenario.length is not None:
        return domain
    v = extremal_profile(nl, pot, domain).field
    if v.is_positive():
        return domain
    extent = float(np.max(np.abs(domain.points()[v.values > 0])))
    length = min(scenario.box_length(), 1.25 * extent + domain.min_spacing)
    return Domain.half_space(scenario.dim, length, scenario.cells)


def flow_start(profile: ExtremalProfile, seed: int) -> Field:
    """Half profile, 0.4 of a random bump and 0.1 spread uniformly, at unit mass."""
    domain = profile.domain
    bump = random_bumps(domain, sample_rng(seed, 0))
    volume = float(np.prod(domain.upper - domain.lower))
    background = Field.constant(domain, FLOW_BACKGROUND / volume)
    start = profile.field * 0.5 + bump * (0.5 - FLOW_BACKGROUND) + background
    return normalize_mass(start, 1.0)


def cmd_flow(scenario: Scenario) -> int:
    nl = scenario.nonlinearity()
    pot = make_shifted_quadratic(0.0, scenario.h, 0.5, scenario.dim)
    profile = extremal_profile(nl, pot, flow_domain(scenario, nl, pot))
    start = flow_start(profile, scenario.seed)
    # cells at the edge of a compact support come arbitrarily close to zero
    v = profile.field if profile.field.is_positive() else None
    eps = scenario.eps or choose_epsilon(start, v)
    dnl = desingularize(nl, eps, scenario.dim)
    _logger.info("Flow on %s with eps=%g", profile.domain, eps)
    target: typing.Union[ExtremalProfile, Field] = profile
    if scenario.stationary:
        # v_eps and v differ in mass, so v_eps is its own target
        start = target = positive_profile(dnl, profile)
    cfg = FlowConfig(
        end_time=scenario.end_time,
        safety=scenario.safety,
        snapshot_every=scenario.end_time / 50.0,
        time_limit=scenario.time_limit,
    )
    trace = run_flow(dnl, target, start, cfg)
    if scenario.output:
        write_trace_csv(trace, scenario.output)
    else:
        _emit("t,mass,entropy,production")
        for row in trace.rows():
            _emit(",".join(repr(x) for x in row))
    two_c = 2.0 * pot.convexity_constant
    try:
        rate = fit_decay_rate(trace, (scenario.end_time / 2.0, scenario.end_time))
        _emit(f"decay rate {rate:.6g}  2C {two_c:.6g}")
    except DegenerateWindow as err:
        _emit(f"decay rate n/a ({err})  2C {two_c:.6g}")
    stats = trace.stats
    ok = stats["max_entropy_increase"] <= cfg.entropy_slack
    ok = ok and stats["mass_drift"] <= 1e-12 * max(stats["steps"], 1)
    return 0 if ok else 1


def second_derivative_scenario(
    cells: int = 400, length: float = 3.0 * math.pi
) -> typing.Tuple[DesingularizedNonlinearity, ExtremalProfile, Field]:
    """Boltzmann on the half line with V = x^2 / 2 and a cosine-perturbed start."""
    domain = Domain.half_space(1, length, cells)
    nl = make_nonlinearity(Family.BOLTZMANN, d=1)
    profile = extremal_profile(nl, make_shifted_quadratic(0.0, 0.0, 0.5, 1), domain)
    x = domain.axes()[0]
    u0 = normalize_mass(profile.field * (1.0 + 0.5 * np.cos(2.0 * np.pi * x / length)), 1.0)
    dnl = desingularize(nl, choose_epsilon(u0, profile.field), 1)
    return dnl, profile, u0


def _identity_reports(which: IdentityCheck, scenario: Scenario) -> typing.List[CheckReport]:
    domain = Domain.box([0.0] * scenario.dim, [1.0] * scenario.dim, scenario.cells)

    def field(i: int, k: int) -> Field:
        return random_smooth_field(domain, sample_rng(scenario.seed, 3 * i + k))

    n = max(scenario.samples, 1)
    if which == IdentityCheck.CD:
        return sweep(lambda i: check_cd_condition(field(i, 0)), n)
    if which == IdentityCheck.HESSIAN_GAMMA:
        return sweep(lambda i: check_hessian_gamma_identity(field(i, 0), field(i, 1), field(i, 2)), n)
    if which == IdentityCheck.BOCHNER:
        return sweep(lambda i: check_bochner_integral_identity(field(i, 0)), n)
    return sweep(lambda i: check_integration_by_parts(field(i, 0), field(i, 1)), n)


def cmd_identity_check(which: typing.Union[IdentityCheck, str], scenario: Scenario) -> int:
    which = IdentityCheck(which)
    if which == IdentityCheck.SECOND_DERIVATIVE:
        dnl, profile, u0 = second_derivative_scenario()
        report = check_second_derivative_identity(
            dnl, profile, u0, FlowConfig(end_time=0.2), sample_times=(0.05, 0.1, 0.15)
        )
        for t, err in zip(report.times, report.relative_errors):
            _emit(f"t={t:g}: relative error {err:.3e}")
        ok = report.passed(0.02)
    else:
        reports = _identity_reports(which, scenario)
        worst = max(reports, key=lambda r: -r.worst if r.is_margin else r.worst)
        _emit(
            f"{which.value}: {len(reports)} fields, worst {worst.worst:.3e} "
            f"(tolerance {worst.tolerance:.3e}, {worst.mask})"
        )
        ok = all(r.passed for r in reports)
    _emit("PASS" if ok else "FAIL")
    return 0 if ok else 1
