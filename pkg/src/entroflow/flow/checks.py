"""
Dynamic certificates along the desingularized flow: the stationary family,
ordering of solutions, the second derivative of the entropy and the
exponential decay of the production.
"""

import logging
import math
import typing
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateWindow, SampleTimeOutOfRange
from ..grid import (
    Field,
    face_values,
    gamma,
    gamma2,
    hessian_form,
    integrate,
    integrate_on_face,
    laplacian,
    normal_derivative,
)
from ..potential import ExtremalProfile
from .desingularize import DesingularizedNonlinearity
from .params import FlowConfig
from .scheme import FlowObserver, FlowStepper, FlowTrace, Target, advance, psi_of_target, run_flow


def _psi_v(dnl: DesingularizedNonlinearity, v: typing.Union[Field, ExtremalProfile]) -> Field:
    if isinstance(v, ExtremalProfile):
        return Field(v.domain, v.beta - v.potential(v.domain.points()))
    v.require_positive("v")
    return Field(v.domain, np.asarray(dnl.psi(v.values)))


def positive_profile(dnl: DesingularizedNonlinearity, profile: ExtremalProfile) -> Field:
    """v_eps = psi_eps^{-1}(beta - V), strictly positive even where the profile vanishes."""
    return Field(profile.domain, np.asarray(dnl.psi_inverse(_psi_v(dnl, profile).values)))


def stationary_family(
    dnl: DesingularizedNonlinearity, v: typing.Union[Field, ExtremalProfile], alpha: float
) -> Field:
    """v_alpha = psi_eps^{-1}(psi_eps(v) + alpha), increasing in alpha."""
    if alpha == 0 and isinstance(v, Field):
        return v.copy()
    shifted = _psi_v(dnl, v).values + alpha
    return Field(v.domain, np.asarray(dnl.psi_inverse(shifted)))


def stationary_envelope(
    dnl: DesingularizedNonlinearity, v: typing.Union[Field, ExtremalProfile], u0: Field
) -> typing.Tuple[float, float]:
    """The tightest alpha_1 <= alpha_2 with v_{alpha_1} <= u0 <= v_{alpha_2}."""
    u0.require_positive("u0")
    gap = np.asarray(dnl.psi(u0.values)) - _psi_v(dnl, v).values
    return float(gap.min()), float(gap.max())


def scheme_tolerance(stepper_or_domain: typing.Any) -> float:
    domain = getattr(stepper_or_domain, "domain", stepper_or_domain)
    return 10.0 * domain.min_spacing**2


@dataclass(frozen=True)
class ComparisonReport:
    margin: float
    initial_margin: float
    tolerance: float
    steps: int

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tolerance


class _MarginObserver(FlowObserver):
    def __init__(self, margin: float) -> None:
        self.margin = margin

    def on_step(self, steppers: typing.Sequence[FlowStepper]) -> None:
        lower, upper = steppers
        self.margin = min(self.margin, float(np.min(upper.u - lower.u)))


def check_comparison(
    dnl: DesingularizedNonlinearity,
    target: Target,
    u1_0: Field,
    u2_0: Field,
    cfg: typing.Optional[FlowConfig] = None,
    logger: typing.Optional[logging.Logger] = None,
) -> ComparisonReport:
    """
    Run the flows from u1_0 <= u2_0 with identical steps and report the minimum
    of u2 - u1 over all steps and cells.
    """
    cfg = cfg if cfg else FlowConfig()
    logger = logger if logger else logging.getLogger("entroflow.Comparison")
    gap = u2_0.values - u1_0.values
    if np.any(gap < 0):
        msg = f"Initial data are not ordered (min u2 - u1 = {gap.min():.3e})."
        raise ValueError(msg)
    psi_v = psi_of_target(dnl, target, u2_0.domain, integrate(u2_0))
    steppers = [FlowStepper(dnl, psi_v, u, cfg.mobility) for u in (u1_0, u2_0)]
    observer = _MarginObserver(float(gap.min()))
    advance(steppers, cfg, observer=observer, logger=logger)
    report = ComparisonReport(
        margin=observer.margin,
        initial_margin=float(gap.min()),
        tolerance=scheme_tolerance(u2_0.domain),
        steps=steppers[0].steps,
    )
    logger.info("Comparison margin %.3e after %d steps", report.margin, report.steps)
    return report


class _DriftObserver(FlowObserver):
    def __init__(self, reference: Field) -> None:
        self.reference = reference.values
        self.drift = 0.0

    def on_record(self, stepper: FlowStepper) -> None:
        self.drift = max(self.drift, float(np.max(np.abs(stepper.u - self.reference))))


def stationarity_residual(
    dnl: DesingularizedNonlinearity,
    v: typing.Union[Field, ExtremalProfile],
    alpha: float,
    cfg: typing.Optional[FlowConfig] = None,
) -> float:
    """
    max |u(t) - v_alpha| over the record times of the flow towards v started
    at v_alpha. The masses differ for alpha != 0, so the stepper is driven
    directly rather than through run_flow.
    """
    cfg = cfg if cfg else FlowConfig()
    v_alpha = stationary_family(dnl, v, alpha)
    stepper = FlowStepper(dnl, _psi_v(dnl, v).values, v_alpha, cfg.mobility)
    observer = _DriftObserver(v_alpha)
    advance([stepper], cfg, observer=observer)
    return observer.drift


def entropy_derivative(dnl: DesingularizedNonlinearity, psi_v: Field, u: Field) -> float:
    """Lambda'(t) = -int u Gamma(phi) with phi = psi_eps(v) - psi_eps(u)."""
    phi = psi_v - Field(u.domain, np.asarray(dnl.psi(u.values)))
    return -integrate(u * gamma(phi, phi))


def entropy_second_derivative(dnl: DesingularizedNonlinearity, psi_v: Field, u: Field) -> float:
    """
    2 int [-D^2 psi_eps(v)(grad phi, grad phi) u + (Delta phi)^2 U2_eps(u)
    + Gamma2(phi) U_eps(u)] - int_boundary d_nu Gamma(phi) U_eps(u).
    """
    domain = u.domain
    phi = psi_v - Field(domain, np.asarray(dnl.psi(u.values)))
    U = Field(domain, np.asarray(dnl.U(u.values)))
    U2 = u * Field(domain, np.asarray(dnl.dU(u.values))) - U
    bulk = -hessian_form(psi_v, phi, phi) * u + laplacian(phi) ** 2 * U2 + gamma2(phi, phi) * U
    G = gamma(phi, phi)
    boundary = sum(
        integrate_on_face(normal_derivative(G, face) * face_values(U, face), domain, face)
        for face in domain.faces()
    )
    return 2.0 * integrate(bulk) - boundary


@dataclass(frozen=True)
class SecondDerivativeReport:
    times: typing.Tuple[float, ...]
    finite_difference: typing.Tuple[float, ...]
    formula: typing.Tuple[float, ...]
    relative_errors: typing.Tuple[float, ...]
    delta: float

    @property
    def max_relative_error(self) -> float:
        return max(self.relative_errors, default=0.0)

    def passed(self, rtol: float = 0.02) -> bool:
        return self.max_relative_error <= rtol


def check_second_derivative_identity(
    dnl: DesingularizedNonlinearity,
    v: typing.Union[Field, ExtremalProfile],
    u0: Field,
    cfg: FlowConfig,
    sample_times: typing.Sequence[float],
    delta: typing.Optional[float] = None,
    logger: typing.Optional[logging.Logger] = None,
) -> SecondDerivativeReport:
    """
    Compare the centered difference of Lambda' between t - delta and t + delta
    with the closed expression for Lambda'' at every sample time t.
    """
    logger = logger if logger else logging.getLogger("entroflow.SecondDerivative")
    sample_times = tuple(float(t) for t in sample_times)
    delta = 0.05 * min(sample_times) if delta is None else delta
    for t in sample_times:
        if t - delta <= 0 or t + delta > cfg.end_time:
            msg = f"Sample time t={t} with delta={delta} lies outside the trace [0, {cfg.end_time}]."
            raise SampleTimeOutOfRange(msg)
    around = [s for t in sample_times for s in (t - delta, t, t + delta)]
    run_cfg = FlowConfig(
        end_time=cfg.end_time,
        safety=cfg.safety,
        snapshot_times=around,
        mobility=cfg.mobility,
        keep_fields=True,
    )
    trace = run_flow(dnl, v, u0, run_cfg, logger=logger)
    psi_v = _psi_v(dnl, v)
    fd, exact, errors = [], [], []
    for t in sample_times:
        lo = entropy_derivative(dnl, psi_v, trace.field_at(t - delta))
        hi = entropy_derivative(dnl, psi_v, trace.field_at(t + delta))
        value = (hi - lo) / (2.0 * delta)
        formula = entropy_second_derivative(dnl, psi_v, trace.field_at(t))
        err = abs(value - formula)
        if err > 0:
            err /= max(abs(formula), np.finfo(float).tiny)
        fd.append(value)
        exact.append(formula)
        errors.append(err)
        logger.info("t=%g: difference %.8g, formula %.8g, relative error %.2e", t, value, formula, err)
    return SecondDerivativeReport(sample_times, tuple(fd), tuple(exact), tuple(errors), delta)


def fit_decay_rate(
    trace: FlowTrace, window: typing.Optional[typing.Tuple[float, float]] = None
) -> float:
    """
    Least-squares slope of -log I(t) over the window (whole trace by default).
    Needs at least 10 samples with I > 0.
    """
    lo, hi = window if window else (-math.inf, math.inf)
    mask = (trace.times >= lo) & (trace.times <= hi)
    t, production = trace.times[mask], trace.production[mask]
    if t.size < 10:
        msg = f"Window {window} holds {t.size} samples; at least 10 are needed."
        raise DegenerateWindow(msg)
    if np.any(production <= 0):
        msg = f"Production vanishes inside window {window}; the decay rate is undefined."
        raise DegenerateWindow(msg)
    slope, _ = np.polyfit(t, np.log(production), 1)
    return float(-slope)
