"""
Explicit conservative finite-volume scheme for

    d_t u = Delta U_eps(u) - div(u grad psi_eps(v)),
    -d_nu U_eps(u) + u d_nu psi_eps(v) = 0 on the boundary.

Writing phi = psi_eps(v) - psi_eps(u), the flux through the face between
neighbouring cells L and R along axis k is

    F = m * (phi_R - phi_L) / step_k,

with m the face mobility, and the flux through every box face is exactly zero.
The update is telescoping, so mass only changes by roundoff. The discrete
production sum_faces m ((phi_R - phi_L) / step)^2 * cell_volume equals minus
the time derivative of the discrete entropy sum (H_eps(u) - u psi_eps(v)).
"""

import csv
import logging
import math
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .._utils import Timer
from ..errors import CflViolation, NegativeCellError
from ..functionals import match_mass
from ..grid import Domain, Field, integrate
from ..potential import ExtremalProfile, Potential, extremal_profile
from .desingularize import DesingularizedNonlinearity
from .params import FlowConfig, MobilityRule

Target = typing.Union[Potential, ExtremalProfile, Field]


class FlowObserver:
    """Hooks called by the stepping loop. The default does nothing."""

    def on_step(self, steppers: typing.Sequence["FlowStepper"]) -> None:
        pass

    def on_record(self, stepper: "FlowStepper") -> None:
        pass


@dataclass(frozen=True)
class FlowTrace:
    times: np.ndarray
    mass: np.ndarray
    entropy: np.ndarray
    production: np.ndarray
    snapshots: typing.Tuple[Field, ...] = ()
    stats: typing.Dict[str, typing.Any] = field(default_factory=dict)

    def field_at(self, t: float) -> Field:
        if not self.snapshots:
            msg = "Trace was recorded without fields (set keep_fields=True)."
            raise ValueError(msg)
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            msg = f"No snapshot at t={t}."
            raise KeyError(msg)
        return self.snapshots[i]

    def rows(self) -> typing.Iterator[typing.Tuple[float, float, float, float]]:
        for row in zip(self.times, self.mass, self.entropy, self.production):
            yield tuple(float(x) for x in row)  # type: ignore[misc]

    def to_csv(self, path: typing.Union[str, Path]) -> None:
        write_trace_csv(self, path)


def write_trace_csv(trace: FlowTrace, path: typing.Union[str, Path]) -> None:
    """Header t,mass,entropy,production; floats written with repr (round-trip exact)."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "mass", "entropy", "production"])
        for row in trace.rows():
            writer.writerow([repr(x) for x in row])


def read_trace_csv(path: typing.Union[str, Path]) -> FlowTrace:
    with Path(path).open(newline="") as fh:
        rows = [[float(x) for x in r] for r in list(csv.reader(fh))[1:]]
    data = np.asarray(rows, dtype=float).reshape(-1, 4)
    return FlowTrace(data[:, 0], data[:, 1], data[:, 2], data[:, 3])


def psi_of_target(
    dnl: DesingularizedNonlinearity, target: Target, domain: Domain, mass: float
) -> np.ndarray:
    """
    psi_eps(v) on the grid. For a potential or an extremal profile this is
    beta - V, the value of psi_eps at the positive profile psi_eps^{-1}(beta - V).
    """
    if isinstance(target, Potential):
        target = extremal_profile(dnl.base, target, domain, mass)
    if isinstance(target, ExtremalProfile):
        return target.beta - target.potential(domain.points())
    target.require_positive("v")
    return np.asarray(dnl.psi(target.values))


class FlowStepper:
    """
    State of one flow run. Steppers on the same grid can be advanced together
    with a common step (see `advance`).
    """

    def __init__(
        self,
        dnl: DesingularizedNonlinearity,
        psi_v: np.ndarray,
        u0: Field,
        mobility: MobilityRule = MobilityRule.ARITHMETIC,
    ) -> None:
        u0.require_positive("u0")
        self.dnl = dnl
        self.domain = u0.domain
        self.psi_v = np.asarray(psi_v, dtype=float)
        self.mobility = mobility
        self.u = u0.values.copy()
        self.time = 0.0
        self.steps = 0
        self._refresh()
        self.initial_mass = self.mass
        self.max_mass_change = 0.0
        self.max_entropy_increase = 0.0

    def _refresh(self) -> None:
        with np.errstate(divide="ignore", invalid="ignore"):
            self._psi_u = np.asarray(self.dnl.psi(self.u))
            self._U_u = np.asarray(self.dnl.U(self.u))
        self.phi = self.psi_v - self._psi_u
        self.mass = float(np.sum(self.u) * self.domain.cell_volume)
        self.entropy = float(
            np.sum(-self.u * self.phi - self._U_u) * self.domain.cell_volume
        )
        self._fluxes, self.production = self._face_fluxes()

    def _face_mobility(self, axis: int) -> np.ndarray:
        u = self.u
        uL = np.delete(u, -1, axis=axis)
        uR = np.delete(u, 0, axis=axis)
        mean = 0.5 * (uL + uR)
        if self.mobility == MobilityRule.ARITHMETIC:
            return mean
        dpsi = np.diff(self._psi_u, axis=axis)
        dU = np.diff(self._U_u, axis=axis)
        close = np.abs(uR - uL) <= 1e-6 * mean
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(close, mean, dU / np.where(close, 1.0, dpsi))
        return ratio

    def _face_fluxes(self) -> typing.Tuple[typing.List[np.ndarray], float]:
        fluxes = []
        production = 0.0
        for k in range(self.domain.d):
            step = self.domain.spacing[k]
            grad_phi = np.diff(self.phi, axis=k) / step
            m = self._face_mobility(k)
            fluxes.append(m * grad_phi)
            production += float(np.sum(m * grad_phi**2))
        return fluxes, production * self.domain.cell_volume

    def rate(self) -> np.ndarray:
        """Right-hand side d_t u at the current state."""
        out = np.zeros_like(self.u)
        for k, F in enumerate(self._fluxes):
            pad = [(0, 0)] * self.domain.d
            pad[k] = (1, 1)
            Fp = np.pad(F, pad)
            out -= np.diff(Fp, axis=k) / self.domain.spacing[k]
        return out

    def outflow(self) -> np.ndarray:
        """Rate at which each cell loses mass through its faces (inflow not counted)."""
        out = np.zeros_like(self.u)
        for k, F in enumerate(self._fluxes):
            right = [(0, 0)] * self.domain.d
            right[k] = (0, 1)
            left = [(0, 0)] * self.domain.d
            left[k] = (1, 0)
            leaving = np.pad(np.maximum(F, 0.0), right) + np.pad(np.maximum(-F, 0.0), left)
            out += leaving / self.domain.spacing[k]
        return out

    def stable_dt(self, safety: float) -> float:
        """
        The smallest of

            safety * min(step^2) / (2 d max U_eps'),  max over [min u, max u],
            safety * min(step) / max |grad psi_eps(v)|,
            safety * min(u / outflow),

        the last of which keeps every cell above (1 - safety) times its value.
        """
        h = self.domain.spacing
        slope = self.dnl.max_slope(float(self.u.min()), float(self.u.max()))
        dt = safety * float(np.min(h) ** 2) / (2.0 * self.domain.d * slope)
        speed = max(
            float(np.max(np.abs(np.diff(self.psi_v, axis=k)))) / h[k] for k in range(self.domain.d)
        )
        if speed > 0:
            dt = min(dt, safety * float(np.min(h)) / speed)
        out = self.outflow()
        draining = out > 0
        if np.any(draining):
            dt = min(dt, safety * float(np.min(self.u[draining] / out[draining])))
        return dt

    def step(self, dt: float) -> None:
        new = self.u + dt * self.rate()
        if not np.all(new > 0):
            i = np.unravel_index(np.argmin(new), new.shape)
            msg = (
                f"Cell {tuple(int(k) for k in i)} reached {new[i]:.3e} at t={self.time + dt:.6g} "
                f"(step {self.steps + 1}); reduce the CFL safety factor or refine eps."
            )
            raise NegativeCellError(msg)
        mass, entropy = self.mass, self.entropy
        self.u = new
        self.time += dt
        self.steps += 1
        self._refresh()
        self.max_mass_change = max(self.max_mass_change, abs(self.mass - mass) / abs(mass))
        self.max_entropy_increase = max(self.max_entropy_increase, self.entropy - entropy)

    def field(self) -> Field:
        return Field(self.domain, self.u.copy())

    def get_stats(self) -> typing.Dict[str, typing.Any]:
        return {
            "steps": self.steps,
            "mass_drift": abs(self.mass - self.initial_mass) / self.initial_mass,
            "max_mass_change": self.max_mass_change,
            "max_entropy_increase": self.max_entropy_increase,
        }


def advance(
    steppers: typing.Sequence[FlowStepper],
    cfg: FlowConfig,
    *,
    observer: typing.Optional[FlowObserver] = None,
    logger: typing.Optional[logging.Logger] = None,
) -> float:
    """
    Advance all steppers through cfg.record_times(), landing exactly on each.
    Every step is the smallest stable step over the steppers at the current
    state, so runs advanced together stay in lockstep. Returns the smallest
    stable step met.
    """
    logger = logger if logger else logging.getLogger("entroflow.Flow")
    observer = observer if observer else FlowObserver()

    def stable() -> float:
        dt = min(s.stable_dt(cfg.safety) for s in steppers)
        if dt < cfg.dt_floor:
            msg = f"Stable step {dt:.3e} at t={steppers[0].time:.6g} is below the floor {cfg.dt_floor:.3e}."
            raise CflViolation(msg)
        return dt

    dt_min = stable()
    logger.info(
        "Stepping %d run(s) to t=%g, initial dt=%.4e (about %d steps)",
        len(steppers),
        cfg.end_time,
        dt_min,
        math.ceil(cfg.end_time / dt_min),
    )
    timer = Timer(cfg.time_limit)
    for s in steppers:
        observer.on_record(s)
    for target in cfg.record_times()[1:]:
        while steppers[0].time < target - 1e-12 * max(1.0, target):
            dt = stable()
            dt_min = min(dt_min, dt)
            h = min(dt, target - steppers[0].time)
            for s in steppers:
                s.step(h)
            observer.on_step(steppers)
            if steppers[0].steps % 1000 == 0:
                timer.check()
        for s in steppers:
            s.time = target
            observer.on_record(s)
    return dt_min


class _Recorder(FlowObserver):
    def __init__(self, keep_fields: bool, inner: typing.Optional[FlowObserver]) -> None:
        self.rows: typing.List[typing.Tuple[float, float, float, float]] = []
        self.fields: typing.List[Field] = []
        self.keep_fields = keep_fields
        self.inner = inner

    def on_step(self, steppers: typing.Sequence[FlowStepper]) -> None:
        if self.inner:
            self.inner.on_step(steppers)

    def on_record(self, stepper: FlowStepper) -> None:
        self.rows.append((stepper.time, stepper.mass, stepper.entropy, stepper.production))
        if self.keep_fields:
            self.fields.append(stepper.field())
        if self.inner:
            self.inner.on_record(stepper)


def run_flow(
    dnl: DesingularizedNonlinearity,
    target: Target,
    u0: Field,
    cfg: typing.Optional[FlowConfig] = None,
    *,
    observer: typing.Optional[FlowObserver] = None,
    logger: typing.Optional[logging.Logger] = None,
) -> FlowTrace:
    """
    Simulate the desingularized flow towards `target` (a potential, an
    extremal profile, or a strictly positive field v) from u0.
    """
    cfg = cfg if cfg else FlowConfig()
    logger = logger if logger else logging.getLogger("entroflow.Flow")
    if isinstance(target, (Field, ExtremalProfile)):
        u0 = match_mass(u0, integrate(target if isinstance(target, Field) else target.field))
    psi_v = psi_of_target(dnl, target, u0.domain, integrate(u0))
    stepper = FlowStepper(dnl, psi_v, u0, cfg.mobility)
    recorder = _Recorder(cfg.keep_fields, observer)
    dt = advance([stepper], cfg, observer=recorder, logger=logger)
    stats = stepper.get_stats()
    stats["dt"] = dt
    if stats["max_entropy_increase"] > cfg.entropy_slack:
        logger.warning("Entropy increased by %.3e in one step", stats["max_entropy_increase"])
    logger.info(
        "Flow finished after %d steps: mass drift %.2e, entropy %.10g -> %.10g",
        stepper.steps,
        stats["mass_drift"],
        recorder.rows[0][2],
        recorder.rows[-1][2],
    )
    data = np.asarray(recorder.rows, dtype=float)
    return FlowTrace(
        times=data[:, 0],
        mass=data[:, 1],
        entropy=data[:, 2],
        production=data[:, 3],
        snapshots=tuple(recorder.fields),
        stats=stats,
    )


def choose_epsilon(u0: Field, v: typing.Optional[Field] = None, eps0: float = 0.1) -> float:
    """
    eps = min(eps0, min(u0)/2, min(v)/2)/2, additionally keeping max(u0) and
    max(v) below 1/(2 eps). Zero cells of v are ignored.
    """
    candidates = [eps0, 0.5 * u0.min(), 0.5 / u0.max()]
    if v is not None:
        positive = v.values[v.values > 0]
        if positive.size:
            candidates += [0.5 * float(positive.min()), 0.5 / float(positive.max())]
    return 0.5 * min(candidates)
