"""
Uniformly parabolic approximations of U.

U_eps agrees with U on [eps, 1/eps], is linear through the origin outside
[eps/2, 1/eps + eps], and is joined to U on the two connector intervals. The
connectors are built on

    W(x) = (1/d - 1) U(x) + x U'(x) = U2(x) + U(x)/d,

which satisfies W(x) = x^{2-1/d} (x^{-1+1/d} U(x))'. On each connector W_eps
is a quintic smoothstep blend between W of the linear tail and W of U. Both
are nonnegative, so W_eps is nonnegative by construction. U_eps is recovered
by integrating g' = x^{-2+1/d} W_eps for g = x^{-1+1/d} U_eps, and the slope
of the linear tail is the one value that makes U_eps continuous at the far
end of the connector.

psi_eps is the primitive of U_eps'(x)/x anchored at psi(eps), and
H_eps = x psi_eps - U_eps. psi_eps grows logarithmically in both tails, so
its range is the whole real line.
"""

import logging
import math
import typing

import numpy as np
from scipy import interpolate

from .._utils import bisect_increasing
from ..errors import ConnectorInfeasible, HypothesisViolation, ParameterOutOfRange
from ..nonlinearity import Family, Nonlinearity, check_hypothesis_U, generalized_inverse

ArrayLike = typing.Union[float, np.ndarray]

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _as_output(out: np.ndarray) -> ArrayLike:
    return float(out) if out.ndim == 0 else out


def smoothstep(tau: np.ndarray) -> np.ndarray:
    """6t^5 - 15t^4 + 10t^3, flat to second order at both ends."""
    t = np.clip(tau, 0.0, 1.0)
    return t**3 * (10.0 + t * (-15.0 + 6.0 * t))


class _Panels:
    """Composite Gauss-Legendre rule on [a, b] with `n` equal panels."""

    def __init__(self, a: float, b: float, n: int) -> None:
        self.knots = np.linspace(a, b, n + 1)
        mid = 0.5 * (self.knots[1:] + self.knots[:-1])
        half = 0.5 * (self.knots[1:] - self.knots[:-1])
        self.nodes = mid[:, None] + half[:, None] * _GAUSS_NODES[None, :]
        self.weights = half[:, None] * _GAUSS_WEIGHTS[None, :]

    def cumulative(self, integrand: typing.Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Integral from a up to every knot."""
        per_panel = np.sum(self.weights * integrand(self.nodes), axis=1)
        return np.concatenate([[0.0], np.cumsum(per_panel)])


class _Connector:
    """
    One connector interval (x0, x1). `tail_at_left` tells whether the linear
    tail sits to the left (lower connector) or to the right (upper connector).
    """

    def __init__(
        self,
        base: Nonlinearity,
        d: int,
        x0: float,
        x1: float,
        *,
        tail_at_left: bool,
        panels: int,
    ) -> None:
        self.base = base
        self.d = d
        self.x0 = x0
        self.x1 = x1
        self.tail_at_left = tail_at_left
        p = 1.0 / d
        q = _Panels(x0, x1, panels)

        def W_U(x: np.ndarray) -> np.ndarray:
            return np.asarray(base.U2(x)) + np.asarray(base.U(x)) / d

        def blend(x: np.ndarray) -> np.ndarray:
            s = smoothstep((x - x0) / (x1 - x0))
            return s if tail_at_left else 1.0 - s

        # W_eps = slope * tail_part + base_part, both nonnegative
        self._W_U = W_U
        self._blend = blend
        tail_part = q.cumulative(lambda t: t ** (-1.0 + p) * (1.0 - blend(t)) / d)
        base_part = q.cumulative(lambda t: t ** (-2.0 + p) * blend(t) * W_U(t))
        if np.any(W_U(q.nodes) < -1e-12 * (1.0 + np.abs(base.U(q.nodes)))):
            msg = f"W of the base nonlinearity is negative on ({x0:g}, {x1:g})."
            raise ConnectorInfeasible(msg)
        if tail_at_left:
            # g(x0) = slope * x0^p, g(x1) = x1^{p-1} U(x1)
            g1 = x1 ** (p - 1.0) * float(base.U(x1))
            slope = (g1 - base_part[-1]) / (x0**p + tail_part[-1])
            g0 = slope * x0**p
        else:
            # g(x0) = x0^{p-1} U(x0), g(x1) = slope * x1^p
            g0 = x0 ** (p - 1.0) * float(base.U(x0))
            denom = x1**p - tail_part[-1]
            slope = (g0 + base_part[-1]) / denom
        if not slope > 0 or not math.isfinite(slope):
            msg = f"Connector on ({x0:g}, {x1:g}) needs a nonpositive tail slope {slope:g}."
            raise ConnectorInfeasible(msg)
        self.slope = float(slope)
        g_knots = g0 + slope * tail_part + base_part
        self._g = interpolate.CubicHermiteSpline(q.knots, g_knots, self._dg(q.knots))
        # primitive of U_eps'/t from x0, tabulated the same way
        k_knots = q.cumulative(lambda t: self.dU(t) / t)
        self._k = interpolate.CubicHermiteSpline(q.knots, k_knots, self.dU(q.knots) / q.knots)
        self.k_total = float(k_knots[-1])

    def W(self, x: np.ndarray) -> np.ndarray:
        b = self._blend(x)
        return self.slope * x * (1.0 - b) / self.d + b * self._W_U(x)

    def _dg(self, x: np.ndarray) -> np.ndarray:
        return x ** (-2.0 + 1.0 / self.d) * self.W(x)

    def U(self, x: np.ndarray) -> np.ndarray:
        return x ** (1.0 - 1.0 / self.d) * self._g(x)

    def dU(self, x: np.ndarray) -> np.ndarray:
        return (self.W(x) - (1.0 / self.d - 1.0) * self.U(x)) / x

    def primitive(self, x: np.ndarray) -> np.ndarray:
        """int_{x0}^{x} U_eps'(t)/t dt."""
        return self._k(x)


class DesingularizedNonlinearity:
    """
    U_eps, U_eps', psi_eps, psi_eps^{-1}, H_eps and W_eps for one base
    nonlinearity and one eps, with the parabolicity bounds
    m_eps <= U_eps' <= M_eps.
    """

    def __init__(
        self,
        base: Nonlinearity,
        eps: float,
        d: int,
        *,
        panels: int = 512,
        logger: typing.Optional[logging.Logger] = None,
    ) -> None:
        self._logger = logger if logger else logging.getLogger("entroflow.Desingularize")
        self.base = base
        self.eps = float(eps)
        self.d = d
        self._identity = base.family == Family.BOLTZMANN
        self.a, self.b = eps / 2.0, eps
        self.c, self.e = 1.0 / eps, 1.0 / eps + eps
        if self._identity:
            self.lower_slope = self.upper_slope = 1.0
            self.m_eps = self.M_eps = 1.0
            return
        self._lower = _Connector(base, d, self.a, self.b, tail_at_left=True, panels=panels)
        self._upper = _Connector(base, d, self.c, self.e, tail_at_left=False, panels=panels)
        self.lower_slope = self._lower.slope
        self.upper_slope = self._upper.slope
        self._psi_a = float(base.psi(self.b)) - self._lower.k_total
        self._psi_c = float(base.psi(self.c))
        self._psi_e = self._psi_c + self._upper.k_total
        self._slope_grid = self.validation_grid()
        self._slopes = np.asarray(self.dU(self._slope_grid))
        slopes = self._slopes
        self.m_eps = float(min(slopes.min(), self.lower_slope, self.upper_slope))
        self.M_eps = float(max(slopes.max(), self.lower_slope, self.upper_slope))
        self._logger.info(
            "Desingularized %s with eps=%g: slopes %.4g / %.4g, parabolicity [%.4g, %.4g]",
            base,
            eps,
            self.lower_slope,
            self.upper_slope,
            self.m_eps,
            self.M_eps,
        )

    def validation_grid(self, num: int = 10_000) -> np.ndarray:
        """Log-spaced points from eps/8 to 8/eps, connector ends included."""
        pts = np.logspace(math.log10(self.a / 4.0), math.log10(4.0 * self.e), num)
        return np.unique(np.concatenate([pts, [self.a, self.b, self.c, self.e]]))

    def max_slope(self, lo: float, hi: float) -> float:
        """Largest U_eps' over [lo, hi], read off the validation grid plus both ends."""
        if self._identity:
            return 1.0
        inside = self._slopes[(self._slope_grid >= lo) & (self._slope_grid <= hi)]
        ends = np.asarray(self.dU(np.array([lo, hi], dtype=float)))
        return float(max(ends.max(), inside.max(initial=0.0)))

    # piecewise evaluation: tail-low | lower connector | base | upper connector | tail-high
    def _pieces(self, x: np.ndarray) -> typing.List[np.ndarray]:
        return [
            x <= self.a,
            (x > self.a) & (x < self.b),
            (x >= self.b) & (x <= self.c),
            (x > self.c) & (x < self.e),
            x >= self.e,
        ]

    def _piecewise(
        self,
        x: ArrayLike,
        fns: typing.Sequence[typing.Callable[[np.ndarray], np.ndarray]],
    ) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        out = np.zeros(arr.shape)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for mask, fn in zip(self._pieces(arr), fns):
                if np.any(mask):
                    out[mask] = fn(arr[mask])
        return float(out) if out.ndim == 0 else out

    def U(self, x: ArrayLike) -> ArrayLike:
        """Defined on the whole real line."""
        if self._identity:
            return _as_output(np.asarray(x, dtype=float) * 1.0)
        return self._piecewise(
            x,
            [
                lambda t: self.lower_slope * t,
                self._lower.U,
                self.base.U,
                self._upper.U,
                lambda t: self.upper_slope * t,
            ],
        )

    def dU(self, x: ArrayLike) -> ArrayLike:
        if self._identity:
            return _as_output(np.ones_like(np.asarray(x, dtype=float)))
        return self._piecewise(
            x,
            [
                lambda t: np.full(t.shape, self.lower_slope),
                self._lower.dU,
                self.base.dU,
                self._upper.dU,
                lambda t: np.full(t.shape, self.upper_slope),
            ],
        )

    def W(self, x: ArrayLike) -> ArrayLike:
        """(1/d - 1) U_eps + x U_eps'."""
        if self._identity:
            return _as_output(np.asarray(x, dtype=float) / self.d)
        return self._piecewise(
            x,
            [
                lambda t: self.lower_slope * t / self.d,
                self._lower.W,
                lambda t: self.base.U2(t) + self.base.U(t) / self.d,
                self._upper.W,
                lambda t: self.upper_slope * t / self.d,
            ],
        )

    def psi(self, x: ArrayLike) -> ArrayLike:
        """Defined on positive reals."""
        if self._identity:
            return self.base.psi(x)
        return self._piecewise(
            x,
            [
                lambda t: self._psi_a + self.lower_slope * np.log(t / self.a),
                lambda t: self._psi_a + self._lower.primitive(t),
                self.base.psi,
                lambda t: self._psi_c + self._upper.primitive(t),
                lambda t: self._psi_e + self.upper_slope * np.log(t / self.e),
            ],
        )

    def dpsi(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        out = np.asarray(self.dU(arr)) / arr
        return float(out) if out.ndim == 0 else out

    def H(self, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(arr > 0, arr * np.asarray(self.psi(np.where(arr > 0, arr, 1.0))), 0.0)
        out = out - np.asarray(self.U(arr))
        return float(out) if out.ndim == 0 else out

    def psi_inverse(self, t: ArrayLike) -> ArrayLike:
        """Inverse of psi_eps on the whole real line."""
        if self._identity:
            return generalized_inverse(self.base, t)
        arr = np.asarray(t, dtype=float)
        out = np.zeros(arr.shape)
        psi_b = float(self.base.psi(self.b))
        with np.errstate(over="ignore", under="ignore"):
            low = arr <= self._psi_a
            out[low] = self.a * np.exp((arr[low] - self._psi_a) / self.lower_slope)
            high = arr >= self._psi_e
            out[high] = self.e * np.exp((arr[high] - self._psi_e) / self.upper_slope)
        mid = (arr >= psi_b) & (arr <= self._psi_c)
        if np.any(mid):
            out[mid] = generalized_inverse(self.base, arr[mid])
            out[mid] = np.clip(out[mid], self.b, self.c)
        for mask, x0, x1 in (
            ((arr > self._psi_a) & (arr < psi_b), self.a, self.b),
            ((arr > self._psi_c) & (arr < self._psi_e), self.c, self.e),
        ):
            if np.any(mask):
                out[mask] = bisect_increasing(
                    lambda y: np.asarray(self.psi(y)),
                    arr[mask],
                    np.full(int(mask.sum()), x0),
                    np.full(int(mask.sum()), x1),
                    log_space=True,
                    rtol=1e-15,
                )
        return float(out) if out.ndim == 0 else out

    def describe(self) -> typing.Dict[str, typing.Any]:
        return {
            **self.base.describe(),
            "eps": self.eps,
            "m_eps": self.m_eps,
            "M_eps": self.M_eps,
            "lower_slope": self.lower_slope,
            "upper_slope": self.upper_slope,
        }

    def __repr__(self) -> str:
        return f"DesingularizedNonlinearity({self.base!r}, eps={self.eps:g})"


class DesingularizationReport(typing.NamedTuple):
    coincidence_error: float
    affine_residual: float
    min_W: float
    min_dU: float

    def passed(self, tol: float = 1e-10) -> bool:
        return (
            self.coincidence_error <= tol
            and self.affine_residual <= 1e-12
            and self.min_W >= -tol
            and self.min_dU > 0
        )


def validate_desingularization(
    dnl: DesingularizedNonlinearity, num: int = 10_000
) -> DesingularizationReport:
    """
    Coincidence with U, psi and H on [eps, 1/eps], linearity of the tails
    (relative second differences), W_eps >= 0 and U_eps' > 0 on a log grid.
    """
    base = dnl.base
    inside = np.linspace(dnl.b, dnl.c, 1000)
    errs = []
    for ours, theirs in ((dnl.U, base.U), (dnl.psi, base.psi), (dnl.H, base.H)):
        a, b = np.asarray(ours(inside)), np.asarray(theirs(inside))
        errs.append(np.max(np.abs(a - b) / (1.0 + np.abs(b))))
    residual = 0.0
    for lo, hi in ((-1.0, dnl.a), (dnl.e, 4.0 * dnl.e)):
        x = np.linspace(lo, hi, 101)
        u = np.asarray(dnl.U(x))
        second = np.abs(u[2:] - 2.0 * u[1:-1] + u[:-2]) / (1.0 + np.abs(u[1:-1]))
        residual = max(residual, float(second.max()))
    grid = dnl.validation_grid(num)
    return DesingularizationReport(
        coincidence_error=float(max(errs)),
        affine_residual=residual,
        min_W=float(np.min(dnl.W(grid))),
        min_dU=float(np.min(dnl.dU(grid))),
    )


def desingularize(
    nl: Nonlinearity,
    eps: float,
    d: typing.Optional[int] = None,
    logger: typing.Optional[logging.Logger] = None,
) -> DesingularizedNonlinearity:
    """
    Build U_eps for `nl`. The base must satisfy U2 + U/d >= 0 and eps must lie
    in (0, 1).
    """
    d = nl.d if d is None else d
    if not 0.0 < eps < 1.0:
        msg = f"eps must lie in (0, 1), got {eps}."
        raise ParameterOutOfRange(msg)
    report = check_hypothesis_U(nl)
    if not report.satisfied:
        msg = (
            f"{nl} violates U2 + U/d >= 0 (worst {report.worst_value:.3g} at "
            f"x={report.worst_point}); it cannot be desingularized."
        )
        raise HypothesisViolation(msg)
    dnl = DesingularizedNonlinearity(nl, eps, d, logger=logger)
    check = validate_desingularization(dnl)
    if not check.passed():
        msg = f"Desingularization with eps={eps} failed validation: {check}."
        raise ConnectorInfeasible(msg)
    return dnl
