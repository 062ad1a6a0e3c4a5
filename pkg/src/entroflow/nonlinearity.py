"""
Entropy-generating nonlinearities.

A nonlinearity bundles a strictly convex H with H(0) = 0 and the derived
functions

    psi = H',  U(x) = x psi(x) - H(x),  U2(x) = x U'(x) - U(x).

The built-in families are evaluated in closed form. This matters for the
Sobolev family, where U2 + U/d vanishes identically and any tabulation error
would flip the sign of the hypothesis check.
"""

import math
import typing
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from ._utils import bisect_increasing
from .errors import ConsistencyError, ParameterOutOfRange

ArrayLike = typing.Union[float, np.ndarray]
Evaluator = typing.Callable[[np.ndarray], np.ndarray]


class Family(Enum):
    BOLTZMANN = "boltzmann"
    POWER_CONCAVE = "power-concave"
    POWER_CONVEX = "power-convex"
    SOBOLEV = "sobolev"
    CUSTOM = "custom"


class Nonlinearity:
    """
    Immutable bundle (H, psi, psi', U, U', U2) on the positive reals together
    with the extended-real endpoints psi(0+) and psi(+inf).

    `psi_inverse`, if given, is a closed-form inverse of psi on the open range
    (psi(0+), psi(+inf)). Without it, `generalized_inverse` falls back to
    bracketed bisection.
    """

    def __init__(
        self,
        family: Family,
        *,
        H: Evaluator,
        psi: Evaluator,
        dpsi: Evaluator,
        U: Evaluator,
        dU: Evaluator,
        U2: Evaluator,
        psi_at_zero: float,
        psi_at_inf: float,
        d: int,
        alpha: typing.Optional[float] = None,
        psi_inverse: typing.Optional[Evaluator] = None,
    ) -> None:
        self.family = family
        self.alpha = alpha
        self.d = d
        self.psi_at_zero = psi_at_zero
        self.psi_at_inf = psi_at_inf
        self._H = H
        self._psi = psi
        self._dpsi = dpsi
        self._U = U
        self._dU = dU
        self._U2 = U2
        self._psi_inverse = psi_inverse

    def _apply(self, fn: Evaluator, x: ArrayLike) -> ArrayLike:
        arr = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.asarray(fn(arr), dtype=float)
        return float(out) if out.ndim == 0 else out

    def H(self, x: ArrayLike) -> ArrayLike:
        return self._apply(self._H, x)

    def psi(self, x: ArrayLike) -> ArrayLike:
        return self._apply(self._psi, x)

    def dpsi(self, x: ArrayLike) -> ArrayLike:
        return self._apply(self._dpsi, x)

    def U(self, x: ArrayLike) -> ArrayLike:
        return self._apply(self._U, x)

    def dU(self, x: ArrayLike) -> ArrayLike:
        return self._apply(self._dU, x)

    def U2(self, x: ArrayLike) -> ArrayLike:
        return self._apply(self._U2, x)

    def has_closed_form_inverse(self) -> bool:
        return self._psi_inverse is not None

    def psi_inverse(self, t: np.ndarray) -> np.ndarray:
        """Inverse of psi on the open range; no endpoint handling."""
        if self._psi_inverse is None:
            msg = "No closed-form inverse for this nonlinearity."
            raise NotImplementedError(msg)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.asarray(self._psi_inverse(np.asarray(t, dtype=float)))

    def describe(self) -> typing.Dict[str, typing.Any]:
        return {"family": self.family.value, "alpha": self.alpha, "d": self.d}

    def __repr__(self) -> str:
        return f"Nonlinearity({self.family.value}, alpha={self.alpha}, d={self.d})"


@dataclass(frozen=True)
class HypothesisReport:
    satisfied: bool
    worst_point: typing.Union[float, typing.Tuple[float, ...]]
    worst_value: float
    grid_spec: str


def default_sample_grid(num: int = 1601) -> np.ndarray:
    return np.logspace(-8.0, 8.0, num)


def _boltzmann(d: int) -> Nonlinearity:
    return Nonlinearity(
        Family.BOLTZMANN,
        H=lambda x: special.xlogy(x, x) - x,
        psi=np.log,
        dpsi=lambda x: 1.0 / x,
        U=lambda x: x,
        dU=np.ones_like,
        U2=np.zeros_like,
        psi_at_zero=-math.inf,
        psi_at_inf=math.inf,
        d=d,
        psi_inverse=np.exp,
    )


def _power_convex(alpha: float, d: int) -> Nonlinearity:
    a = alpha
    return Nonlinearity(
        Family.POWER_CONVEX,
        H=lambda x: x**a / (a * (a - 1.0)),
        psi=lambda x: x ** (a - 1.0) / (a - 1.0),
        dpsi=lambda x: x ** (a - 2.0),
        U=lambda x: x**a / a,
        dU=lambda x: x ** (a - 1.0),
        U2=lambda x: (a - 1.0) * x**a / a,
        psi_at_zero=0.0,
        psi_at_inf=math.inf,
        d=d,
        alpha=a,
        psi_inverse=lambda t: ((a - 1.0) * t) ** (1.0 / (a - 1.0)),
    )


def _power_concave(alpha: float, d: int) -> Nonlinearity:
    a = alpha
    return Nonlinearity(
        Family.POWER_CONCAVE,
        H=lambda x: -(x**a) / a,
        psi=lambda x: -(x ** (a - 1.0)),
        dpsi=lambda x: (1.0 - a) * x ** (a - 2.0),
        U=lambda x: (1.0 - a) * x**a / a,
        dU=lambda x: (1.0 - a) * x ** (a - 1.0),
        U2=lambda x: -((1.0 - a) ** 2) * x**a / a,
        psi_at_zero=-math.inf,
        psi_at_inf=0.0,
        d=d,
        alpha=a,
        psi_inverse=lambda t: (-t) ** (1.0 / (a - 1.0)),
    )


def _sobolev(d: int) -> Nonlinearity:
    m = 1.0 - 1.0 / d

    def U(x: np.ndarray) -> np.ndarray:
        return x**m / d

    return Nonlinearity(
        Family.SOBOLEV,
        H=lambda x: -(x**m),
        psi=lambda x: -m * x ** (-1.0 / d),
        dpsi=lambda x: (m / d) * x ** (-1.0 / d - 1.0),
        U=U,
        dU=lambda x: (m / d) * x ** (m - 1.0),
        # exactly -U/d, so that U2 + U/d is identically zero in floating point
        U2=lambda x: -U(x) / d,
        psi_at_zero=-math.inf,
        psi_at_inf=0.0,
        d=d,
        alpha=m,
        psi_inverse=lambda t: (-t / m) ** (-float(d)),
    )


def make_nonlinearity(
    family: typing.Union[Family, str],
    alpha: typing.Optional[float] = None,
    d: int = 1,
    *,
    strict: bool = True,
) -> Nonlinearity:
    """
    Build one of the closed-form families.

    With `strict=False` the hypothesis windows (power-concave alpha > 1 - 1/d,
    Sobolev d >= 3) are not enforced, which is useful to exercise the hypothesis
    check itself. The structural requirements (H strictly convex with H(0) = 0)
    are always enforced.
    """
    family = Family(family)
    if d < 1 or int(d) != d:
        msg = f"Dimension must be a positive integer, got {d}."
        raise ParameterOutOfRange(msg)
    d = int(d)
    if family == Family.BOLTZMANN:
        return _boltzmann(d)
    if family == Family.POWER_CONVEX:
        if alpha is None or not alpha > 1.0:
            msg = f"power-convex requires alpha > 1, got {alpha}."
            raise ParameterOutOfRange(msg)
        return _power_convex(float(alpha), d)
    if family == Family.POWER_CONCAVE:
        if alpha is None or not 0.0 < alpha < 1.0:
            msg = f"power-concave requires 0 < alpha < 1, got {alpha}."
            raise ParameterOutOfRange(msg)
        if strict and not alpha > 1.0 - 1.0 / d:
            msg = f"power-concave requires alpha in ({1.0 - 1.0 / d}, 1) for d={d}, got {alpha}."
            raise ParameterOutOfRange(msg)
        return _power_concave(float(alpha), d)
    if family == Family.SOBOLEV:
        if d < 2 or (strict and d < 3):
            msg = f"sobolev requires d >= 3, got {d}."
            raise ParameterOutOfRange(msg)
        return _sobolev(d)
    msg = "Use make_custom_nonlinearity for the custom family."
    raise ParameterOutOfRange(msg)


def make_custom_nonlinearity(
    *,
    H: Evaluator,
    psi: Evaluator,
    dpsi: Evaluator,
    U: Evaluator,
    dU: Evaluator,
    U2: Evaluator,
    psi_at_zero: float,
    psi_at_inf: float,
    d: int,
    sample_grid: typing.Optional[np.ndarray] = None,
) -> Nonlinearity:
    """
    Wrap user-supplied evaluators. They are validated against each other
    before the bundle is returned.
    """
    nl = Nonlinearity(
        Family.CUSTOM,
        H=H,
        psi=psi,
        dpsi=dpsi,
        U=U,
        dU=dU,
        U2=U2,
        psi_at_zero=psi_at_zero,
        psi_at_inf=psi_at_inf,
        d=d,
    )
    validate_bundle(nl, sample_grid)
    return nl


def validate_bundle(
    nl: Nonlinearity,
    sample_grid: typing.Optional[np.ndarray] = None,
    rtol: float = 1e-8,
) -> None:
    x = default_sample_grid(401) if sample_grid is None else np.asarray(sample_grid)
    x = np.sort(x)
    H, psi, dpsi = nl.H(x), nl.psi(x), nl.dpsi(x)
    U, dU, U2 = nl.U(x), nl.dU(x), nl.U2(x)

    def require(ok: np.ndarray, what: str) -> None:
        if not np.all(ok):
            bad = x[np.argmin(ok)]
            msg = f"Inconsistent nonlinearity: {what} fails at x={bad:.6g}."
            raise ConsistencyError(msg)

    require(np.isfinite(H) & np.isfinite(psi) & np.isfinite(U), "finiteness")
    require(np.abs(U - (x * psi - H)) <= rtol * (1.0 + np.abs(H) + np.abs(x * psi)), "U = x psi - H")
    require(np.abs(U2 - (x * dU - U)) <= rtol * (1.0 + np.abs(U) + np.abs(x * dU)), "U2 = x U' - U")
    require(np.abs(dU - x * dpsi) <= rtol * (1.0 + np.abs(dU)), "U' = x psi'")
    require(dpsi > 0, "psi' > 0")
    require(np.diff(psi) >= 0, "psi increasing")
    require(U >= -rtol * (1.0 + np.abs(H)), "U >= 0")
    eta = 1e-4
    fd = (nl.H(x * (1 + eta)) - nl.H(x * (1 - eta))) / (2 * eta * x)
    require(np.abs(fd - psi) <= 1e-6 * (1.0 + np.abs(psi) + np.abs(H) / x), "psi = H'")


def check_hypothesis_U(
    nl: Nonlinearity,
    sample_grid: typing.Optional[np.ndarray] = None,
) -> HypothesisReport:
    """
    Certify U2 + U/d >= 0 on a dense log grid. A sample passes when the value
    is at least -1e-12 * max(1, |U(x)|).
    """
    x = default_sample_grid() if sample_grid is None else np.asarray(sample_grid, dtype=float)
    if x.size < 100 or np.any(x <= 0):
        msg = "Sample grid needs at least 100 strictly positive points."
        raise ParameterOutOfRange(msg)
    if np.log10(x.max() / x.min()) < 4.0:
        msg = "Sample grid must span at least four decades."
        raise ParameterOutOfRange(msg)
    U = np.asarray(nl.U(x))
    values = np.asarray(nl.U2(x)) + U / nl.d
    slack = values + 1e-12 * np.maximum(1.0, np.abs(U))
    i = int(np.argmin(values))
    return HypothesisReport(
        satisfied=bool(np.all(slack >= 0)),
        worst_point=float(x[i]),
        worst_value=float(values[i]),
        grid_spec=f"{x.size} points in [{x.min():.3g}, {x.max():.3g}]",
    )


def generalized_inverse(nl: Nonlinearity, t: ArrayLike) -> ArrayLike:
    """
    psi^{-1} extended by 0 at or below psi(0+) and by +inf at or above psi(+inf).
    Accepts scalars or arrays and is nondecreasing in t.
    """
    arr = np.asarray(t, dtype=float)
    out = np.zeros(arr.shape)
    out[arr >= nl.psi_at_inf] = math.inf
    inside = (arr > nl.psi_at_zero) & (arr < nl.psi_at_inf)
    if np.any(inside):
        ts = arr[inside]
        if nl.has_closed_form_inverse():
            out[inside] = nl.psi_inverse(ts)
        else:
            out[inside] = _bisect_inverse(nl, ts)
    return float(out) if out.ndim == 0 else out


def _bisect_inverse(nl: Nonlinearity, ts: np.ndarray) -> np.ndarray:
    lo = np.full(ts.shape, 1.0)
    hi = np.full(ts.shape, 1.0)
    for _ in range(2000):
        low_bad = np.asarray(nl.psi(lo)) >= ts
        high_bad = np.asarray(nl.psi(hi)) <= ts
        if not (np.any(low_bad) or np.any(high_bad)):
            break
        lo = np.where(low_bad, lo * 0.5, lo)
        hi = np.where(high_bad, hi * 2.0, hi)
    return bisect_increasing(
        lambda y: np.asarray(nl.psi(y)), ts, lo, hi, log_space=True, rtol=1e-14
    )
