"""
Convex confinement potentials and the extremal profiles they select.

The extremal profile for a nonlinearity and a potential V is

    v = generalized_inverse(beta - V),

with the normalizer beta fixed by the mass constraint. Mass is strictly
increasing in beta wherever v > 0, so beta is found by bracketing followed by
Brent's method.
"""

import logging
import math
import typing
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import BracketFailure, ParameterOutOfRange, SupportEscapesBox
from .grid import Domain, FaceKind, Field, VectorField, hessian, integrate
from .nonlinearity import HypothesisReport, Nonlinearity, generalized_inverse

PointFn = typing.Callable[[np.ndarray], np.ndarray]


class Potential:
    """
    V on R^d with gradient and a lower bound C on its Hessian.

    Evaluators take points of shape (..., d). For the shifted quadratics
    V(x) = a + scale * ||x + h e||^2, where e is the d-th unit vector, the
    parameters are kept so that reports can name them.
    """

    def __init__(
        self,
        d: int,
        value: PointFn,
        gradient: PointFn,
        convexity_constant: float,
        *,
        shift: float = 0.0,
        offset: float = 0.0,
        quadratic_scale: typing.Optional[float] = None,
    ) -> None:
        if not convexity_constant > 0:
            msg = f"Convexity constant must be positive, got {convexity_constant}."
            raise ParameterOutOfRange(msg)
        self.d = d
        self._value = value
        self._gradient = gradient
        self.convexity_constant = float(convexity_constant)
        self.shift = shift
        self.offset = offset
        self.quadratic_scale = quadratic_scale
        self.direction = np.eye(d)[d - 1]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self._value(np.asarray(points, dtype=float)))

    def gradient(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self._gradient(np.asarray(points, dtype=float)))

    def normal_derivative(self, points: np.ndarray, normal: typing.Sequence[float]) -> np.ndarray:
        return self.gradient(points) @ np.asarray(normal, dtype=float)

    def on(self, domain: Domain) -> Field:
        return Field(domain, self(domain.points()))

    def gradient_on(self, domain: Domain) -> VectorField:
        return VectorField(domain, np.moveaxis(self.gradient(domain.points()), -1, 0))

    def describe(self) -> typing.Dict[str, typing.Any]:
        return {
            "a": self.offset,
            "h": self.shift,
            "scale": self.quadratic_scale,
            "C": self.convexity_constant,
        }

    def __repr__(self) -> str:
        return (
            f"Potential(d={self.d}, a={self.offset}, h={self.shift}, "
            f"scale={self.quadratic_scale}, C={self.convexity_constant})"
        )


def make_shifted_quadratic(a: float, h: float, scale: float, d: int) -> Potential:
    """V(x) = a + scale * ||x + h e||^2 with e = e_d, so C = 2 scale."""
    if not scale > 0:
        msg = f"Quadratic scale must be positive, got {scale}."
        raise ParameterOutOfRange(msg)
    shift = h * np.eye(d)[d - 1]

    def value(x: np.ndarray) -> np.ndarray:
        return a + scale * np.sum((x + shift) ** 2, axis=-1)

    def grad(x: np.ndarray) -> np.ndarray:
        return 2.0 * scale * (x + shift)

    return Potential(
        d, value, grad, 2.0 * scale, shift=h, offset=a, quadratic_scale=scale
    )


def make_custom_potential(
    d: int, value: PointFn, gradient: PointFn, convexity_constant: float
) -> Potential:
    return Potential(d, value, gradient, convexity_constant)


@dataclass(frozen=True)
class ExtremalProfile:
    field: Field
    beta: float
    mass: float
    nonlinearity: Nonlinearity
    potential: Potential

    @property
    def domain(self) -> Domain:
        return self.field.domain


def gaussian_halfspace_mass(h: float) -> float:
    """Standard normal measure of (-h, inf)."""
    return float(special.ndtr(h))


def gaussian_box_length(h: float = 0.0, tol: float = 1e-12) -> float:
    """
    Length L such that exp(-||x + h e||^2 / 2) restricted to the half space
    loses less than `tol` of its mass outside [-L, L]^{d-1} x [0, L].
    """
    along_normal = -float(special.ndtri(tol * gaussian_halfspace_mass(-h) / 2.0)) - h
    lateral = -float(special.ndtri(tol / 4.0))
    return max(along_normal, lateral, 1.0)


def check_hypothesis_V(
    nl: Nonlinearity,
    pot: Potential,
    domain: Domain,
    beta: float = 0.0,
    tolerance: float = 1e-8,
) -> HypothesisReport:
    """
    beta - V < psi(+inf) on the grid and D^2 V >= C Id, the latter through the
    discrete Hessian of V.
    """
    V = pot.on(domain)
    worst_value = math.inf
    worst_index: typing.Tuple[int, ...] = (0,) * domain.d
    if math.isfinite(nl.psi_at_inf):
        gap = nl.psi_at_inf - (beta - V.values)
        i = np.unravel_index(np.argmin(gap), domain.shape)
        worst_value, worst_index = float(gap[i]), tuple(int(k) for k in i)
    satisfied = worst_value > 0
    if min(domain.cells) >= 4:
        H = np.moveaxis(hessian(V), (0, 1), (-2, -1))
        eig = np.linalg.eigvalsh(H) - pot.convexity_constant
        i = np.unravel_index(np.argmin(eig[..., 0]), domain.shape)
        low = float(eig[i][0])
        satisfied = satisfied and low >= -tolerance * max(1.0, pot.convexity_constant)
        if low < worst_value:
            worst_value, worst_index = low, tuple(int(k) for k in i)
    point = tuple(float(ax[k]) for ax, k in zip(domain.axes(), worst_index))
    return HypothesisReport(
        satisfied=bool(satisfied),
        worst_point=point,
        worst_value=worst_value,
        grid_spec=repr(domain),
    )


class _ProfileBuilder:
    def __init__(
        self,
        nl: Nonlinearity,
        pot: Potential,
        domain: Domain,
        logger: typing.Optional[logging.Logger] = None,
    ) -> None:
        self._logger = logger if logger else logging.getLogger("entroflow.ExtremalProfile")
        self.nl = nl
        self.pot = pot
        self.domain = domain
        self.V = pot(domain.points())
        self.v_min = float(self.V.min())
        self._evaluations = 0

    def profile(self, beta: float) -> np.ndarray:
        self._evaluations += 1
        return np.asarray(generalized_inverse(self.nl, beta - self.V))

    def mass(self, beta: float) -> float:
        with np.errstate(over="ignore"):
            return float(np.sum(self.profile(beta)) * self.domain.cell_volume)

    def bracket(self, target: float) -> typing.Tuple[float, float]:
        """
        A bracket [lo, hi] with mass(lo) < target < mass(hi), both finite. When
        psi(+inf) is finite, beta is confined below min V + psi(+inf).
        """
        ceiling = self.v_min + self.nl.psi_at_inf
        if math.isfinite(ceiling):
            lo, hi, width = ceiling - 1.0, ceiling - 0.5, 1.0
        else:
            lo, hi, width = self.v_min - 1.0, self.v_min + 1.0, 2.0
        for _ in range(200):
            m_lo, m_hi = self.mass(lo), self.mass(hi)
            if not math.isfinite(m_hi):
                hi = 0.5 * (lo + hi)
                continue
            if m_lo < target < m_hi:
                self._logger.debug("Bracket [%g, %g] for mass %g", lo, hi, target)
                return lo, hi
            if m_lo >= target:
                lo -= width
                width *= 2.0
            if m_hi <= target:
                if math.isfinite(ceiling):
                    hi = 0.5 * (hi + ceiling)
                else:
                    lo = hi
                    hi += width
                    width *= 2.0
        msg = (
            f"Normalizer bracket does not straddle mass {target} on {self.domain}; "
            "the truncated domain is probably too small."
        )
        raise BracketFailure(msg)

    def solve(self, target: float) -> float:
        lo, hi = self.bracket(target)
        beta = optimize.brentq(
            lambda b: self.mass(b) / target - 1.0, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500
        )
        self._logger.info(
            "Normalizer beta=%.12g for mass %g after %d mass evaluations",
            beta,
            target,
            self._evaluations,
        )
        return float(beta)


def extremal_profile(
    nl: Nonlinearity,
    pot: Potential,
    domain: Domain,
    target_mass: float = 1.0,
    logger: typing.Optional[logging.Logger] = None,
) -> ExtremalProfile:
    """
    The profile generalized_inverse(beta - V) on the grid whose quadrature mass
    equals `target_mass`.
    """
    if not target_mass > 0:
        msg = f"Target mass must be positive, got {target_mass}."
        raise ParameterOutOfRange(msg)
    if pot.d != domain.d:
        msg = f"Potential of dimension {pot.d} on a {domain.d}-dimensional domain."
        raise ParameterOutOfRange(msg)
    builder = _ProfileBuilder(nl, pot, domain, logger)
    beta = builder.solve(target_mass)
    values = builder.profile(beta)
    field = Field(domain, values)
    mass = integrate(field)
    if abs(mass / target_mass - 1.0) > 1e-10:
        msg = f"Profile mass {mass} misses target {target_mass} after root finding."
        raise BracketFailure(msg)
    _check_support(nl, field, builder._logger)
    return ExtremalProfile(field, beta, mass, nl, pot)


def _check_support(nl: Nonlinearity, v: Field, logger: logging.Logger) -> None:
    """
    Compactly supported profiles must vanish on the outer cell layer of every
    truncation face; Gaussian-type ones should carry negligible mass there.
    """
    domain = v.domain
    total = float(np.sum(v.values))
    for face in domain.faces():
        if domain.face_kind(face) != FaceKind.TRUNCATION:
            continue
        layer = np.take(v.values, -1 if face.upper else 0, axis=face.axis)
        if math.isfinite(nl.psi_at_zero) and np.any(layer > 0):
            msg = f"Profile support reaches truncation face {face} of {domain}."
            raise SupportEscapesBox(msg)
        if total > 0 and float(np.sum(layer)) > 1e-10 * total:
            logger.warning(
                "Profile keeps %.2e of its mass on the outer layer at %s",
                float(np.sum(layer)) / total,
                face,
            )


def normalize_mass(u: Field, mass: float = 1.0) -> Field:
    return u * (mass / integrate(u))


__all__ = [
    "ExtremalProfile",
    "Potential",
    "check_hypothesis_V",
    "extremal_profile",
    "gaussian_box_length",
    "gaussian_halfspace_mass",
    "make_custom_potential",
    "make_shifted_quadratic",
    "normalize_mass",
]
