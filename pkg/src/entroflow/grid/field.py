import typing

import numpy as np

from ..errors import DimensionMismatch, PositivityError
from .domain import Domain

Scalar = typing.Union[float, int]


class Field:
    """
    Cell-centered values on a domain. Fields are treated as immutable: every
    operation returns a new field.
    """

    __array_priority__ = 1000

    def __init__(self, domain: Domain, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != domain.shape:
            msg = f"Field of shape {values.shape} does not fit {domain}."
            raise DimensionMismatch(msg)
        self.domain = domain
        self.values = values

    @classmethod
    def from_function(
        cls, domain: Domain, fn: typing.Callable[..., np.ndarray]
    ) -> "Field":
        """`fn` receives one coordinate array per axis."""
        values = np.asarray(fn(*domain.mesh()), dtype=float)
        return cls(domain, np.broadcast_to(values, domain.shape).copy())

    @classmethod
    def constant(cls, domain: Domain, value: float) -> "Field":
        return cls(domain, np.full(domain.shape, float(value)))

    def map(self, fn: typing.Callable[[np.ndarray], np.ndarray]) -> "Field":
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return Field(self.domain, np.asarray(fn(self.values), dtype=float))

    def copy(self) -> "Field":
        return Field(self.domain, self.values.copy())

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def is_positive(self) -> bool:
        return bool(np.all(self.values > 0))

    def require_nonnegative(self, what: str = "field") -> None:
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            i = np.unravel_index(np.argmin(self.values), self.domain.shape)
            msg = f"{what} must be finite and nonnegative, min {self.values[i]:.3g} at cell {i}."
            raise PositivityError(msg)

    def require_positive(self, what: str = "field") -> None:
        self.require_nonnegative(what)
        if not self.is_positive():
            msg = f"{what} must be strictly positive."
            raise PositivityError(msg)

    def _other(self, other: typing.Union["Field", Scalar, np.ndarray]) -> np.ndarray:
        if isinstance(other, Field):
            if not self.domain.same_grid(other.domain):
                msg = "Fields live on different grids."
                raise DimensionMismatch(msg)
            return other.values
        return np.asarray(other, dtype=float)

    def __add__(self, other):  # type: ignore[no-untyped-def]
        return Field(self.domain, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):  # type: ignore[no-untyped-def]
        return Field(self.domain, self.values - self._other(other))

    def __rsub__(self, other):  # type: ignore[no-untyped-def]
        return Field(self.domain, self._other(other) - self.values)

    def __mul__(self, other):  # type: ignore[no-untyped-def]
        return Field(self.domain, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):  # type: ignore[no-untyped-def]
        return Field(self.domain, self.values / self._other(other))

    def __neg__(self) -> "Field":
        return Field(self.domain, -self.values)

    def __pow__(self, exponent: float) -> "Field":
        return Field(self.domain, self.values**exponent)

    def __repr__(self) -> str:
        return f"Field({self.domain!r}, min={self.min():.3g}, max={self.max():.3g})"


class VectorField:
    """d components, stored as an array of shape (d,) + cells."""

    def __init__(self, domain: Domain, components: np.ndarray) -> None:
        components = np.asarray(components, dtype=float)
        if components.shape != (domain.d, *domain.shape):
            msg = f"Vector field of shape {components.shape} does not fit {domain}."
            raise DimensionMismatch(msg)
        self.domain = domain
        self.components = components

    def __getitem__(self, axis: int) -> Field:
        return Field(self.domain, self.components[axis])

    def dot(self, other: "VectorField") -> Field:
        return Field(self.domain, np.einsum("i...,i...->...", self.components, other.components))

    def norm2(self) -> Field:
        return Field(self.domain, np.sum(self.components**2, axis=0))

    def scale(self, factor: typing.Union[Field, float]) -> "VectorField":
        f = factor.values if isinstance(factor, Field) else factor
        return VectorField(self.domain, self.components * f)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.domain, self.components + other.components)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.domain, self.components - other.components)
