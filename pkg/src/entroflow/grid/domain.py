"""
Axis-aligned boxes carrying cell-centered grids.

Each of the 2d box faces is either part of the true boundary of the convex set
being discretized (for instance {x_d = 0} of the half space) or an artificial
truncation of an unbounded set. Boundary integrals are only meaningful on the
former.
"""

import typing
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import DimensionMismatch, ParameterOutOfRange


class FaceKind(Enum):
    TRUE_BOUNDARY = "true-boundary"
    TRUNCATION = "truncation"


@dataclass(frozen=True)
class Face:
    axis: int
    upper: bool

    @property
    def sign(self) -> float:
        """Component of the outer normal along `axis`."""
        return 1.0 if self.upper else -1.0

    def __str__(self) -> str:
        return f"x{self.axis + 1}={'max' if self.upper else 'min'}"


class Domain:
    def __init__(
        self,
        lower: typing.Sequence[float],
        upper: typing.Sequence[float],
        cells: typing.Union[int, typing.Sequence[int]],
        true_boundary: typing.Iterable[Face] = (),
    ) -> None:
        self.lower = np.asarray(lower, dtype=float).reshape(-1)
        self.upper = np.asarray(upper, dtype=float).reshape(-1)
        self.d = self.lower.size
        if self.d not in (1, 2, 3) or self.upper.size != self.d:
            msg = f"Only boxes of dimension 1, 2 or 3 are supported, got bounds {lower}, {upper}."
            raise DimensionMismatch(msg)
        if isinstance(cells, (int, np.integer)):
            cells = [int(cells)] * self.d
        self.cells = tuple(int(n) for n in cells)
        if len(self.cells) != self.d or min(self.cells) < 1:
            msg = f"Need at least one cell per axis, got {cells}."
            raise ParameterOutOfRange(msg)
        if np.any(self.upper <= self.lower):
            msg = "Box bounds must satisfy lower < upper on every axis."
            raise ParameterOutOfRange(msg)
        self.spacing = (self.upper - self.lower) / np.asarray(self.cells)
        self._true_boundary = frozenset(true_boundary)
        for face in self._true_boundary:
            if not 0 <= face.axis < self.d:
                msg = f"Face {face} does not belong to a {self.d}-dimensional box."
                raise DimensionMismatch(msg)

    @classmethod
    def box(
        cls,
        lower: typing.Sequence[float],
        upper: typing.Sequence[float],
        cells: typing.Union[int, typing.Sequence[int]],
    ) -> "Domain":
        """A bounded convex box: every face is true boundary."""
        d = len(lower)
        faces = [Face(k, side) for k in range(d) for side in (False, True)]
        return cls(lower, upper, cells, true_boundary=faces)

    @classmethod
    def half_space(
        cls,
        d: int,
        length: float,
        cells: typing.Union[int, typing.Sequence[int]],
        lateral_length: typing.Optional[float] = None,
    ) -> "Domain":
        """
        Truncation of the half space {x_d >= 0} to [-l, l]^{d-1} x [0, length]
        with l = lateral_length (defaults to length). Only {x_d = 0} is true
        boundary.
        """
        lat = length if lateral_length is None else lateral_length
        lower = [-lat] * (d - 1) + [0.0]
        upper = [lat] * (d - 1) + [length]
        return cls(lower, upper, cells, true_boundary=[Face(d - 1, False)])

    @property
    def shape(self) -> typing.Tuple[int, ...]:
        return self.cells

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def min_spacing(self) -> float:
        return float(self.spacing.min())

    def faces(self) -> typing.List[Face]:
        return [Face(k, side) for k in range(self.d) for side in (False, True)]

    def face_kind(self, face: Face) -> FaceKind:
        if face in self._true_boundary:
            return FaceKind.TRUE_BOUNDARY
        return FaceKind.TRUNCATION

    def true_boundary_faces(self) -> typing.List[Face]:
        return [f for f in self.faces() if f in self._true_boundary]

    def is_half_space(self) -> bool:
        return self.true_boundary_faces() == [Face(self.d - 1, False)] and self.lower[-1] == 0.0

    def axes(self) -> typing.List[np.ndarray]:
        """Cell-center coordinates along each axis."""
        return [
            self.lower[k] + (np.arange(n) + 0.5) * self.spacing[k]
            for k, n in enumerate(self.cells)
        ]

    def mesh(self) -> typing.Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def points(self) -> np.ndarray:
        """Cell centers as an array of shape cells + (d,)."""
        return np.stack(self.mesh(), axis=-1)

    def same_grid(self, other: "Domain") -> bool:
        return (
            self.cells == other.cells
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    def describe(self) -> typing.Dict[str, typing.Any]:
        return {
            "cells": list(self.cells),
            "box": [[float(a), float(b)] for a, b in zip(self.lower, self.upper)],
        }

    def __repr__(self) -> str:
        box = " x ".join(f"[{a:g}, {b:g}]" for a, b in zip(self.lower, self.upper))
        return f"Domain({box}, cells={self.cells})"
