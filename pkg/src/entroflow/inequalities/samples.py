"""
Seedable test functions for inequality sweeps.

Every generator takes a `numpy.random.Generator`; sweeps derive one generator
per sample from `(seed, index)` so that results do not depend on the order in
which workers pick samples up.
"""

import typing

import numpy as np

from ..functionals import FLOOR
from ..grid import Domain, Face, FaceKind, Field, integrate


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _normalized(domain: Domain, values: np.ndarray, mass: float) -> Field:
    values = np.maximum(values, FLOOR * values.max())
    u = Field(domain, values)
    return u * (mass / integrate(u))


def random_bumps(
    domain: Domain,
    rng: np.random.Generator,
    n_bumps: typing.Optional[int] = None,
    mass: float = 1.0,
) -> Field:
    """
    Sum of 1-3 positive log-quadratic bumps w exp(-|x - c|^2 / (2 s^2)),
    floored at 1e-12 * max and scaled to `mass`. Each bump's logarithm is a
    concave quadratic, so log u is smooth and fields of this kind stay in the
    positive setting of the inequalities. Centers stay at least 30% of the
    span away from truncation faces; along a true boundary they may sit right
    at the face so that traces are exercised.
    """
    k = int(rng.integers(1, 4)) if n_bumps is None else n_bumps
    span = domain.upper - domain.lower
    centers = np.empty((k, domain.d))
    for axis in range(domain.d):
        lo_free = domain.face_kind(Face(axis, False)) == FaceKind.TRUE_BOUNDARY
        hi_free = domain.face_kind(Face(axis, True)) == FaceKind.TRUE_BOUNDARY
        lo = 0.0 if lo_free else 0.3
        hi = 1.0 if hi_free else 0.7
        centers[:, axis] = domain.lower[axis] + span[axis] * rng.uniform(lo, hi, size=k)
    widths = float(span.min()) * rng.uniform(0.04, 0.1, size=k)
    weights = rng.uniform(0.5, 1.5, size=k)
    points = domain.points()
    values = np.zeros(domain.shape)
    for c, s, w in zip(centers, widths, weights):
        values += w * np.exp(-np.sum((points - c) ** 2, axis=-1) / (2.0 * s**2))
    return _normalized(domain, values, mass)


def random_smooth_field(domain: Domain, rng: np.random.Generator, modes: int = 2) -> Field:
    """
    Random cosine series sum_k c_k prod_j cos(pi k_j (x_j - lower_j) / span_j)
    with wave numbers up to `modes` and max |value| <= 1. Its normal
    derivative vanishes on every face of the box.
    """
    span = domain.upper - domain.lower
    scaled = [(x - lo) / s for x, lo, s in zip(domain.mesh(), domain.lower, span)]
    values = np.zeros(domain.shape)
    for k in np.ndindex(*([modes + 1] * domain.d)):
        weight = rng.standard_normal() / (1.0 + float(np.dot(k, k))) ** 2
        term = np.ones(domain.shape)
        for kj, xj in zip(k, scaled):
            term = term * np.cos(np.pi * kj * xj)
        values += weight * term
    return Field(domain, values / max(float(np.max(np.abs(values))), 1e-300))


def halfspace_gaussian(domain: Domain, h: float = 0.0, scale: float = 0.5, mass: float = 1.0) -> Field:
    """exp(-scale * ||x + h e_d||^2) scaled to `mass` on the grid."""
    points = domain.points().copy()
    points[..., -1] += h
    values = np.exp(-scale * np.sum(points**2, axis=-1))
    return _normalized(domain, values, mass)


def perturbation(v: Field, rng: np.random.Generator) -> Field:
    """For v > 0, a direction w with int w = 0 such that v + t w > 0 for |t| < 1."""
    bump = random_bumps(v.domain, rng, mass=integrate(v))
    w = bump - v
    scale = float(np.max(np.abs(w.values) / np.maximum(v.values, FLOOR)))
    return w * (1.0 / max(scale, 1.0))
