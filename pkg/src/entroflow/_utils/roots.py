"""
Root finding for monotone functions.
"""

import typing

import numpy as np


def bisect_increasing(
    fn: typing.Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    *,
    log_space: bool = False,
    rtol: float = 1e-13,
    max_iter: int = 200,
) -> np.ndarray:
    """
    Solve fn(x) = target elementwise for an increasing `fn`, given brackets
    with fn(lo) <= target <= fn(hi). With `log_space` the midpoint is geometric,
    which needs positive brackets and keeps relative accuracy over many decades.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    target = np.broadcast_to(np.asarray(target, dtype=float), lo.shape)
    for _ in range(max_iter):
        mid = np.sqrt(lo * hi) if log_space else 0.5 * (lo + hi)
        below = fn(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= rtol * np.maximum(np.abs(hi), np.abs(lo))):
            break
    return np.sqrt(lo * hi) if log_space else 0.5 * (lo + hi)
