from .roots import bisect_increasing
from .timer import Timer

__all__ = ["Timer", "bisect_increasing"]
