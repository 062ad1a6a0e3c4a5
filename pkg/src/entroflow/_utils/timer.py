"""
Wall-clock budgets for flows and sweeps. A budget of `math.inf` never expires.
"""

import math
import time


class Timer:
    def __init__(self, budget: float = math.inf):
        self.budget = budget
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def remaining(self, throwing: bool = True) -> float:
        val = self.budget - self.elapsed()
        if throwing and val <= 0:
            msg = f"Time budget of {self.budget:.1f}s exhausted."
            raise TimeoutError(msg)
        return val

    def is_out_of_time(self) -> bool:
        return self.remaining(throwing=False) <= 0

    def __bool__(self) -> bool:
        return not self.is_out_of_time()

    def check(self) -> None:
        self.remaining(throwing=True)
