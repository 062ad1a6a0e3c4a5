import math

import numpy as np
import pytest

from entroflow._utils import Timer, bisect_increasing


def test_timer_without_budget_never_expires():
    timer = Timer()
    assert timer
    assert timer.remaining() == math.inf
    timer.check()


def test_timer_with_exhausted_budget():
    timer = Timer(0.0)
    assert timer.is_out_of_time()
    assert not timer
    with pytest.raises(TimeoutError):
        timer.check()
    assert timer.remaining(throwing=False) <= 0


def test_bisect_increasing_cubic():
    target = np.array([-8.0, 0.0, 1.0, 27.0])
    x = bisect_increasing(lambda x: x**3, target, np.full(4, -10.0), np.full(4, 10.0))
    np.testing.assert_allclose(x, [-2.0, 0.0, 1.0, 3.0], atol=1e-11)


def test_bisect_increasing_log_space_keeps_relative_accuracy():
    target = np.array([1e-12, 1.0, 1e12])
    x = bisect_increasing(
        lambda x: x, target, np.full(3, 1e-20), np.full(3, 1e20), log_space=True
    )
    np.testing.assert_allclose(x, target, rtol=1e-12)
