import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def within_sigmas(successes: int, trials: int, p: float, sigmas: float = 4.0) -> bool:
    """二项频率与 p 的偏离不超过 sigmas 个标准差；p 为 0 或 1 时要求精确相等"""
    sd = math.sqrt(p * (1 - p) / trials)
    rate = successes / trials
    if sd == 0:
        return rate == p
    return abs(rate - p) <= sigmas * sd
