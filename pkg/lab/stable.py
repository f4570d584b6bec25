import math

import numpy as np
from scipy.stats import levy_stable


def stable_scale(c: float, alpha: float, t: float = 1.0) -> float:
    """S1 scale of the spectrally positive law with E exp(-l X_t) = exp(t c l^alpha)."""
    return (-t * c * math.cos(math.pi * alpha / 2.0)) ** (1.0 / alpha)


def stable_cdf(c: float, alpha: float, t: float = 1.0, points: int = 300):
    """CDF of the spectrally positive alpha-stable limit, tabulated once and interpolated."""
    scale = stable_scale(c, alpha, t)
    body = np.linspace(-8.0, 10.0, points, endpoint=False)
    tail = np.geomspace(10.0, 1000.0, points // 2)
    grid = np.concatenate((body, tail)) * scale
    table = levy_stable.cdf(grid, alpha, 1.0, loc=0.0, scale=scale)
    table = np.maximum.accumulate(np.clip(table, 0.0, 1.0))

    def cdf(x):
        return np.interp(x, grid, table, left=0.0, right=1.0)

    return cdf
