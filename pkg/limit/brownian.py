from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .grid_path import GridPath


@dataclass(frozen=True)
class BrownianHeight:
    X: GridPath
    H: GridPath
    ell: GridPath


def brownian_increments(beta: float, drift: float, dt: float, n: int, rng: np.random.Generator) -> np.ndarray:
    return np.sqrt(2.0 * beta * dt) * rng.standard_normal(n) + drift * dt


def bridge_minimum(a, b, variance, rng: np.random.Generator):
    """Exact minimum of a Brownian bridge from a to b; variance is that of one step."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    spread = np.sqrt((b - a) ** 2 - 2.0 * variance * np.log1p(-rng.random(b.shape)))
    return np.minimum(0.5 * (a + b - spread), np.minimum(a, b))


def bridge_maximum(a, b, variance, rng: np.random.Generator):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    spread = np.sqrt((b - a) ** 2 - 2.0 * variance * np.log1p(-rng.random(b.shape)))
    return np.maximum(0.5 * (a + b + spread), np.maximum(a, b))


def running_low(x, variance: float, rng: np.random.Generator) -> np.ndarray:
    """
    Running minimum of the continuous path through the grid values x (time on
    the last axis). The minimum inside each step is drawn from its bridge, so
    the result does not lag the true minimum by O(sqrt(dt)).
    """
    x = np.asarray(x, dtype=float)
    inside = np.minimum.accumulate(bridge_minimum(x[..., :-1], x[..., 1:], variance, rng), axis=-1)
    start = x[..., :1]
    return np.concatenate((start, np.minimum(start, inside)), axis=-1)


def simulate_brownian_height(
    beta: float,
    alpha_jj: float,
    dt: float,
    t_max: float,
    rng: np.random.Generator,
) -> BrownianHeight:
    """X = sqrt(2 beta) B + alpha_jj t, H = (X - min X) / beta, ell = -min X."""
    if dt <= 0 or beta <= 0:
        raise ValueError(f"need dt > 0 and beta > 0, got dt={dt}, beta={beta}")
    n = int(np.floor(t_max / dt + 1e-9))
    x = np.concatenate(([0.0], np.cumsum(brownian_increments(beta, alpha_jj, dt, n, rng))))
    return height_from_driver(x, beta, dt, rng)


def height_from_driver(x: np.ndarray, beta: float, dt: float, rng: np.random.Generator | None = None) -> BrownianHeight:
    """With rng the running minimum includes the bridge minima between grid points."""
    low = np.minimum.accumulate(x) if rng is None else running_low(x, 2.0 * beta * dt, rng)
    return BrownianHeight(GridPath(dt, x), GridPath(dt, (x - low) / beta), GridPath(dt, -low))


def reflection_min_cdf(y, t: float, sigma: float, drift: float = 0.0):
    """P(-min_{s<=t} (sigma B_s + drift s) <= y)."""
    y = np.asarray(y, dtype=float)
    root = sigma * np.sqrt(t)
    value = norm.cdf((y + drift * t) / root) - np.exp(-2.0 * drift * y / sigma**2) * norm.cdf(
        (-y + drift * t) / root
    )
    return np.where(y < 0, 0.0, value)
