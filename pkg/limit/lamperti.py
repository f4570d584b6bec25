from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from loguru import logger

from common import HorizonError
from distributions import AdmissibleMechanism
from .brownian import brownian_increments
from .mcbi import McbiTrajectory


@dataclass
class DrivingPaths:
    """
    Driving walks of the time change. diagonal[r, j-1, m] is X^{j,j} at time
    m*dt; off-diagonal walks are the lines alpha_ij*t and Y^j = delta_j*t.
    Brownian drivers carry their generator and extend on demand.
    """

    diagonal: np.ndarray
    dt: float
    cross: np.ndarray
    immigration: np.ndarray
    beta: np.ndarray | None = None
    drift: np.ndarray | None = None
    rng: np.random.Generator | None = field(default=None, repr=False)

    @property
    def horizon(self) -> float:
        return (self.diagonal.shape[2] - 1) * self.dt

    def extend(self, needed: float):
        if self.rng is None:
            raise HorizonError(f"time change reached {needed:.4g} past the driving horizon {self.horizon:.4g}")
        while self.horizon < needed:
            n_rep, n, width = self.diagonal.shape
            more = width - 1
            inc = np.stack(
                [
                    np.stack([brownian_increments(self.beta[j], self.drift[j], self.dt, more, self.rng) for j in range(n)])
                    for _ in range(n_rep)
                ]
            )
            tail = self.diagonal[:, :, -1:] + np.cumsum(inc, axis=2)
            self.diagonal = np.concatenate((self.diagonal, tail), axis=2)
            logger.debug(f"Extended driving paths to {self.horizon:.4g}")

    def read(self, c: np.ndarray) -> np.ndarray:
        """X^{j,j}(c[r, j]) by linear interpolation."""
        top = float(c.max()) if c.size else 0.0
        if top > self.horizon:
            self.extend(top)
        pos = c / self.dt
        lo = np.minimum(np.floor(pos).astype(np.int64), self.diagonal.shape[2] - 2)
        frac = pos - lo
        r = np.arange(c.shape[0])[:, None]
        j = np.arange(c.shape[1])[None, :]
        return self.diagonal[r, j, lo] * (1 - frac) + self.diagonal[r, j, lo + 1] * frac


def _lines(mechanism: AdmissibleMechanism) -> tuple[np.ndarray, np.ndarray]:
    cross = mechanism.alpha_matrix().copy()
    np.fill_diagonal(cross, 0.0)
    return cross, np.asarray(mechanism.delta, dtype=float)


def brownian_driving_paths(
    mechanism: AdmissibleMechanism,
    dt: float,
    horizon: float,
    rng: np.random.Generator,
    replicates: int = 1,
    extend: bool = True,
) -> DrivingPaths:
    n = mechanism.n_types
    steps = max(2, int(np.ceil(horizon / dt)))
    beta = np.asarray(mechanism.beta, dtype=float)
    drift = np.array([mechanism.alpha[j][j] for j in range(n)], dtype=float)
    inc = np.sqrt(2.0 * beta * dt)[None, :, None] * rng.standard_normal((replicates, n, steps)) + (drift * dt)[None, :, None]
    diagonal = np.concatenate((np.zeros((replicates, n, 1)), np.cumsum(inc, axis=2)), axis=2)
    cross, immigration = _lines(mechanism)
    return DrivingPaths(diagonal, dt, cross, immigration, beta, drift, rng if extend else None)


def function_driving_paths(
    mechanism: AdmissibleMechanism,
    diagonal: Callable[[np.ndarray], np.ndarray],
    dt: float,
    horizon: float,
) -> DrivingPaths:
    """Deterministic drivers X^{j,j}(t) = diagonal(t)[j-1], one replicate."""
    t = np.arange(int(np.ceil(horizon / dt)) + 1) * dt
    values = np.asarray(diagonal(t), dtype=float).reshape(mechanism.n_types, t.size)
    cross, immigration = _lines(mechanism)
    return DrivingPaths(values[None], dt, cross, immigration)


def lamperti_solve(
    mechanism: AdmissibleMechanism,
    driving: DrivingPaths,
    dv: float,
    v_max: float,
) -> McbiTrajectory:
    """
    Z^j_v = x_j + sum_i X^{i,j}(C^i_v) + Y^j_v, C advanced by forward Euler;
    negative driven values are clamped to 0 and counted.
    """
    if dv <= 0:
        raise ValueError(f"step must be positive, got {dv}")
    steps = int(np.floor(v_max / dv + 1e-9))
    n_rep = driving.diagonal.shape[0]
    x = np.asarray(mechanism.x, dtype=float)
    z = np.tile(x, (n_rep, 1))
    c = np.zeros_like(z)
    out = np.empty((n_rep, steps + 1, mechanism.n_types))
    out[:, 0] = z
    clamps = 0
    for k in range(1, steps + 1):
        c = c + z * dv
        z = x + driving.read(c) + c @ driving.cross + driving.immigration * (k * dv)
        negative = z < 0
        clamps += int(negative.sum())
        z[negative] = 0.0
        out[:, k] = z
    return McbiTrajectory(dv, out, clamps / max(1, steps * z.size))
