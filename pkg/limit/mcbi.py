from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.linalg import expm

from common import ConfigError
from distributions import AdmissibleMechanism
from .grid_path import GridPath

CLAMP_WARNING = 0.01


@dataclass(frozen=True)
class McbiTrajectory:
    """values[r, k, j-1] = Z^j at level k*dv for replicate r."""

    dv: float
    values: np.ndarray
    clamp_fraction: float

    def component(self, j: int, replicate: int = 0) -> GridPath:
        return GridPath(self.dv, self.values[replicate, :, j - 1])

    def at(self, v: float) -> np.ndarray:
        return self.values[:, int(round(v / self.dv))]


def _check(mechanism: AdmissibleMechanism, dt: float):
    if dt <= 0:
        raise ConfigError(f"step must be positive, got {dt}")
    if not mechanism.is_brownian:
        raise ConfigError("the square-root SDE needs a Brownian mechanism")


def _step(z, alpha, beta, delta, dt, rng):
    """Full-truncation Euler step; returns the clamped state and clamp count."""
    pos = np.maximum(z, 0.0)
    noise = rng.standard_normal(z.shape)
    nxt = z + (delta + pos @ alpha) * dt + np.sqrt(2.0 * beta * pos * dt) * noise
    clamped = nxt < 0
    nxt[clamped] = 0.0
    return nxt, int(clamped.sum())


def mcbi_sde(
    mechanism: AdmissibleMechanism,
    dt: float,
    v_max: float,
    rng: np.random.Generator,
    replicates: int = 1,
) -> McbiTrajectory:
    """dZ^j = sqrt(2 beta_j Z^j) dW^j + (delta_j + sum_i alpha_ij Z^i) dv, Z_0 = x."""
    _check(mechanism, dt)
    steps = int(np.floor(v_max / dt + 1e-9))
    alpha = mechanism.alpha_matrix()
    beta, delta = np.asarray(mechanism.beta), np.asarray(mechanism.delta)
    out = np.empty((replicates, steps + 1, mechanism.n_types))
    z = np.tile(np.asarray(mechanism.x, dtype=float), (replicates, 1))
    out[:, 0] = z
    clamps = 0
    for k in range(steps):
        z, c = _step(z, alpha, beta, delta, dt, rng)
        clamps += c
        out[:, k + 1] = z
    fraction = clamps / max(1, steps * z.size)
    if fraction > CLAMP_WARNING:
        logger.warning(f"SDE clamped {fraction:.2%} of steps at dt={dt}")
    return McbiTrajectory(dt, out, fraction)


def mcbi_marginals(
    mechanism: AdmissibleMechanism,
    dt: float,
    v_list: list[float],
    rng: np.random.Generator,
    replicates: int,
) -> tuple[np.ndarray, float]:
    """Z at the levels in v_list without storing whole trajectories: (replicates, len(v_list), N)."""
    _check(mechanism, dt)
    marks = [int(round(v / dt)) for v in v_list]
    alpha = mechanism.alpha_matrix()
    beta, delta = np.asarray(mechanism.beta), np.asarray(mechanism.delta)
    z = np.tile(np.asarray(mechanism.x, dtype=float), (replicates, 1))
    out = np.empty((replicates, len(v_list), mechanism.n_types))
    clamps = 0
    last = max(marks) if marks else 0
    for k in range(last + 1):
        for slot, mark in enumerate(marks):
            if mark == k:
                out[:, slot] = z
        if k < last:
            z, c = _step(z, alpha, beta, delta, dt, rng)
            clamps += c
    return out, clamps / max(1, last * z.size)


def mcbi_mean(mechanism: AdmissibleMechanism, v: float) -> np.ndarray:
    """E[Z_v] from the linear moment equation m' = delta + alpha^T m, m(0) = x."""
    n = mechanism.n_types
    gen = np.zeros((n + 1, n + 1))
    gen[:n, :n] = mechanism.alpha_matrix().T
    gen[:n, n] = mechanism.delta
    state = np.append(np.asarray(mechanism.x, dtype=float), 1.0)
    return (expm(gen * v) @ state)[:n]
