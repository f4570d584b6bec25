from dataclasses import dataclass

import numpy as np
from loguru import logger

from distributions import AdmissibleMechanism
from .brownian import bridge_maximum, bridge_minimum
from .left_height import build_U_rows, inverse_rows
from .mcbi import mcbi_sde


@dataclass(frozen=True)
class RayKnightSample:
    """local_time[r, j-1, m] estimates L^v at levels[m]; z holds the SDE values the U's were built from."""

    levels: np.ndarray
    local_time: np.ndarray
    z: np.ndarray
    excluded: np.ndarray


def ray_knight_local_times(
    rng: np.random.Generator,
    replicates: int,
    mechanism: AdmissibleMechanism,
    levels: list[float],
    dt: float = 1e-3,
    dv: float = 1e-3,
    eps: float = 0.02,
    t_cap: float = 20.0,
    scale: float = 1.0,
) -> RayKnightSample:
    """
    Terminal local times of the left-height processes built from one SDE
    trajectory per replicate.

    Only the occupation of cevH below the highest requested level matters, so
    each excursion of H is reflected at the level where cevH would cross it. This
    removes the time spent above without changing the law of the
    occupation below, and keeps the horizon short. The band for level v is
    centred on v, so the estimate carries no O(eps) drift of the mean.
    """
    if eps < dt:
        raise ValueError(f"band {eps} is finer than the time step {dt}")
    levels = np.asarray(levels, dtype=float)
    lower = levels - eps / 2
    top = float(levels.max() + eps + 2 * dv)
    traj = mcbi_sde(mechanism, dv, top + 2 * dv, rng, replicates)
    U = build_U_rows(traj.values, mechanism, dv)
    n = mechanism.n_types
    local = np.zeros((replicates, n, levels.size))
    excluded = np.zeros((replicates, n), dtype=bool)
    max_steps = int(np.ceil(t_cap / dt))
    for j in range(n):
        beta, drift = mechanism.beta[j], mechanism.alpha[j][j]
        sigma = np.sqrt(2.0 * beta * dt)
        r = np.zeros(replicates)
        ell = np.zeros(replicates)
        jterm = np.zeros(replicates)
        active = np.ones(replicates, dtype=bool)
        counts = np.zeros((replicates, levels.size), dtype=np.int64)
        for _ in range(max_steps):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            start = r[idx]
            end = start + sigma * rng.standard_normal(idx.size) + drift * dt
            # Skorokhod push at 0 from the bridge minimum of the step
            push = np.maximum(0.0, -bridge_minimum(start, end, sigma**2, rng))
            hit = push > 0
            if hit.any():
                ell[idx[hit]] += push[hit]
                passage, inside = inverse_rows(U[idx[hit], j], dv, ell[idx[hit]])
                jterm[idx[hit]] = np.where(inside[:, 0], passage[:, 0], np.inf)
            ceiling = beta * np.maximum(top - jterm[idx], 0.0)
            excess = np.maximum(0.0, bridge_maximum(start, end, sigma**2, rng) + push - ceiling)
            rr = np.maximum(end + push - excess, 0.0)
            r[idx] = rr
            height = rr / beta + jterm[idx]
            counts[idx] += (height[:, None] > lower[None, :]) & (height[:, None] <= lower[None, :] + eps)
            active[idx[jterm[idx] >= top]] = False
        excluded[:, j] = active
        local[:, j] = scale * counts * dt / eps
        if active.any():
            logger.warning(f"type {j + 1}: {int(active.sum())} paths hit the horizon cap t={t_cap}")
    marks = np.rint(levels / dv).astype(np.int64)
    return RayKnightSample(levels, local, traj.values[:, marks, :], excluded)
