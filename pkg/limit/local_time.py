from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid_path import GridPath


@dataclass(frozen=True)
class LocalTimeField:
    levels: np.ndarray
    values: np.ndarray
    eps: float


def band_occupation(samples: np.ndarray, levels: np.ndarray, eps: float) -> np.ndarray:
    """Number of samples in (v, v + eps] for each level v (last axis of samples is time)."""
    ordered = np.sort(samples, axis=-1)
    if ordered.ndim == 1:
        return np.searchsorted(ordered, levels + eps, side="right") - np.searchsorted(ordered, levels, side="right")
    counts = np.empty((*ordered.shape[:-1], levels.size), dtype=np.int64)
    for index in np.ndindex(*ordered.shape[:-1]):
        row = ordered[index]
        counts[index] = np.searchsorted(row, levels + eps, side="right") - np.searchsorted(row, levels, side="right")
    return counts


def local_time_field(path: GridPath, levels, eps: float, scale: float = 1.0) -> LocalTimeField:
    """
    Occupation-density local time dt/eps * #{t : path_t in (v, v + eps]}.
    scale = beta/2 converts to the semimartingale normalization.
    """
    if eps < path.dt:
        raise ValueError(f"band {eps} is finer than the time step {path.dt}")
    levels = np.asarray(levels, dtype=float)
    counts = band_occupation(path.values, levels, eps)
    return LocalTimeField(levels, scale * counts * path.dt / eps, eps)


def occupation_residual(path: GridPath, g: Callable, eps: float, levels=None) -> float:
    """|sum_t g(path_t) dt - sum_v g(v) L^v eps| on a band grid covering the path."""
    if levels is None:
        low = np.floor(path.values.min() / eps) - 1
        high = np.ceil(path.values.max() / eps)
        levels = np.arange(low, high + 1) * eps
    field = local_time_field(path, levels, eps)
    time_side = float(np.sum(g(path.values)) * path.dt)
    level_side = float(np.sum(g(field.levels) * field.values) * eps)
    return abs(time_side - level_side)
