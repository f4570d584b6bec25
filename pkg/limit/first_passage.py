from dataclasses import dataclass

import numpy as np
from loguru import logger

from .grid_path import GridPath


@dataclass(frozen=True)
class FirstPassage:
    """F(f) on a level grid; levels at or above sup f are out of horizon (value nan)."""

    levels: np.ndarray
    values: np.ndarray
    in_horizon: np.ndarray


def first_passage_at(f: GridPath, levels) -> FirstPassage:
    """inf{s : f(s) > t} for each level t, exact on the grid of f (right-continuous)."""
    levels = np.asarray(levels, dtype=float)
    hit = np.searchsorted(f.values, levels, side="right")
    in_horizon = hit < f.values.size
    values = np.where(in_horizon, hit * f.dt, np.nan)
    if not in_horizon.all():
        logger.debug(f"{int((~in_horizon).sum())} levels beyond sup f = {f.values[-1]:.4g}")
    return FirstPassage(levels, values, in_horizon)


def first_passage_inverse(f: GridPath, level_step: float, level_max: float) -> FirstPassage:
    if not f.is_nondecreasing():
        raise ValueError("first passage inverse needs a nondecreasing path")
    n = int(np.floor(level_max / level_step + 1e-9))
    return first_passage_at(f, np.arange(n + 1) * level_step)
