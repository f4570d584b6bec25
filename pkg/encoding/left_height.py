from dataclasses import dataclass

import numpy as np
from loguru import logger

from .bundle import EncodingBundle


@dataclass(frozen=True)
class LeftHeight:
    values: np.ndarray
    in_horizon: np.ndarray
    drift: np.ndarray

    @property
    def excluded(self) -> int:
        return int((~self.in_horizon).sum())


def immigrant_passage(immigrants: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """inf{h : I(h) > level} for nondecreasing I; len(I) when the level is never passed."""
    return np.searchsorted(immigrants, levels, side="right")


def left_height(bundle: EncodingBundle, j: int) -> LeftHeight:
    """Global heights of the explored type-j vertices: H^j plus the height of the component's j-root."""
    explored = bundle.horizon(j)
    completed = -bundle.running_min[j][:explored]
    immigrants = bundle.profiles.I[j - 1]
    drift = immigrant_passage(immigrants, completed)
    in_horizon = drift < immigrants.size
    values = np.where(in_horizon, bundle.height[j] + drift, -1)
    if not in_horizon.all():
        logger.debug(f"type {j}: {int((~in_horizon).sum())} indices beyond the immigration horizon")
    return LeftHeight(values.astype(np.int64), in_horizon, np.where(in_horizon, drift, -1))
