import numpy as np
from pydantic import BaseModel

# source -> (value divisor, index multiplier) in terms of p and gamma_p
NORMALIZATION = {
    "lukasiewicz": ("p", "p_gamma"),
    "running_min": ("p", "p_gamma"),
    "height": ("gamma", "p_gamma"),
    "left_height": ("gamma", "p_gamma"),
    "profile": ("p", "gamma"),
    "immigrant_count": ("p", "gamma"),
    "cumulative_profile": ("p_gamma", "gamma"),
}


def _scale(name: str, p: int, gamma: int) -> float:
    return {"p": p, "gamma": gamma, "p_gamma": p * gamma}[name]


def rescaled_values(source: str, path: np.ndarray, p: int, gamma: int, times) -> np.ndarray:
    """path[floor(time_scale * t)] / value_scale; nan past the end of the path."""
    value_scale, time_scale = NORMALIZATION[source]
    index = np.floor(np.asarray(times, dtype=float) * _scale(time_scale, p, gamma) + 1e-9).astype(np.int64)
    inside = index < len(path)
    out = np.full(index.shape, np.nan)
    out[inside] = np.asarray(path)[index[inside]] / _scale(value_scale, p, gamma)
    return out


def rescaled_index(source: str, p: int, gamma: int, t: float) -> int:
    return int(np.floor(t * _scale(NORMALIZATION[source][1], p, gamma) + 1e-9))


class RescaledPath(BaseModel):
    source: str
    p: int
    gamma: int
    times: list[float]
    values: list[float]


def rescale(source: str, path: np.ndarray, p: int, gamma: int, times) -> RescaledPath:
    if source not in NORMALIZATION:
        raise ValueError(f"unknown process {source!r}")
    values = rescaled_values(source, path, p, gamma, times)
    return RescaledPath(source=source, p=p, gamma=gamma, times=list(map(float, times)), values=values.tolist())
