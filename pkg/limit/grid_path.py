from dataclasses import dataclass

import numpy as np
import polars as pl


@dataclass(frozen=True)
class GridPath:
    """Path sampled at t = 0, dt, 2dt, ..., t_max."""

    dt: float
    values: np.ndarray

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"step must be positive, got {self.dt}")
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("grid path needs a nonempty 1-d array")
        if not np.isfinite(self.values).all():
            raise ValueError("grid path has non-finite values")

    def __len__(self):
        return self.values.size

    @property
    def t_max(self) -> float:
        return (self.values.size - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.dt

    def at(self, t) -> np.ndarray:
        """Linear interpolation; t beyond t_max raises."""
        t = np.asarray(t, dtype=float)
        if (t > self.t_max + 1e-12).any():
            raise ValueError(f"time {float(t.max())} beyond horizon {self.t_max}")
        return np.interp(t, self.times, self.values)

    def index(self, t: float) -> int:
        return int(np.floor(t / self.dt + 1e-9))

    def is_nondecreasing(self, tol: float = 0.0) -> bool:
        return bool((np.diff(self.values) >= -tol).all())

    def to_frame(self, name: str = "value") -> pl.DataFrame:
        return pl.DataFrame({"time": self.times, name: self.values})


def from_function(func, dt: float, t_max: float) -> GridPath:
    n = int(np.floor(t_max / dt + 1e-9))
    return GridPath(dt, np.asarray(func(np.arange(n + 1) * dt), dtype=float))
