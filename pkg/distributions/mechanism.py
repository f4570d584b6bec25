import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from common import ConfigError


class AdmissibleMechanism(BaseModel):
    """
    Branching mechanism of an N-type system in the Brownian (or stable) case.

    alpha[i][j] for i != j is the cross rate at which type-i mass feeds type j;
    alpha[j][j] <= 0 is the subcritical drift of type j, so the branching
    exponent of type j is psi_j(l) = -alpha[j][j] l + beta[j] l^2 (+ stable part).
    """

    model_config = ConfigDict(frozen=True)

    beta: list[float]
    alpha: list[list[float]]
    delta: list[float]
    x: list[float]
    stable_alpha: float | None = None
    stable_c: list[float] | None = None

    @model_validator(mode="after")
    def _check(self):
        n = len(self.beta)
        if n == 0:
            raise ConfigError("mechanism needs at least one type")
        if len(self.alpha) != n or any(len(row) != n for row in self.alpha):
            raise ConfigError(f"alpha must be {n}x{n}")
        if len(self.delta) != n or len(self.x) != n:
            raise ConfigError("delta and x need one entry per type")
        for j in range(n):
            if self.delta[j] <= 0:
                raise ConfigError(f"immigration rate delta[{j}] must be positive")
            if self.x[j] < 0:
                raise ConfigError(f"initial mass x[{j}] must be nonnegative")
            if self.beta[j] < 0:
                raise ConfigError(f"beta[{j}] must be nonnegative")
            if self.alpha[j][j] > 0:
                raise ConfigError(f"diagonal drift alpha[{j}][{j}] must be <= 0")
            for i in range(n):
                if i != j and self.alpha[i][j] < 0:
                    raise ConfigError(f"cross rate alpha[{i}][{j}] must be nonnegative")
        if self.stable_alpha is None:
            if any(b <= 0 for b in self.beta):
                raise ConfigError("Brownian mechanism needs beta > 0 for every type")
        else:
            if not 1 < self.stable_alpha < 2:
                raise ConfigError("stable index must lie in (1, 2)")
            if self.stable_c is None or len(self.stable_c) != n:
                raise ConfigError("stable mechanism needs one coefficient per type")
        return self

    @property
    def n_types(self) -> int:
        return len(self.beta)

    @property
    def is_brownian(self) -> bool:
        return self.stable_alpha is None

    def drift(self, j: int) -> float:
        """psi-drift of type j (nonnegative)."""
        return -self.alpha[j][j]

    def alpha_matrix(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=float)

    def psi(self, j: int, lam: float) -> float:
        value = self.drift(j) * lam + self.beta[j] * lam**2
        if self.stable_alpha is not None:
            value += self.stable_c[j] * lam**self.stable_alpha
        return value
