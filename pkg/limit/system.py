from dataclasses import dataclass

import numpy as np
from loguru import logger

from common import ConfigError
from distributions import AdmissibleMechanism
from .brownian import BrownianHeight, brownian_increments, height_from_driver
from .grid_path import GridPath
from .left_height import LeftHeightPath, build_U, build_left_height
from .local_time import LocalTimeField, local_time_field
from .mcbi import McbiTrajectory, mcbi_sde


@dataclass(frozen=True)
class TypeSystem:
    height: BrownianHeight
    left: LeftHeightPath
    local_time: LocalTimeField | None
    capped: bool


@dataclass(frozen=True)
class LimitSystem:
    """One realization of the Brownian-case continuum objects, built from an SDE trajectory."""

    mechanism: AdmissibleMechanism
    Z: McbiTrajectory
    U: list[GridPath]
    types: list[TypeSystem]

    def self_consistency(self) -> np.ndarray:
        """max over levels of |L^v(cevH^j) - Z^j_v| per type (nan when no local time was estimated)."""
        gaps = np.full(len(self.types), np.nan)
        for j, system in enumerate(self.types):
            if system.local_time is None:
                continue
            z = self.Z.component(j + 1).at(system.local_time.levels)
            gaps[j] = float(np.max(np.abs(system.local_time.values - z)))
        return gaps

    def check_monotone(self, tol: float = 1e-12) -> bool:
        """ell, J and U nondecreasing, U slope at least delta, cevH >= H."""
        for j, system in enumerate(self.types):
            u = self.U[j]
            if np.min(np.diff(u.values)) / u.dt < self.mechanism.delta[j] - 1e-9:
                return False
            if not (system.height.ell.is_nondecreasing(tol) and system.left.J.is_nondecreasing(tol)):
                return False
            if (system.left.values.values < system.height.H.values - tol).any():
                return False
        return True


def build_limit_system(
    mechanism: AdmissibleMechanism,
    rng: np.random.Generator,
    dt: float = 1e-3,
    dv: float = 1e-3,
    v_max: float = 1.0,
    t_max: float | None = None,
    levels: list[float] | None = None,
    eps: float = 0.02,
    chunk: float = 1.0,
    t_cap: float = 50.0,
    semimartingale: bool = False,
) -> LimitSystem:
    """
    Ray-Knight substitution: Z from the SDE, U from Z, then every cevH^j from
    its own Brownian height. With t_max unset, each Brownian path is extended
    in chunks until F(U^j)(ell^j) passes v_max + eps, or t_cap is reached.
    With semimartingale set, local times are multiplied by beta_j/2.
    """
    if not mechanism.is_brownian:
        raise ConfigError("limit system needs a Brownian mechanism")
    top = v_max + eps
    Z = mcbi_sde(mechanism, dv, top + 2 * dv, rng)
    U = build_U(Z.values[0], mechanism, dv)
    types = []
    for j in range(mechanism.n_types):
        beta, drift = mechanism.beta[j], mechanism.alpha[j][j]
        target = float(np.interp(top, U[j].times, U[j].values))
        x = np.zeros(1)
        capped = False
        steps = int(np.floor((t_max if t_max is not None else chunk) / dt + 1e-9))
        while True:
            x = np.concatenate((x, x[-1] + np.cumsum(brownian_increments(beta, drift, dt, steps, rng))))
            if t_max is not None or -x.min() > target:
                break
            if (x.size - 1) * dt >= t_cap:
                capped = True
                logger.warning(f"type {j + 1}: local time at 0 stayed below {target:.3f} up to t={t_cap}")
                break
        height = height_from_driver(x, beta, dt, rng)
        left = build_left_height(height, U[j])
        field = local_time_field(left.values, levels, eps, beta / 2.0 if semimartingale else 1.0) if levels is not None else None
        types.append(TypeSystem(height, left, field, capped))
    return LimitSystem(mechanism, Z, U, types)
