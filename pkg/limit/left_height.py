from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.integrate import cumulative_trapezoid

from common import ConfigError
from distributions import AdmissibleMechanism
from .brownian import BrownianHeight
from .grid_path import GridPath


@dataclass(frozen=True)
class LeftHeightPath:
    J: GridPath
    values: GridPath
    in_horizon: np.ndarray


def build_U(Z: np.ndarray, mechanism: AdmissibleMechanism, dv: float) -> list[GridPath]:
    """U^j_v = x_j + sum_{i != j} alpha_ij int_0^v Z^i + delta_j v, from Z[k, i] on a level grid."""
    Z = np.asarray(Z, dtype=float)
    n_levels, n = Z.shape
    if n != mechanism.n_types:
        raise ConfigError(f"Z has {n} components, mechanism has {mechanism.n_types} types")
    v = np.arange(n_levels) * dv
    cumulative = cumulative_trapezoid(Z, dx=dv, axis=0, initial=0.0)
    paths = []
    for j in range(n):
        if mechanism.delta[j] <= 0:
            raise ConfigError(f"delta[{j}] must be positive to invert U")
        u = mechanism.x[j] + mechanism.delta[j] * v
        for i in range(n):
            if i != j:
                u = u + mechanism.alpha[i][j] * cumulative[:, i]
        paths.append(GridPath(dv, u))
    return paths


def build_U_rows(Z: np.ndarray, mechanism: AdmissibleMechanism, dv: float) -> np.ndarray:
    """Vectorized build_U over replicates: Z[r, k, i] -> U[r, j, k]."""
    n_rep, n_levels, n = Z.shape
    v = np.arange(n_levels) * dv
    cumulative = cumulative_trapezoid(Z, dx=dv, axis=1, initial=0.0)
    cross = mechanism.alpha_matrix().copy()
    np.fill_diagonal(cross, 0.0)
    U = np.einsum("rki,ij->rjk", cumulative, cross)
    U += np.asarray(mechanism.x)[None, :, None] + np.asarray(mechanism.delta)[None, :, None] * v[None, None, :]
    return U


def inverse_rows(U: np.ndarray, dv: float, levels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Row-wise inverse of strictly increasing U[r, :] by linear interpolation,
    levels[r, m] -> v. Levels below U[r, 0] map to 0; levels above the last
    value are out of horizon (nan).
    """
    n_rep, width = U.shape
    levels = np.asarray(levels, dtype=float).reshape(n_rep, -1)
    span = float(np.nanmax(U) - np.nanmin(np.minimum(U[:, :1], levels.min(axis=1, keepdims=True)))) + 1.0
    shift = (np.arange(n_rep) * span)[:, None]
    flat = (U + shift).ravel()
    target = levels + shift
    k = np.searchsorted(flat, target.ravel(), side="right").reshape(levels.shape) - np.arange(n_rep)[:, None] * width
    in_horizon = levels <= U[:, -1:]
    k_hi = np.clip(k, 1, width - 1)
    rows = np.arange(n_rep)[:, None]
    lo_u = U[rows, k_hi - 1]
    hi_u = U[rows, k_hi]
    frac = np.clip((levels - lo_u) / (hi_u - lo_u), 0.0, 1.0)
    v = (k_hi - 1 + frac) * dv
    v = np.where(k <= 0, 0.0, v)
    return np.where(in_horizon, v, np.nan), in_horizon


def build_left_height(height: BrownianHeight, U: GridPath) -> LeftHeightPath:
    """cevH = H + F(U)(ell), with F(U) the continuous inverse of U (0 while ell <= U_0)."""
    ell = height.ell.values
    in_horizon = ell <= U.values[-1]
    if not in_horizon.all():
        logger.warning(f"ell passes sup U after t={height.ell.times[np.argmin(in_horizon)]:.3f}; truncating")
    j = np.interp(ell, U.values, U.times)
    j = np.where(in_horizon, j, U.t_max)
    return LeftHeightPath(
        J=GridPath(height.H.dt, j),
        values=GridPath(height.H.dt, height.H.values + j),
        in_horizon=in_horizon,
    )


def stieltjes_drift(
    ell: GridPath,
    j: int,
    mechanism: AdmissibleMechanism,
    Z: np.ndarray,
    dv: float,
) -> GridPath:
    """
    J_t = int_{tau_x}^{t v tau_x} dell_s / (delta_j + sum_{i != j} alpha_ij Z^i(J_s)),
    integrated step by step against the increments of ell above x_j.
    """
    Z = np.asarray(Z, dtype=float)
    levels = np.arange(Z.shape[0]) * dv
    x, delta = mechanism.x[j], mechanism.delta[j]
    cross = [(i, mechanism.alpha[i][j]) for i in range(mechanism.n_types) if i != j and mechanism.alpha[i][j] != 0]
    above = np.maximum(ell.values, x)
    out = np.zeros(ell.values.size)
    acc = 0.0
    for k in range(1, above.size):
        step = above[k] - above[k - 1]
        if step > 0:
            rate = delta + sum(a * np.interp(acc, levels, Z[:, i]) for i, a in cross)
            acc += step / rate
        out[k] = acc
    return GridPath(ell.dt, out)
