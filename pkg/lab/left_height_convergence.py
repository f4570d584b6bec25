import numpy as np
from loguru import logger

from common import ResourceLimitError
from distributions.families import ScalingFamily
from encoding import encode_forest, left_height
from forest import grow_forest
from limit import build_U_rows, inverse_rows, mcbi_sde
from utils.replicates import run_blocks, run_replicates
from .experiment import Experiment
from .height_convergence import brownian_block
from .rescale import rescale, rescaled_index
from .statistics import ks_two_sample


def left_height_replicate(rng, ensemble, h_start, p, gamma, times):
    """
    Rescaled cevH^j and its drift term at the given times for every type:
    shape (N, 2, T). The forest grows until every index is explored and
    inside the immigration horizon; past the vertex budget the replicate is nan.
    """
    need = rescaled_index("left_height", p, gamma, max(times))
    lefts = {}

    def covered(forest):
        bundle = encode_forest(forest)
        found = lefts[forest.h_max] = [left_height(bundle, j) for j in range(1, forest.n_types + 1)]
        return all(left.values.size > need and left.in_horizon[need] for left in found)

    out = np.full((ensemble.n_types, 2, len(times)), np.nan)
    try:
        forest = grow_forest(ensemble, h_start, int(rng.integers(2**63)), covered)
    except ResourceLimitError as err:
        logger.warning(f"Replicate excluded: {err}")
        return out
    for j, left in enumerate(lefts[forest.h_max]):
        values = np.where(left.in_horizon, left.values, np.nan)
        drift = np.where(left.in_horizon, left.drift, np.nan)
        out[j, 0] = rescale("left_height", values, p, gamma, times).values
        out[j, 1] = rescale("height", drift, p, gamma, times).values
    return out


def continuum_block(rng, n, mechanism, dt, dv, v_horizon, t_list):
    """cevH^j_t and F(U^j)(ell^j_t) built from one SDE trajectory per replicate: shape (n, N, 2, T)."""
    traj = mcbi_sde(mechanism, dv, v_horizon, rng, n)
    U = build_U_rows(traj.values, mechanism, dv)
    out = np.empty((n, mechanism.n_types, 2, len(t_list)))
    for j in range(mechanism.n_types):
        hl = brownian_block(rng, n, mechanism.beta[j], mechanism.alpha[j][j], dt, t_list)
        drift, _ = inverse_rows(U[:, j], dv, hl[:, 1])
        out[:, j, 0] = hl[:, 0] + drift
        out[:, j, 1] = drift
    return out


def affine_block(rng, n, mechanism, dt, t_list):
    """Closed form for U^j_v = x_j + delta_j v: cevH = H + max(0, ell - x_j)/delta_j."""
    out = np.empty((n, mechanism.n_types, len(t_list)))
    for j in range(mechanism.n_types):
        hl = brownian_block(rng, n, mechanism.beta[j], mechanism.alpha[j][j], dt, t_list)
        out[:, j] = hl[:, 0] + np.maximum(0.0, hl[:, 1] - mechanism.x[j]) / mechanism.delta[j]
    return out


class LeftHeightConvergence(Experiment):
    """Rescaled discrete left heights against the limit built by the Ray-Knight substitution."""

    name = "left-height-convergence"
    left_height_note = True

    def __init__(
        self,
        family: ScalingFamily,
        t_list: list[float],
        p: int,
        replicates: int,
        dt: float = 1e-3,
        dv: float = 1e-3,
        v_horizon: float = 6.0,
        h_factor: float = 3.0,
        **kwargs,
    ):
        super().__init__(replicates, **kwargs)
        self.family = family
        self.t_list = list(t_list)
        self.p = p
        self.dt, self.dv = dt, dv
        self.v_horizon = v_horizon
        self.h_factor = h_factor

    @property
    def scales(self) -> list[int]:
        return [self.p]

    @property
    def decoupled(self) -> bool:
        m = self.family.mechanism
        return all(m.alpha[i][j] == 0 for i in range(m.n_types) for j in range(m.n_types) if i != j)

    def collect(self):
        self.require_replicates()
        m = self.family.mechanism
        p, gamma = self.p, self.family.gamma(self.p)
        h_start = int(np.ceil(self.h_factor * gamma))
        discrete = np.stack(
            run_replicates(
                left_height_replicate,
                self.next_seed(),
                self.replicates,
                self.family.ensemble(p),
                h_start,
                p,
                gamma,
                self.t_list,
                threads=self.threads,
            )
        )
        limit = run_blocks(
            continuum_block, self.next_seed(), self.replicates, m, self.dt, self.dv, self.v_horizon, self.t_list, threads=self.threads
        )
        affine = None
        if self.decoupled:
            affine = run_blocks(affine_block, self.next_seed(), self.replicates, m, self.dt, self.t_list, threads=self.threads)
        coupled_ks = self.thresholds.ks if self.decoupled else self.thresholds.ks_coupled
        for slot, t in enumerate(self.t_list):
            for j in range(m.n_types):
                disc = discrete[:, j, :, slot]
                cont = limit[:, j, :, slot]
                self.attempted += 2 * disc.shape[0]
                self.excluded += int(np.isnan(disc[:, 0]).sum() + np.isnan(cont[:, 0]).sum())
                where = {"p": p, "at": t, "component": j + 1}
                self.record("ks_left_height_vs_limit", "ks", ks_two_sample(disc[:, 0], cont[:, 0]), coupled_ks, **where)
                self.record("ks_drift_vs_limit", "ks", ks_two_sample(disc[:, 1], cont[:, 1]), coupled_ks, **where)
                if affine is not None:
                    self.record(
                        "ks_left_height_vs_affine", "ks", ks_two_sample(disc[:, 0], affine[:, j, slot]), self.thresholds.ks, **where
                    )
                self.keep(f"left_height_p{p}_t{t}_type{j + 1}", disc[:, 0])
                self.keep(f"limit_left_height_t{t}_type{j + 1}", cont[:, 0])


def run_leftheight_convergence(family, t_list, p, replicates, **kwargs):
    return LeftHeightConvergence(family, t_list, p, replicates, **kwargs).run()
