import numpy as np

from distributions.families import ScalingFamily
from limit import ray_knight_local_times
from utils.replicates import run_blocks
from .experiment import Experiment
from .profile_convergence import profile_block, sde_block
from .statistics import ks_two_sample, relative_gap


def local_time_block(rng, n, mechanism, levels, dt, dv, eps, t_cap):
    """Local times (nan when the path hit t_cap) and the SDE values they were built from: (n, N, V, 2)."""
    sample = ray_knight_local_times(rng, n, mechanism, levels, dt, dv, eps, t_cap)
    local = np.where(sample.excluded[:, :, None], np.nan, sample.local_time)
    return np.stack((local, sample.z.transpose(0, 2, 1)), axis=-1)


class RayKnightCheck(Experiment):
    """Discrete profiles, local times of the limit left heights and the SDE agree in law at each level."""

    name = "ray-knight"

    def __init__(
        self,
        family: ScalingFamily,
        v_list: list[float],
        p: int,
        replicates: int,
        dt: float = 1e-3,
        dv: float = 1e-3,
        eps: float = 0.02,
        t_cap: float = 20.0,
        **kwargs,
    ):
        super().__init__(replicates, **kwargs)
        self.family = family
        self.v_list = list(v_list)
        self.p = p
        self.dt, self.dv = dt, dv
        self.eps = eps
        self.t_cap = t_cap

    @property
    def scales(self) -> list[int]:
        return [self.p]

    def collect(self):
        self.require_replicates()
        m = self.family.mechanism
        p, gamma = self.p, self.family.gamma(self.p)
        marks = [int(np.floor(gamma * v + 1e-9)) for v in self.v_list]
        discrete = run_blocks(profile_block, self.next_seed(), self.replicates, self.family.ensemble(p), max(marks), threads=self.threads) / p
        positive = [v for v in self.v_list if v > 0]
        local = None
        if positive:
            local = run_blocks(
                local_time_block, self.next_seed(), self.replicates, m, positive, self.dt, self.dv, self.eps, self.t_cap, threads=self.threads
            )
        sde = run_blocks(sde_block, self.next_seed(), self.replicates, m, self.dt, self.v_list, threads=self.threads)
        for slot, (v, mark) in enumerate(zip(self.v_list, marks)):
            for j in range(m.n_types):
                where = {"p": p, "at": v, "component": j + 1}
                disc = discrete[:, mark, j]
                self.record("ks_profile_vs_sde", "ks", ks_two_sample(disc, sde[:, slot, j]), self.thresholds.ks_coupled, **where)
                self.keep(f"profile_v{v}_type{j + 1}", disc)
                if v == 0:
                    # L^0 of cevH^j is Z^j_0 = x_j by construction
                    continue
                lt = local[:, j, positive.index(v), 0]
                self.attempted += lt.size
                self.excluded += int(np.isnan(lt).sum())
                self.keep(f"local_time_v{v}_type{j + 1}", lt)
                self.record("ks_local_time_vs_profile", "ks", ks_two_sample(lt, disc), self.thresholds.ks_coupled, **where)
                self.record("ks_local_time_vs_sde", "ks", ks_two_sample(lt, sde[:, slot, j]), self.thresholds.ks_coupled, **where)
                self.record(
                    "mean_local_time_gap",
                    "relative_gap",
                    relative_gap(float(np.nanmean(lt)), float(np.mean(sde[:, slot, j]))),
                    self.thresholds.moment_rel,
                    **where,
                )
                self.record(
                    "mean_self_consistency_gap",
                    "relative_gap",
                    relative_gap(float(np.nanmean(lt)), float(np.nanmean(local[:, j, positive.index(v), 1]))),
                    None,
                    **where,
                )


def run_rayknight_check(family, v_list, p, replicates, **kwargs):
    return RayKnightCheck(family, v_list, p, replicates, **kwargs).run()
