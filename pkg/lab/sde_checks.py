import numpy as np

from distributions import AdmissibleMechanism
from limit import brownian_driving_paths, lamperti_solve, mcbi_marginals, mcbi_mean
from utils.replicates import run_blocks
from .experiment import Experiment
from .profile_convergence import sde_block
from .statistics import ks_two_sample, relative_gap

# fine driver grids are memory heavy
LAMPERTI_BLOCK = 32


def sde_moment_block(rng, n, mechanism, dt, v):
    """Z_v with the block clamp rate appended as a last column: (n, N + 1)."""
    values, clamp = mcbi_marginals(mechanism, dt, [v], rng, n)
    return np.column_stack((values[:, 0], np.full(n, clamp)))


def lamperti_block(rng, n, mechanism, driver_dt, dv, v):
    """Z_v from Brownian drivers through the time-change system: (n, N)."""
    horizon = v * (max(mechanism.x) + max(mechanism.delta) * v) + 1.0
    driving = brownian_driving_paths(mechanism, driver_dt, horizon, rng, n)
    return lamperti_solve(mechanism, driving, dv, v).values[:, -1]


class SdeMomentCheck(Experiment):
    """Euler scheme against the exact first moment, with the clamp rate of the truncation."""

    name = "sde-moment"

    def __init__(self, mechanism: AdmissibleMechanism, v: float, replicates: int, dt: float = 1e-3, **kwargs):
        super().__init__(replicates, **kwargs)
        self.mechanism = mechanism
        self.v = v
        self.dt = dt

    @property
    def scales(self) -> list[int]:
        return []

    def collect(self):
        self.require_replicates()
        out = run_blocks(sde_moment_block, self.next_seed(), self.replicates, self.mechanism, self.dt, self.v, threads=self.threads)
        values, clamp = out[:, :-1], float(out[:, -1].mean())
        mean = mcbi_mean(self.mechanism, self.v)
        for j in range(self.mechanism.n_types):
            self.record(
                "mean_sde_gap",
                "relative_gap",
                relative_gap(float(values[:, j].mean()), float(mean[j])),
                self.thresholds.sde_mean_rel,
                at=self.v,
                component=j + 1,
            )
            self.keep(f"sde_v{self.v}_type{j + 1}", values[:, j])
        self.record("clamp_fraction", "fraction", clamp, self.thresholds.clamp_fraction, at=self.v)


class LampertiCheck(Experiment):
    """Time-change solution driven by Brownian walks against the SDE marginals."""

    name = "lamperti"

    def __init__(
        self,
        mechanism: AdmissibleMechanism,
        v: float,
        replicates: int,
        dv: float = 1e-3,
        driver_dt: float | None = None,
        dt: float = 1e-3,
        **kwargs,
    ):
        super().__init__(replicates, **kwargs)
        self.mechanism = mechanism
        self.v = v
        self.dv = dv
        self.driver_dt = driver_dt or dv / 16
        self.dt = dt

    @property
    def scales(self) -> list[int]:
        return []

    def collect(self):
        self.require_replicates()
        solved = run_blocks(lamperti_block, self.next_seed(), self.replicates, self.mechanism, self.driver_dt, self.dv, self.v, block_size=LAMPERTI_BLOCK, threads=self.threads)
        sde = run_blocks(sde_block, self.next_seed(), self.replicates, self.mechanism, self.dt, [self.v], threads=self.threads)[:, 0]
        for j in range(self.mechanism.n_types):
            self.record("ks_lamperti_vs_sde", "ks", ks_two_sample(solved[:, j], sde[:, j]), self.thresholds.ks, at=self.v, component=j + 1)
            self.keep(f"lamperti_v{self.v}_type{j + 1}", solved[:, j])


def run_sde_moment_check(mechanism, v, replicates, **kwargs):
    return SdeMomentCheck(mechanism, v, replicates, **kwargs).run()


def run_lamperti_check(mechanism, v, replicates, **kwargs):
    return LampertiCheck(mechanism, v, replicates, **kwargs).run()
