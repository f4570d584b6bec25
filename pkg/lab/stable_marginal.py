import numpy as np

from distributions.families import ScalingFamily
from utils.replicates import run_blocks
from .experiment import Experiment
from .stable import stable_cdf
from .statistics import ks_against_cdf


def stable_walk_block(rng, n, law, steps, p):
    """(1/p) (xi_1 + ... + xi_steps - steps) for n independent walks."""
    sums = law.sample_sum(rng, np.full(n, steps, dtype=np.int64))
    return (sums - steps) / p


class StableMarginalCheck(Experiment):
    """Rescaled heavy-tailed walk at time t against the spectrally positive stable law."""

    name = "stable-marginal"

    def __init__(self, family: ScalingFamily, p_list: list[int], replicates: int, t: float = 1.0, j: int = 1, **kwargs):
        super().__init__(replicates, **kwargs)
        self.family = family
        self.p_list = sorted(p_list)
        self.t = t
        self.j = j

    @property
    def scales(self) -> list[int]:
        return self.p_list

    def collect(self):
        self.require_replicates()
        m = self.family.mechanism
        alpha, c = m.stable_alpha, m.stable_c[self.j - 1]
        largest = self.p_list[-1]
        for p in self.p_list:
            gamma = self.family.gamma(p)
            steps = int(np.floor(p * gamma * self.t + 1e-9))
            law = self.family.ensemble(p).law(self.j, self.j)
            walk = run_blocks(stable_walk_block, self.next_seed(), self.replicates, law, steps, p, threads=self.threads)
            # gamma_p is rounded, so the walk sits at time steps / p^alpha of the limit
            effective = steps / p**alpha
            where = {"p": p, "at": self.t, "component": self.j}
            self.record(
                "ks_walk_vs_stable",
                "ks",
                ks_against_cdf(walk, stable_cdf(c, alpha, effective)),
                self.thresholds.ks if p == largest else None,
                **where,
            )
            self.record("median_walk", "median", float(np.median(walk)), None, **where)
            if p == largest:
                self.keep(f"stable_walk_p{p}", walk)


def run_stable_marginal_check(family, p_list, replicates, **kwargs):
    return StableMarginalCheck(family, p_list, replicates, **kwargs).run()
