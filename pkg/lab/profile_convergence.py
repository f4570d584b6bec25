import numpy as np

from distributions.families import ScalingFamily
from forest import simulate_profile
from limit import mcbi_marginals, mcbi_mean
from utils.replicates import run_blocks
from .experiment import Experiment
from .statistics import ks_two_sample, standard_errors_off


def profile_block(rng, n, ensemble, h_max):
    return simulate_profile(ensemble, h_max, rng, n)


def sde_block(rng, n, mechanism, dt, v_list):
    return mcbi_marginals(mechanism, dt, v_list, rng, n)[0]


class ProfileConvergence(Experiment):
    """(1/p) Z_p([gamma_p v]) against the SDE marginals at each v."""

    name = "profile-convergence"

    def __init__(self, family: ScalingFamily, v_list: list[float], p_list: list[int], replicates: int, dt: float = 1e-3, **kwargs):
        super().__init__(replicates, **kwargs)
        self.family = family
        self.v_list = list(v_list)
        self.p_list = sorted(p_list)
        self.dt = dt

    @property
    def scales(self) -> list[int]:
        return self.p_list

    def collect(self):
        self.require_replicates()
        mechanism = self.family.mechanism
        sde = run_blocks(sde_block, self.next_seed(), self.replicates, mechanism, self.dt, self.v_list, threads=self.threads)
        means = [mcbi_mean(mechanism, v) for v in self.v_list]
        largest = self.p_list[-1]
        for p in self.p_list:
            gamma = self.family.gamma(p)
            levels = [int(np.floor(gamma * v + 1e-9)) for v in self.v_list]
            ensemble = self.family.ensemble(p)
            z = run_blocks(profile_block, self.next_seed(), self.replicates, ensemble, max(levels), threads=self.threads)
            for slot, (v, level) in enumerate(zip(self.v_list, levels)):
                for j in range(mechanism.n_types):
                    discrete = z[:, level, j] / p
                    final = p == largest
                    self.record(
                        "ks_profile_vs_sde",
                        "ks",
                        ks_two_sample(discrete, sde[:, slot, j]),
                        self.thresholds.ks if final else None,
                        p=p,
                        at=v,
                        component=j + 1,
                    )
                    if final:
                        self.keep(f"profile_p{p}_v{v}_type{j + 1}", discrete)
                        self.record(
                            "mean_profile_se",
                            "standard_errors",
                            standard_errors_off(discrete, means[slot][j]),
                            self.thresholds.standard_errors,
                            p=p,
                            at=v,
                            component=j + 1,
                        )
        for slot, v in enumerate(self.v_list):
            for j in range(mechanism.n_types):
                self.keep(f"sde_v{v}_type{j + 1}", sde[:, slot, j])
                self.record(
                    "mean_sde_se",
                    "standard_errors",
                    standard_errors_off(sde[:, slot, j], means[slot][j]),
                    self.thresholds.standard_errors,
                    at=v,
                    component=j + 1,
                )


def run_profile_convergence(family, v_list, p_list, replicates, **kwargs):
    return ProfileConvergence(family, v_list, p_list, replicates, **kwargs).run()
