import numpy as np
from loguru import logger
from scipy.stats import norm

from common import ResourceLimitError
from distributions.families import ScalingFamily
from encoding import depth_first_order, height_from_lukasiewicz, lukasiewicz_path, running_minimum
from forest import grow_forest
from limit import reflection_min_cdf, running_low
from utils.replicates import run_blocks, run_replicates
from .experiment import Experiment
from .rescale import rescale, rescaled_index
from .statistics import ks_against_cdf, ks_two_sample, relative_gap


def walk_replicate(rng, ensemble, j, h_start, p, gamma, times):
    """
    Rescaled D, running min and H at the given times: shape (3, T). The
    forest grows until every index is explored; a forest that passes the
    vertex budget gives nan rows and counts as excluded.
    """
    need = rescaled_index("lukasiewicz", p, gamma, max(times))
    orders = {}

    def explored(forest):
        orders[forest.h_max] = depth_first_order(forest, j)
        return orders[forest.h_max].explored > need

    try:
        forest = grow_forest(ensemble, h_start, int(rng.integers(2**63)), explored)
    except ResourceLimitError as err:
        logger.warning(f"Replicate excluded: {err}")
        return np.full((3, len(times)), np.nan)
    d = lukasiewicz_path(forest, j, orders[forest.h_max])
    paths = {"lukasiewicz": d, "running_min": running_minimum(d), "height": height_from_lukasiewicz(d)}
    return np.stack([rescale(source, path, p, gamma, times).values for source, path in paths.items()])


def brownian_block(rng, n, beta, drift, dt, t_list):
    """H and ell of n independent Brownian heights at the times in t_list: shape (n, 2, T)."""
    steps = int(np.floor(max(t_list) / dt + 1e-9))
    inc = np.sqrt(2.0 * beta * dt) * rng.standard_normal((n, steps)) + drift * dt
    x = np.concatenate((np.zeros((n, 1)), np.cumsum(inc, axis=1)), axis=1)
    low = running_low(x, 2.0 * beta * dt, rng)
    marks = [int(np.floor(t / dt + 1e-9)) for t in t_list]
    return np.stack(((x[:, marks] - low[:, marks]) / beta, -low[:, marks]), axis=1)


class HeightConvergence(Experiment):
    """Rescaled D^j, its running minimum and H^j against their Brownian limits."""

    name = "height-convergence"

    def __init__(
        self,
        family: ScalingFamily,
        t_list: list[float],
        p_list: list[int],
        replicates: int,
        j: int = 1,
        dt: float = 1e-3,
        h_factor: float = 3.0,
        **kwargs,
    ):
        super().__init__(replicates, **kwargs)
        self.family = family
        self.t_list = list(t_list)
        self.p_list = sorted(p_list)
        self.j = j
        self.dt = dt
        self.h_factor = h_factor

    @property
    def scales(self) -> list[int]:
        return self.p_list

    def collect(self):
        self.require_replicates()
        m = self.family.mechanism
        beta, drift = m.beta[self.j - 1], m.alpha[self.j - 1][self.j - 1]
        sigma = np.sqrt(2.0 * beta)
        positive = [t for t in self.t_list if t > 0]
        limit = None
        if positive:
            limit = run_blocks(brownian_block, self.next_seed(), self.replicates, beta, drift, self.dt, positive, threads=self.threads)
        largest = self.p_list[-1]
        for p in self.p_list:
            gamma = self.family.gamma(p)
            h_start = int(np.ceil(self.h_factor * gamma))
            rows = run_replicates(
                walk_replicate,
                self.next_seed(),
                self.replicates,
                self.family.ensemble(p),
                self.j,
                h_start,
                p,
                gamma,
                self.t_list,
                threads=self.threads,
            )
            walks = np.stack(rows)
            final = p == largest
            for slot, t in enumerate(self.t_list):
                d, low, h = walks[:, 0, slot], -walks[:, 1, slot], walks[:, 2, slot]
                self.attempted += d.size
                self.excluded += int(np.isnan(d).sum())
                if t == 0:
                    self.record("zero_at_origin", "exact", float(np.nanmax(np.abs(walks[:, :, slot]))), 0.0, p=p, at=t)
                    continue
                ks = self.thresholds.ks if final else None
                cont = limit[:, :, positive.index(t)]
                self.record(
                    "ks_lukasiewicz_vs_normal",
                    "ks",
                    ks_against_cdf(d, norm(loc=drift * t, scale=sigma * np.sqrt(t)).cdf),
                    ks,
                    p=p,
                    at=t,
                )
                self.record(
                    "ks_running_min_vs_reflection",
                    "ks",
                    ks_against_cdf(low, lambda y, t=t: reflection_min_cdf(y, t, sigma, drift)),
                    ks,
                    p=p,
                    at=t,
                )
                self.record("ks_height_vs_brownian", "ks", ks_two_sample(h, cont[:, 0]), ks, p=p, at=t)
                if final:
                    self.record(
                        "mean_height_gap",
                        "relative_gap",
                        relative_gap(float(np.nanmean(h)), float(np.mean(cont[:, 0]))),
                        self.thresholds.moment_rel,
                        p=p,
                        at=t,
                    )
                    self.keep(f"lukasiewicz_p{p}_t{t}", d)
                    self.keep(f"height_p{p}_t{t}", h)
                    self.keep(f"brownian_height_t{t}", cont[:, 0])


def run_height_convergence(family, t_list, p_list, replicates, **kwargs):
    return HeightConvergence(family, t_list, p_list, replicates, **kwargs).run()
