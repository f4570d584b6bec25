import numpy as np
from pydantic import BaseModel
from scipy import stats

from common import InsufficientSampleError
from forest import OffspringEnsemble, generate_forest
from utils.replicates import run_replicates
from .depth_first import depth_first_order

MIN_EXPECTED = 5.0


class IncrementLawResult(BaseModel):
    p_value: float
    statistic: float
    n: int
    bins: int
    degenerate: bool = False


def pooled_increments(rng: np.random.Generator, ensemble: OffspringEnsemble, j: int, h_max: int) -> np.ndarray:
    """
    chi^j along the depth-first order of one forest, for every type-j vertex
    below h_max. The skipped vertices are chosen from already revealed counts,
    so the kept values stay i.i.d.
    """
    forest = generate_forest(ensemble, h_max, rng)
    order = depth_first_order(forest, j).order
    order = order[forest.heights[order] < h_max]
    return forest.child_counts[order, j]


def increment_law_check(
    ensemble: OffspringEnsemble,
    j: int,
    replicates: int,
    h_max: int = 20,
    seed: int = 0,
    min_samples: int = 1000,
    threads: int | None = None,
) -> IncrementLawResult:
    """Chi-square goodness of fit of pooled D^j increments (+1) against mu^{j,j}."""
    samples = np.concatenate(run_replicates(pooled_increments, seed, replicates, ensemble, j, h_max, threads=threads))
    if samples.size < min_samples:
        raise InsufficientSampleError(f"only {samples.size} pooled increments, need {min_samples}")
    law = ensemble.law(j, j)
    if law.is_degenerate:
        atom = int(np.argmax(law.pmf(int(samples.max()) + 2)))
        passed = bool((samples == atom).all())
        return IncrementLawResult(
            p_value=1.0 if passed else 0.0, statistic=0.0, n=samples.size, bins=1, degenerate=True
        )
    observed, expected = binned_counts(samples, law.pmf(int(samples.max()) + 64))
    statistic, p_value = stats.chisquare(observed, expected)
    return IncrementLawResult(p_value=float(p_value), statistic=float(statistic), n=samples.size, bins=observed.size)


def binned_counts(samples: np.ndarray, pmf: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge cells from the right until every expected count reaches MIN_EXPECTED; last cell is a tail."""
    n = samples.size
    pmf = pmf / pmf.sum()
    expected = n * pmf
    observed = np.bincount(samples, minlength=pmf.size)[: pmf.size].astype(float)
    edges = []
    acc = 0.0
    for k in range(pmf.size):
        acc += expected[k]
        if acc >= MIN_EXPECTED:
            edges.append(k + 1)
            acc = 0.0
    if not edges:
        edges = [pmf.size]
    edges[-1] = pmf.size
    cuts = np.array([0, *edges])
    obs = np.add.reduceat(observed, cuts[:-1])
    exp = np.add.reduceat(expected, cuts[:-1])
    obs[-1] += n - observed.sum()
    return obs, exp * (n / exp.sum())
