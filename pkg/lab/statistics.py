import math

import numpy as np
from scipy import stats


def ks_two_sample(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    a, b = a[np.isfinite(a)], b[np.isfinite(b)]
    if a.size == 0 or b.size == 0:
        return float("nan")
    if np.ptp(a) == 0 and np.ptp(b) == 0:
        return 0.0 if a[0] == b[0] else 1.0
    return float(stats.ks_2samp(a, b).statistic)


def ks_against_cdf(sample, cdf) -> float:
    sample = np.asarray(sample, dtype=float)
    sample = sample[np.isfinite(sample)]
    return float(stats.kstest(sample, cdf).statistic)


def standard_error(sample) -> float:
    sample = np.asarray(sample, dtype=float)
    sample = sample[np.isfinite(sample)]
    return float(sample.std(ddof=1) / math.sqrt(sample.size)) if sample.size > 1 else float("inf")


def relative_gap(value: float, target: float) -> float:
    if target == 0:
        return abs(value)
    return abs(value - target) / abs(target)


def standard_errors_off(sample, target: float) -> float:
    """|mean - target| in units of the sample's standard error."""
    se = standard_error(sample)
    gap = abs(float(np.nanmean(sample)) - target)
    if se == 0:
        return 0.0 if gap == 0 else float("inf")
    return gap / se


def hill_estimator(sample, k: int) -> float:
    """Tail index from the k largest order statistics."""
    ordered = np.sort(np.asarray(sample, dtype=float))[::-1]
    top = ordered[: k + 1]
    if top[k] <= 0:
        raise ValueError("Hill estimator needs positive order statistics")
    return float(1.0 / np.mean(np.log(top[:k] / top[k])))
