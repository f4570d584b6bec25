import math
from typing import Literal

import polars as pl
from loguru import logger
from pydantic import BaseModel, ConfigDict
from scipy.special import gamma as gamma_fn

from common import ConfigError, LawSpecError
from forest.ensemble import OffspringEnsemble
from .generating import extinction_probability, iterate_generating_function
from .law import Law
from .mechanism import AdmissibleMechanism

A3_FLOOR = 1e-3


def critical_window_law(mean: float, variance: float) -> Law:
    """
    Law on {0, 1, K} with the given mean and variance, K the smallest integer
    >= 2 that keeps all three masses in [0, 1].
    """
    d = mean - 1.0
    if mean <= 0 or d > 0 or variance <= 0:
        raise LawSpecError(f"cannot build a (sub)critical law with mean {mean} and variance {variance}")
    second = variance + d * d + d
    if second <= 0:
        raise LawSpecError(f"variance {variance} too small for mean {mean}")
    k = max(2, math.ceil(second / (1.0 + d) + 1.0 - 1e-12))
    b = second / (k * (k - 1))
    a = b * (k - 1) - d
    probs = [0.0] * (k + 1)
    probs[0] = a
    probs[k] = b
    probs[1] = 1.0 - a - b
    if probs[1] < 0:
        probs[1] = 0.0
        probs[0] = 1.0 - b
    return Law.explicit(probs)


def brownian_family(mechanism: AdmissibleMechanism, p: int) -> OffspringEnsemble:
    if not mechanism.is_brownian:
        raise ConfigError("brownian_family needs a Brownian mechanism")
    if p < 1:
        raise ConfigError(f"scale p must be positive, got {p}")
    n = mechanism.n_types
    mu = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(critical_window_law(1.0 + mechanism.alpha[j][j] / p, 2.0 * mechanism.beta[j]))
            elif mechanism.alpha[i][j] == 0:
                row.append(Law.dirac(0))
            else:
                row.append(Law.poisson(mechanism.alpha[i][j] / p))
        mu.append(row)
    nu = [Law.poisson(d) for d in mechanism.delta]
    k = [int(round(x * p)) for x in mechanism.x]
    return OffspringEnsemble(mu=mu, nu=nu, k=k, p=p, gamma=p, convergence=True)


def stable_gamma(alpha: float, p: int) -> int:
    return max(1, math.floor(p ** (alpha - 1.0)))


def stable_tail_scale(c_psi: float, alpha: float) -> float:
    """Tail constant c of c*k^(-1-alpha) whose walk limit has psi(l) = c_psi * l^alpha."""
    return c_psi / gamma_fn(-alpha)


def stable_family(
    c: list[float],
    alpha: float,
    p: int,
    delta: list[float] | None = None,
    x: list[float] | None = None,
) -> OffspringEnsemble:
    if not 1 < alpha < 2:
        raise ConfigError(f"stable index {alpha} outside (1, 2)")
    n = len(c)
    delta = delta or [1.0] * n
    x = x or [0.0] * n
    mu = [
        [Law.stable_tail(alpha, stable_tail_scale(c[i], alpha)) if i == j else Law.dirac(0) for j in range(n)]
        for i in range(n)
    ]
    nu = [Law.poisson(d) for d in delta]
    k = [int(round(xj * p)) for xj in x]
    return OffspringEnsemble(mu=mu, nu=nu, k=k, p=p, gamma=stable_gamma(alpha, p), convergence=True)


class ScalingFamily(BaseModel):
    model_config = ConfigDict(frozen=True)

    mechanism: AdmissibleMechanism
    kind: Literal["brownian", "stable"] = "brownian"

    def gamma(self, p: int) -> int:
        if self.kind == "brownian":
            return p
        return stable_gamma(self.mechanism.stable_alpha, p)

    def ensemble(self, p: int) -> OffspringEnsemble:
        if self.kind == "brownian":
            return brownian_family(self.mechanism, p)
        m = self.mechanism
        return stable_family(m.stable_c, m.stable_alpha, p, m.delta, m.x)


def check_A3(family: ScalingFamily, delta: float, p_list: list[int], floor: float = A3_FLOOR) -> pl.DataFrame:
    """
    Table of g_[delta*gamma_p](0) per (p, type) next to the extinction
    probability the iterates converge to; a type is flagged when any value
    falls below floor.
    """
    rows = []
    for p in p_list:
        ensemble = family.ensemble(p)
        n_iter = int(delta * family.gamma(p))
        for j in range(ensemble.n_types):
            law = ensemble.law(j + 1, j + 1)
            rows.append(
                {
                    "p": p,
                    "type": j + 1,
                    "n": n_iter,
                    "value": iterate_generating_function(law, n_iter, 0.0),
                    "extinction": extinction_probability(law),
                }
            )
    table = pl.DataFrame(rows)
    flagged = table.group_by("type").agg((pl.col("value").min() < floor).alias("flagged"))
    table = table.join(flagged, on="type").sort(["type", "p"])
    for row in flagged.filter(pl.col("flagged")).iter_rows(named=True):
        logger.warning(f"Type {row['type']} fails the extinction lower bound; unsuitable for height limits")
    return table
