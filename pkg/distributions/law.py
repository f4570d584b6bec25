from enum import Enum
import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator

from common import LawSpecError

PMF_TOLERANCE = 1e-12
STABLE_TAIL_MASS = 1e-10
STABLE_MAX_SUPPORT = 1 << 24
# Explicit laws at most this long are summed with one multinomial draw
MULTINOMIAL_SUPPORT = 64


class LawKind(str, Enum):
    DIRAC = "dirac"
    POISSON = "poisson"
    GEOMETRIC = "geometric"
    BINOMIAL = "binomial"
    STABLE_TAIL = "stable_tail"
    EXPLICIT = "explicit"


class Law(BaseModel):
    """
    Probability law on the nonnegative integers.

    geometric(q) counts failures before the first success: P(k) = q(1-q)^k.
    stable_tail(alpha, c) puts mass c*k^(-1-alpha) on k >= 2 up to the point
    where the remaining tail is below STABLE_TAIL_MASS, then fills 0 and 1 so
    that the mean is exactly one.
    """

    model_config = ConfigDict(frozen=True)

    kind: LawKind
    params: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()

    _pmf: np.ndarray | None = PrivateAttr(default=None)
    _cdf: np.ndarray | None = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check(self):
        k, p = self.kind, self.params
        arity = {
            LawKind.DIRAC: 1,
            LawKind.POISSON: 1,
            LawKind.GEOMETRIC: 1,
            LawKind.BINOMIAL: 2,
            LawKind.STABLE_TAIL: 2,
            LawKind.EXPLICIT: 0,
        }[k]
        if len(p) != arity:
            raise LawSpecError(f"expected {arity} parameters, got {len(p)}", self.spec())
        if any(not math.isfinite(x) for x in p + self.probs):
            raise LawSpecError("non-finite parameter", self.spec())
        if k == LawKind.DIRAC and (p[0] < 0 or p[0] != int(p[0])):
            raise LawSpecError("dirac atom must be a nonnegative integer", self.spec())
        if k == LawKind.POISSON and p[0] < 0:
            raise LawSpecError("negative rate", self.spec())
        if k == LawKind.GEOMETRIC and not 0 < p[0] <= 1:
            raise LawSpecError("success probability outside (0, 1]", self.spec())
        if k == LawKind.BINOMIAL and (p[0] < 0 or p[0] != int(p[0]) or not 0 <= p[1] <= 1):
            raise LawSpecError("bad binomial parameters", self.spec())
        if k == LawKind.EXPLICIT:
            probs = np.asarray(self.probs)
            if probs.size == 0 or (probs < 0).any():
                raise LawSpecError("pmf must be nonempty and nonnegative", self.spec())
            if abs(probs.sum() - 1.0) > PMF_TOLERANCE:
                raise LawSpecError(f"pmf sums to {probs.sum()!r}", self.spec())
        if k == LawKind.STABLE_TAIL:
            alpha, c = p
            if not 1 < alpha < 2 or c <= 0:
                raise LawSpecError("need alpha in (1, 2) and c > 0", self.spec())
        return self

    @classmethod
    def dirac(cls, c: int) -> "Law":
        return cls(kind=LawKind.DIRAC, params=(float(c),))

    @classmethod
    def poisson(cls, lam: float) -> "Law":
        return cls(kind=LawKind.POISSON, params=(float(lam),))

    @classmethod
    def geometric(cls, q: float) -> "Law":
        return cls(kind=LawKind.GEOMETRIC, params=(float(q),))

    @classmethod
    def binomial(cls, n: int, q: float) -> "Law":
        return cls(kind=LawKind.BINOMIAL, params=(float(n), float(q)))

    @classmethod
    def stable_tail(cls, alpha: float, c: float) -> "Law":
        law = cls(kind=LawKind.STABLE_TAIL, params=(float(alpha), float(c)))
        law.pmf()
        return law

    @classmethod
    def explicit(cls, probs) -> "Law":
        return cls(kind=LawKind.EXPLICIT, probs=tuple(float(x) for x in probs))

    def spec(self) -> str:
        if self.kind == LawKind.EXPLICIT:
            return f"explicit([{', '.join(repr(x) for x in self.probs)}])"
        args = ", ".join(_fmt(x) for x in self.params)
        return f"{self.kind.value}({args})"

    def __str__(self):
        return self.spec()

    @property
    def is_degenerate(self) -> bool:
        if self.kind == LawKind.DIRAC:
            return True
        if self.kind == LawKind.POISSON:
            return self.params[0] == 0
        if self.kind == LawKind.GEOMETRIC:
            return self.params[0] == 1
        if self.kind == LawKind.BINOMIAL:
            return self.params[0] == 0 or self.params[1] in (0.0, 1.0)
        return bool(self.pmf().max() >= 1 - PMF_TOLERANCE)

    def pmf(self, support: int | None = None) -> np.ndarray:
        """Probabilities on 0..support-1 (whole stored support for table laws)."""
        if self.kind == LawKind.EXPLICIT:
            table = np.asarray(self.probs)
        elif self.kind == LawKind.STABLE_TAIL:
            table = self._stable_pmf()
        else:
            from scipy import stats

            n = support or max(16, int(self.mean() + 12 * math.sqrt(self.variance() + 1)))
            k = np.arange(n)
            if self.kind == LawKind.DIRAC:
                table = (k == int(self.params[0])).astype(float)
            elif self.kind == LawKind.POISSON:
                table = stats.poisson.pmf(k, self.params[0])
            elif self.kind == LawKind.GEOMETRIC:
                q = self.params[0]
                table = q * (1 - q) ** k
            else:
                table = stats.binom.pmf(k, int(self.params[0]), self.params[1])
        if support is not None and support != table.size:
            out = np.zeros(support)
            out[: min(support, table.size)] = table[:support]
            return out
        return table

    def _stable_pmf(self) -> np.ndarray:
        if self._pmf is not None:
            return self._pmf
        alpha, c = self.params
        k_max = math.ceil((c / alpha / STABLE_TAIL_MASS) ** (1 / alpha)) + 1
        if k_max > STABLE_MAX_SUPPORT:
            logger.warning(
                f"{self.spec()}: truncating support at {STABLE_MAX_SUPPORT}, tail mass above target"
            )
            k_max = STABLE_MAX_SUPPORT
        k = np.arange(2, k_max + 1, dtype=float)
        tail = c * k ** (-1.0 - alpha)
        mean_tail = float(np.dot(k, tail))
        mass_tail = float(tail.sum())
        if mean_tail > 1:
            raise LawSpecError(f"tail mean {mean_tail:.4f} exceeds one", self.spec())
        pmf = np.empty(k_max + 1)
        pmf[0] = mean_tail - mass_tail
        pmf[1] = 1.0 - mean_tail
        pmf[2:] = tail
        self._pmf = pmf
        return pmf

    def _table_cdf(self) -> np.ndarray:
        if self._cdf is None:
            cdf = np.cumsum(self.pmf())
            cdf[-1] = 1.0
            self._cdf = cdf
        return self._cdf

    def mean(self) -> float:
        k, p = self.kind, self.params
        if k == LawKind.DIRAC or k == LawKind.POISSON:
            return p[0]
        if k == LawKind.GEOMETRIC:
            return (1 - p[0]) / p[0]
        if k == LawKind.BINOMIAL:
            return p[0] * p[1]
        pmf = self.pmf()
        return float(np.dot(np.arange(pmf.size), pmf))

    def variance(self) -> float:
        k, p = self.kind, self.params
        if k == LawKind.DIRAC:
            return 0.0
        if k == LawKind.POISSON:
            return p[0]
        if k == LawKind.GEOMETRIC:
            return (1 - p[0]) / p[0] ** 2
        if k == LawKind.BINOMIAL:
            return p[0] * p[1] * (1 - p[1])
        pmf = self.pmf()
        support = np.arange(pmf.size, dtype=float)
        m = float(np.dot(support, pmf))
        return float(np.dot((support - m) ** 2, pmf))

    def generating_function(self, s):
        s = np.asarray(s, dtype=float)
        k, p = self.kind, self.params
        if k == LawKind.DIRAC:
            return s ** int(p[0])
        if k == LawKind.POISSON:
            return np.exp(p[0] * (s - 1))
        if k == LawKind.GEOMETRIC:
            return p[0] / (1 - (1 - p[0]) * s)
        if k == LawKind.BINOMIAL:
            return (1 - p[1] + p[1] * s) ** int(p[0])
        return np.polynomial.polynomial.polyval(s, self.pmf())

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        k, p = self.kind, self.params
        if k == LawKind.DIRAC:
            return np.full(size, int(p[0]), dtype=np.int64)
        if k == LawKind.POISSON:
            return rng.poisson(p[0], size)
        if k == LawKind.GEOMETRIC:
            return rng.geometric(p[0], size) - 1
        if k == LawKind.BINOMIAL:
            return rng.binomial(int(p[0]), p[1], size)
        return np.searchsorted(self._table_cdf(), rng.random(size), side="right").astype(np.int64)

    def sample_sum(self, rng: np.random.Generator, counts: np.ndarray) -> np.ndarray:
        """Entry r is a sum of counts[r] independent draws."""
        counts = np.asarray(counts, dtype=np.int64)
        k, p = self.kind, self.params
        if k == LawKind.DIRAC:
            return counts * int(p[0])
        if k == LawKind.POISSON:
            return rng.poisson(p[0] * counts)
        if k == LawKind.BINOMIAL:
            return rng.binomial(int(p[0]) * counts, p[1])
        if k == LawKind.GEOMETRIC:
            out = np.zeros(counts.shape, dtype=np.int64)
            positive = counts > 0
            if p[0] == 1:
                return out
            out[positive] = rng.negative_binomial(counts[positive], p[0])
            return out
        pmf = self.pmf()
        if pmf.size <= MULTINOMIAL_SUPPORT:
            return rng.multinomial(counts, pmf) @ np.arange(pmf.size)
        draws = self.sample(rng, int(counts.sum()))
        owner = np.repeat(np.arange(counts.size), counts.ravel())
        sums = np.bincount(owner, weights=draws, minlength=counts.size)
        return sums.astype(np.int64).reshape(counts.shape)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)
