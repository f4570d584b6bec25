import numpy as np
from loguru import logger
from pydantic import BaseModel

from common import IdentityViolation
from forest import ColoredForest, component_roots, vertex_census
from .bundle import EncodingBundle, encode_forest
from .left_height import left_height

MAX_RECORDED = 100


class Violation(BaseModel):
    identity: str
    i: int | None = None
    j: int | None = None
    h: int | None = None
    index: int | None = None
    expected: int | None = None
    actual: int | None = None


class IdentityReport(BaseModel):
    checks: dict[str, int] = {}
    violations: list[Violation] = []
    domain_violations: list[Violation] = []
    violation_counts: dict[str, int] = {}

    @property
    def ok(self) -> bool:
        return not self.violation_counts

    @property
    def first_violation(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def merge(self, other: "IdentityReport") -> "IdentityReport":
        checks = dict(self.checks)
        for name, count in other.checks.items():
            checks[name] = checks.get(name, 0) + count
        counts = dict(self.violation_counts)
        for name, count in other.violation_counts.items():
            counts[name] = counts.get(name, 0) + count
        return IdentityReport(
            checks=checks,
            violations=(self.violations + other.violations)[:MAX_RECORDED],
            domain_violations=(self.domain_violations + other.domain_violations)[:MAX_RECORDED],
            violation_counts=counts,
        )

    def raise_first(self):
        v = self.first_violation
        if v is not None:
            raise IdentityViolation(v.identity, v.i, v.j, v.h, v.index)

class _Recorder:
    def __init__(self):
        self.report = IdentityReport()

    def _count(self, identity: str, checked: int):
        self.report.checks[identity] = self.report.checks.get(identity, 0) + checked

    def _violate(self, identity: str, count: int, violation: Violation):
        counts = self.report.violation_counts
        counts[identity] = counts.get(identity, 0) + count
        if len(self.report.violations) < MAX_RECORDED:
            self.report.violations.append(violation)

    def compare(self, identity: str, expected, actual, along: str = "index", start: int = 0, **where):
        expected = np.asarray(expected).ravel()
        actual = np.asarray(actual).ravel()
        self._count(identity, expected.size)
        bad = np.flatnonzero(expected != actual)
        if bad.size:
            k = int(bad[0])
            where[along] = start + k
            self._violate(
                identity,
                int(bad.size),
                Violation(identity=identity, expected=int(expected[k]), actual=int(actual[k]), **where),
            )

    def flag(self, identity: str, holds: bool, **where):
        self._count(identity, 1)
        if not holds:
            self._violate(identity, 1, Violation(identity=identity, **where))

    def domain(self, identity: str, **where):
        self.report.violation_counts["domain"] = self.report.violation_counts.get("domain", 0) + 1
        if len(self.report.domain_violations) < MAX_RECORDED:
            self.report.domain_violations.append(Violation(identity=identity, **where))


def _read(walk: np.ndarray, at: np.ndarray, rec: _Recorder, identity: str, **where) -> np.ndarray | None:
    if at.size and at.max() >= walk.size:
        rec.domain(identity, index=int(at.max()), **where)
        return None
    return walk[at]


def verify_discrete_timechange(bundle: EncodingBundle, rec: _Recorder | None = None) -> IdentityReport:
    """
    Z^j(h+1) = k_j + sum_i X^{i,j}(C^i(h)) + Y^j(h) for h < h_max, and
    C^{i->j}(h) = X^{i,j}(C^i(h-1)) (+ C^j(h-1) when i = j),
    C^{0->j}(h) = k_j + Y^j(h-1) for h <= h_max, with C(-1) = Y(-1) = 0.
    """
    rec = rec or _Recorder()
    n, h_max = bundle.n_types, bundle.h_max
    prof, walks = bundle.profiles, bundle.walks
    prev_c = np.concatenate((np.zeros((n, 1), dtype=np.int64), prof.C[:, :h_max]), axis=1)
    for j in range(1, n + 1):
        k_j = bundle.k[j - 1]
        y = walks.immigration(j)
        if h_max > 0:
            rhs = k_j + y
            for i in range(1, n + 1):
                read = _read(walks.walk(i, j), prof.C[i - 1, :h_max], rec, "dtc", i=i, j=j)
                if read is None:
                    break
                rhs = rhs + read
            else:
                rec.compare("dtc", prof.Z[j - 1, 1:], rhs, along="h", start=1, j=j)
        spine_fed = k_j + np.concatenate(([0], y))
        rec.compare("discCtc", prof.C_from[0, j - 1], spine_fed, along="h", i=0, j=j)
        for i in range(1, n + 1):
            read = _read(walks.walk(i, j), prev_c[i - 1], rec, "discCtc", i=i, j=j)
            if read is None:
                continue
            expected = read + (prev_c[j - 1] if i == j else 0)
            rec.compare("discCtc", prof.C_from[i, j - 1], expected, along="h", i=i, j=j)
    return rec.report


def verify_identities(forest: ColoredForest, bundle: EncodingBundle | None = None) -> IdentityReport:
    """Every exact identity between the forest and its encodings."""
    bundle = bundle or encode_forest(forest)
    rec = _Recorder()
    prof = bundle.profiles
    rec.compare("partition", vertex_census(forest)[1:], prof.Z_from.sum(axis=0))
    for j in range(1, forest.n_types + 1):
        order = bundle.orders[j]
        explored = order.explored
        prefix = order.order[:explored]
        root_of = component_roots(forest, j)
        depth = forest.heights[prefix] - forest.heights[root_of[prefix]]
        rec.compare("hd", depth, bundle.height[j], j=j)

        left = left_height(bundle, j)
        inside = np.flatnonzero(left.in_horizon)
        rec.compare("cevH", forest.heights[prefix[inside]], left.values[inside], j=j)

        root_heights = forest.heights[order.roots]
        census_roots = np.cumsum(np.bincount(root_heights, minlength=forest.h_max + 1))
        rec.compare("iDef", census_roots, prof.I[j - 1], along="h", j=j)

        finished = np.searchsorted(order.ends, np.arange(explored), side="right")
        rec.compare("components", finished, -bundle.running_min[j][:explored], j=j)

        d = bundle.lukasiewicz[j]
        for c in np.flatnonzero(order.ends <= explored):
            s, size = int(order.starts[c]), int(order.sizes[c])
            excursion = d[s : s + size + 1] - d[s]
            holds = bool((excursion[:size] >= 0).all() and excursion[size] == -1)
            rec.flag("excursion", holds, j=j, index=s)
    verify_discrete_timechange(bundle, rec)
    report = rec.report
    if not report.ok:
        logger.warning(f"Identity violations: {report.violation_counts}")
    return report
