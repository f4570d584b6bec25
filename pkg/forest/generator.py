from typing import Callable

import numpy as np
from loguru import logger

from common import ResourceLimitError
from utils.replicates import as_generator
from utils.utils import env_int
from .colored_forest import ColoredForest, NO_PARENT
from .ensemble import OffspringEnsemble

DEFAULT_VERTEX_BUDGET = 10_000_000


def vertex_budget() -> int:
    return env_int("GWI_VERTEX_BUDGET", DEFAULT_VERTEX_BUDGET)


def generate_forest(
    ensemble: OffspringEnsemble,
    h_max: int,
    seed=None,
    budget: int | None = None,
) -> ColoredForest:
    """
    Grow a GWI forest level by level up to height h_max.

    Stream order: for each height h < h_max, parent colours i = 0..N, child
    colours j = 1..N, one vectorized draw covering every colour-i vertex at
    height h in label order.
    """
    if h_max < 0:
        raise ValueError(f"h_max must be nonnegative, got {h_max}")
    budget = budget or vertex_budget()
    n = ensemble.n_types
    rng = as_generator(seed)
    if sum(ensemble.k) + h_max + 1 > budget:
        raise ResourceLimitError(f"h_max={h_max} with roots {ensemble.roots} exceeds the vertex budget {budget}")

    layout = np.array([*range(1, n + 1), 0], dtype=np.int64)
    level_colors = np.repeat(layout, [*ensemble.k, 1])
    colors = [level_colors]
    parents = [np.full(level_colors.size, NO_PARENT, dtype=np.int64)]
    heights = [np.zeros(level_colors.size, dtype=np.int64)]
    total = level_colors.size
    for h in range(h_max):
        size = level_colors.size
        counts = np.zeros((size, n + 1), dtype=np.int64)
        for i in range(n + 1):
            members = np.flatnonzero(level_colors == i)
            if members.size == 0:
                continue
            for j in range(1, n + 1):
                counts[members, j - 1] = ensemble.law(i, j).sample(rng, members.size)
        counts[level_colors == 0, n] = 1
        flat = counts.ravel()
        level_labels = np.arange(total - size, total, dtype=np.int64)
        next_colors = np.repeat(np.tile(layout, size), flat)
        next_parents = np.repeat(np.repeat(level_labels, n + 1), flat)
        total += next_colors.size
        if total > budget:
            raise ResourceLimitError(f"forest passed the vertex budget {budget} at height {h + 1}")
        colors.append(next_colors)
        parents.append(next_parents)
        heights.append(np.full(next_colors.size, h + 1, dtype=np.int64))
        level_colors = next_colors
    logger.debug(f"Generated forest with {total} vertices up to height {h_max}")
    return ColoredForest(
        np.concatenate(colors),
        np.concatenate(parents),
        np.concatenate(heights),
        n_types=n,
        h_max=h_max,
        roots=ensemble.roots,
    )


def grow_forest(
    ensemble: OffspringEnsemble,
    h_start: int,
    seed: int | np.random.SeedSequence,
    enough: Callable[[ColoredForest], bool],
    budget: int | None = None,
) -> ColoredForest:
    """
    Regenerate from the same seed with h_max doubled until enough(forest)
    holds. Levels are drawn in order, so a taller forest extends the shorter
    one vertex for vertex. Stops early once nothing can grow any more;
    ResourceLimitError when the vertex budget is passed.
    """
    if isinstance(seed, np.random.Generator):
        raise TypeError("grow_forest needs a seed it can replay, not a Generator")
    static = all(ensemble.law(0, j).mean() == 0 for j in range(1, ensemble.n_types + 1))
    h_max = max(1, h_start)
    while True:
        forest = generate_forest(ensemble, h_max, np.random.default_rng(seed), budget)
        if enough(forest):
            return forest
        top = forest.colors[forest.level_offsets[h_max] :]
        if static and not (top > 0).any():
            return forest
        logger.debug(f"Growing forest past h_max={h_max}")
        h_max *= 2


def simulate_profile(
    ensemble: OffspringEnsemble,
    h_max: int,
    seed=None,
    replicates: int = 1,
) -> np.ndarray:
    """
    Height profiles Z[r, h, j-1] of `replicates` independent forests, sampled
    as a multitype Galton-Watson chain with immigration without labeling
    vertices.
    """
    if h_max < 0:
        raise ValueError(f"h_max must be nonnegative, got {h_max}")
    rng = as_generator(seed)
    n = ensemble.n_types
    z = np.zeros((replicates, h_max + 1, n), dtype=np.int64)
    z[:, 0, :] = ensemble.k
    for h in range(h_max):
        for j in range(1, n + 1):
            nxt = ensemble.law(0, j).sample(rng, replicates)
            for i in range(1, n + 1):
                nxt = nxt + ensemble.law(i, j).sample_sum(rng, z[:, h, i - 1])
            z[:, h + 1, j - 1] = nxt
    return z


def component_sizes(forest: ColoredForest, j: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Sizes of the type-j monochromatic components in breadth-first order of
    their roots, with a flag telling whether the component is complete (no
    vertex at height h_max).
    """
    if not 1 <= j <= forest.n_types:
        raise ValueError(f"type {j} outside 1..{forest.n_types}")
    root_of = component_roots(forest, j)
    members = np.flatnonzero(forest.colors == j)
    roots = np.flatnonzero(root_of == np.arange(len(forest)))
    slot = np.searchsorted(roots, root_of[members])
    sizes = np.bincount(slot, minlength=roots.size)
    cut = np.bincount(slot, weights=forest.heights[members] == forest.h_max, minlength=roots.size)
    return sizes, cut == 0


def component_roots(forest: ColoredForest, j: int) -> np.ndarray:
    """root_of[v] for type-j vertices (the j-root of v's component), -1 elsewhere."""
    root_of = np.full(len(forest), NO_PARENT, dtype=np.int64)
    is_j = forest.colors == j
    starts = is_j & (forest.parent_colors != j)
    offsets = forest.level_offsets
    for h in range(forest.h_max + 1):
        lo, hi = offsets[h], offsets[h + 1]
        level = np.arange(lo, hi)
        new = level[starts[lo:hi]]
        root_of[new] = new
        inherit = level[is_j[lo:hi] & ~starts[lo:hi]]
        root_of[inherit] = root_of[forest.parents[inherit]]
    return root_of
