from dataclasses import dataclass

import numpy as np

from forest import ColoredForest, component_roots


@dataclass(frozen=True)
class DepthFirstOrder:
    """
    Type-j vertices in depth-first order: components by breadth-first order of
    their j-roots, depth-first (least child first) inside each component.
    """

    j: int
    order: np.ndarray
    roots: np.ndarray
    starts: np.ndarray
    sizes: np.ndarray
    complete: np.ndarray
    explored: int

    def __len__(self):
        return self.order.size

    @property
    def ends(self) -> np.ndarray:
        return self.starts + self.sizes

    def component_of(self, positions) -> np.ndarray:
        return np.searchsorted(self.starts, positions, side="right") - 1


def check_type(forest: ColoredForest, j: int):
    if not 1 <= j <= forest.n_types:
        raise ValueError(f"type {j} outside 1..{forest.n_types}")


def depth_first_order(forest: ColoredForest, j: int) -> DepthFirstOrder:
    check_type(forest, j)
    n = len(forest)
    labels = np.arange(n)
    root_of = component_roots(forest, j)
    is_j = forest.colors == j
    is_root = root_of == labels
    inner = is_j & ~is_root
    offsets = forest.level_offsets
    parents = forest.parents

    size = is_j.astype(np.int64)
    for h in range(forest.h_max, 0, -1):
        lo, hi = offsets[h], offsets[h + 1]
        level = labels[lo:hi][inner[lo:hi]]
        np.add.at(size, parents[level], size[level])

    roots = np.flatnonzero(is_root)
    sizes = size[roots]
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64) if roots.size else sizes
    pos = np.full(n, -1, dtype=np.int64)
    pos[roots] = starts
    for h in range(1, forest.h_max + 1):
        lo, hi = offsets[h], offsets[h + 1]
        level = labels[lo:hi][inner[lo:hi]]
        if level.size == 0:
            continue
        s = size[level]
        before = np.cumsum(s) - s
        par = parents[level]
        first = np.concatenate(([True], par[1:] != par[:-1]))
        group = np.cumsum(first) - 1
        within = before - before[first][group]
        pos[level] = pos[par] + 1 + within

    order = np.empty(int(is_j.sum()), dtype=np.int64)
    members = np.flatnonzero(is_j)
    order[pos[members]] = members

    at_boundary = np.zeros(n, dtype=bool)
    at_boundary[members] = forest.heights[members] == forest.h_max
    cut = np.zeros(roots.size, dtype=bool)
    if roots.size:
        slot = np.searchsorted(roots, root_of[members])
        np.logical_or.at(cut, slot, at_boundary[members])
    complete = ~cut
    incomplete = np.flatnonzero(cut)
    explored = int(starts[incomplete[0]]) if incomplete.size else order.size
    return DepthFirstOrder(j, order, roots, starts, sizes, complete, explored)
