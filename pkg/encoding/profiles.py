from dataclasses import dataclass

import numpy as np

from forest import ColoredForest


@dataclass(frozen=True)
class Profiles:
    """
    Height profiles. Arrays are indexed [i, j-1, h] for the parent colour
    i in 0..N and child type j in 1..N, or [j-1, h] per type.
    """

    Z_from: np.ndarray
    Z: np.ndarray
    C_from: np.ndarray
    C: np.ndarray
    I: np.ndarray


def profiles(forest: ColoredForest) -> Profiles:
    n, width = forest.n_types, forest.h_max + 1
    z_from = np.zeros((n + 1, n, width), dtype=np.int64)
    typed = forest.colors > 0
    np.add.at(
        z_from,
        (forest.parent_colors[typed], forest.colors[typed] - 1, forest.heights[typed]),
        1,
    )
    c_from = np.cumsum(z_from, axis=2)
    z = z_from.sum(axis=0)
    c = np.cumsum(z, axis=1)
    immigrants = np.empty((n, width), dtype=np.int64)
    for j in range(1, n + 1):
        others = [i for i in range(n + 1) if i != j]
        immigrants[j - 1] = c_from[others, j - 1].sum(axis=0)
    return Profiles(z_from, z, c_from, c, immigrants)


@dataclass(frozen=True)
class ChildrenWalks:
    """
    X[i-1][j-1] over type-i parents of height < h_max in breadth-first order,
    with X(0) = 0; Y[j-1][l] sums colour-j children of the first l+1 spine
    vertices.
    """

    X: list[list[np.ndarray]]
    Y: list[np.ndarray]

    def walk(self, i: int, j: int) -> np.ndarray:
        return self.X[i - 1][j - 1]

    def immigration(self, j: int) -> np.ndarray:
        return self.Y[j - 1]


def children_walks(forest: ColoredForest) -> ChildrenWalks:
    n = forest.n_types
    inside = forest.heights < forest.h_max
    counts = forest.child_counts
    walks = []
    for i in range(1, n + 1):
        parents = np.flatnonzero((forest.colors == i) & inside)
        row = []
        for j in range(1, n + 1):
            steps = counts[parents, j] - (1 if i == j else 0)
            row.append(np.concatenate(([0], np.cumsum(steps))).astype(np.int64))
        walks.append(row)
    spine = np.flatnonzero((forest.colors == 0) & inside)
    immigration = [np.cumsum(counts[spine, j]).astype(np.int64) for j in range(1, n + 1)]
    return ChildrenWalks(walks, immigration)
