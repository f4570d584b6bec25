from functools import cached_property

import numpy as np
import polars as pl

from common import ForestInvariantError

NO_PARENT = -1


def _frozen(values, dtype=np.int64) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


class ColoredForest:
    """
    Truncated colored forest in canonical breadth-first labeling.

    Vertices are sorted by height; within a height, children blocks follow
    their parents' labels; within a block, nonzero colours ascend and the
    colour-0 child comes last. Parents of roots are NO_PARENT.
    """

    def __init__(
        self,
        colors,
        parents,
        heights,
        n_types: int,
        h_max: int,
        roots: tuple[int, ...] | None = None,
        validate: bool = True,
    ):
        self.colors = _frozen(colors)
        self.parents = _frozen(parents)
        self.heights = _frozen(heights)
        self.n_types = int(n_types)
        self.h_max = int(h_max)
        if roots is None:
            at_zero = self.colors[self.heights == 0]
            roots = tuple(int(x) for x in np.bincount(at_zero, minlength=self.n_types + 1))
        self.roots = tuple(roots)
        if validate:
            self.validate()

    def __len__(self) -> int:
        return self.colors.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColoredForest):
            return NotImplemented
        return (
            self.n_types == other.n_types
            and self.h_max == other.h_max
            and self.roots == other.roots
            and np.array_equal(self.colors, other.colors)
            and np.array_equal(self.parents, other.parents)
            and np.array_equal(self.heights, other.heights)
        )

    def __repr__(self):
        return f"ColoredForest(n={len(self)}, N={self.n_types}, h_max={self.h_max}, roots={self.roots})"

    @cached_property
    def level_offsets(self) -> np.ndarray:
        """Vertices of height h are labels level_offsets[h] .. level_offsets[h+1]-1."""
        return np.searchsorted(self.heights, np.arange(self.h_max + 2), side="left")

    @cached_property
    def child_counts(self) -> np.ndarray:
        """child_counts[v, c] = number of colour-c children of v."""
        counts = np.zeros((len(self), self.n_types + 1), dtype=np.int64)
        child = self.parents != NO_PARENT
        np.add.at(counts, (self.parents[child], self.colors[child]), 1)
        return counts

    @cached_property
    def parent_colors(self) -> np.ndarray:
        """Colour of each vertex's parent; roots count as children of colour 0."""
        out = np.zeros(len(self), dtype=np.int64)
        child = self.parents != NO_PARENT
        out[child] = self.colors[self.parents[child]]
        return out

    def children(self, v: int) -> np.ndarray:
        """Children of v in label order."""
        lo, hi = self._child_block(v)
        return np.arange(lo, hi)

    def _child_block(self, v: int) -> tuple[int, int]:
        first = self.roots_count
        tail = self.parents[first:]
        lo = first + int(np.searchsorted(tail, v, side="left"))
        hi = first + int(np.searchsorted(tail, v, side="right"))
        return lo, hi

    @property
    def roots_count(self) -> int:
        return int(sum(self.roots))

    def validate(self):
        n = len(self)
        colors, parents, heights = self.colors, self.parents, self.heights
        if not (colors.size == parents.size == heights.size):
            raise ForestInvariantError("colour, parent and height arrays differ in length")
        if n == 0:
            raise ForestInvariantError("forest has no colour-0 root")
        bad = np.flatnonzero((colors < 0) | (colors > self.n_types))
        if bad.size:
            raise ForestInvariantError(f"colour {colors[bad[0]]} outside 0..{self.n_types}", int(bad[0]))
        bad = np.flatnonzero(np.diff(heights) < 0)
        if bad.size:
            raise ForestInvariantError("labels break height order", int(bad[0] + 1))
        if heights[-1] > self.h_max:
            raise ForestInvariantError(f"height above h_max={self.h_max}", n - 1)

        is_root = parents == NO_PARENT
        bad = np.flatnonzero(is_root != (heights == 0))
        if bad.size:
            raise ForestInvariantError("roots must be exactly the height-0 vertices", int(bad[0]))
        child = np.flatnonzero(~is_root)
        par = parents[child]
        bad = child[(par < 0) | (par >= child)]
        if bad.size:
            raise ForestInvariantError("parent label must be smaller than the child label", int(bad[0]))
        bad = child[heights[par] + 1 != heights[child]]
        if bad.size:
            raise ForestInvariantError("height is not parent height + 1", int(bad[0]))
        bad = child[np.diff(par, prepend=par[:1]) < 0] if par.size else child[:0]
        if bad.size:
            raise ForestInvariantError("children blocks out of parent order", int(bad[0]))
        bad = child[(colors[child] == 0) & (colors[par] != 0)]
        if bad.size:
            raise ForestInvariantError("colour-0 vertex with a nonzero parent", int(bad[0]))

        # nonzero colours ascend among siblings, colour 0 last
        key = np.where(colors == 0, self.n_types + 1, colors)
        if child.size > 1:
            same_parent = par[1:] == par[:-1]
            bad = child[1:][same_parent & (key[child[1:]] < key[child[:-1]])]
            if bad.size:
                raise ForestInvariantError("siblings out of colour order", int(bad[0]))

        spine = np.bincount(heights[colors == 0], minlength=self.h_max + 1)
        bad = np.flatnonzero(spine != 1)
        if bad.size:
            h = int(bad[0])
            raise ForestInvariantError(f"height {h} has {spine[h]} colour-0 vertices, expected 1")
        census = np.bincount(colors[is_root], minlength=self.n_types + 1)
        if tuple(int(x) for x in census) != self.roots:
            raise ForestInvariantError(f"root census {tuple(census)} differs from roots {self.roots}")
        root_keys = key[is_root]
        bad = np.flatnonzero(np.diff(root_keys) < 0)
        if bad.size:
            raise ForestInvariantError("roots out of colour order", int(bad[0] + 1))


def vertex_census(forest: ColoredForest) -> np.ndarray:
    """counts[c, h] = number of colour-c vertices at height h."""
    width = forest.h_max + 1
    flat = np.bincount(forest.colors * width + forest.heights, minlength=(forest.n_types + 1) * width)
    return flat.reshape(forest.n_types + 1, width)


def census_frame(forest: ColoredForest) -> pl.DataFrame:
    counts = vertex_census(forest)
    colors, heights = np.nonzero(np.ones_like(counts))
    return pl.DataFrame({"color": colors, "height": heights, "count": counts[colors, heights]})
