from dataclasses import dataclass

import numpy as np

from forest import ColoredForest
from .depth_first import DepthFirstOrder, depth_first_order
from .lukasiewicz import height_from_lukasiewicz, lukasiewicz_path, running_minimum
from .profiles import ChildrenWalks, Profiles, children_walks, profiles


@dataclass(frozen=True)
class EncodingBundle:
    """Every discrete path of one forest. Per-type maps are keyed by type 1..N."""

    n_types: int
    h_max: int
    k: tuple[int, ...]
    orders: dict[int, DepthFirstOrder]
    lukasiewicz: dict[int, np.ndarray]
    running_min: dict[int, np.ndarray]
    height: dict[int, np.ndarray]
    profiles: Profiles
    walks: ChildrenWalks

    def horizon(self, j: int) -> int:
        """Number of type-j vertices explored before truncation."""
        return self.orders[j].explored


def encode_forest(forest: ColoredForest) -> EncodingBundle:
    orders, paths, mins, heights = {}, {}, {}, {}
    for j in range(1, forest.n_types + 1):
        order = depth_first_order(forest, j)
        d = lukasiewicz_path(forest, j, order)
        orders[j] = order
        paths[j] = d
        mins[j] = running_minimum(d)
        heights[j] = height_from_lukasiewicz(d)
    return EncodingBundle(
        n_types=forest.n_types,
        h_max=forest.h_max,
        k=tuple(forest.roots[1:]),
        orders=orders,
        lukasiewicz=paths,
        running_min=mins,
        height=heights,
        profiles=profiles(forest),
        walks=children_walks(forest),
    )
