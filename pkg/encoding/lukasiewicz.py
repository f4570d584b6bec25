import numpy as np

from forest import ColoredForest
from .depth_first import DepthFirstOrder, depth_first_order


def lukasiewicz_path(forest: ColoredForest, j: int, order: DepthFirstOrder | None = None) -> np.ndarray:
    """D^j over the explored prefix; D[0] = 0 and D[k+1] - D[k] = chi^j(w_k) - 1."""
    if order is None:
        order = depth_first_order(forest, j)
    prefix = order.order[: order.explored]
    steps = forest.child_counts[prefix, j] - 1
    return np.concatenate(([0], np.cumsum(steps))).astype(np.int64)


def running_minimum(path: np.ndarray) -> np.ndarray:
    return np.minimum.accumulate(path)


def height_from_lukasiewicz(path: np.ndarray) -> np.ndarray:
    """
    H[k] = #{l < k : D[l] = min D[l..k]} for k < len(path) - 1.

    The stack holds exactly the indices l whose value is still the minimum
    of D[l..k]; a new component pushes D to a fresh minimum and empties it.
    """
    path = np.asarray(path)
    n = path.size - 1
    heights = np.empty(max(n, 0), dtype=np.int64)
    stack: list[int] = []
    values = path.tolist()
    for k in range(n):
        d = values[k]
        while stack and values[stack[-1]] > d:
            stack.pop()
        heights[k] = len(stack)
        stack.append(k)
    return heights
