import numpy as np
import pytest

from distributions import AdmissibleMechanism, Law
from forest import ColoredForest, OffspringEnsemble, generate_forest


def literal_height(path) -> np.ndarray:
    """H[k] = #{l < k : D[l] = min D[l..k]}, evaluated term by term."""
    path = np.asarray(path)
    out = []
    for k in range(path.size - 1):
        # suffix[l] = min D[l..k]
        suffix = np.minimum.accumulate(path[k::-1])[::-1]
        out.append(int(np.sum(path[:k] == suffix[:k])))
    return np.array(out, dtype=np.int64)


def recursive_depth_first(forest: ColoredForest, j: int) -> list[int]:
    """Type-j vertices by walking each monochromatic component recursively."""
    out = []

    def visit(v):
        out.append(v)
        for child in forest.children(v):
            if forest.colors[child] == j:
                visit(int(child))

    for v in range(len(forest)):
        parent = forest.parents[v]
        if forest.colors[v] == j and (parent < 0 or forest.colors[parent] != j):
            visit(v)
    return out


def random_forests(count: int, h_max: int = 8, seed: int = 0):
    """Generated forests over the mixed ensembles below."""
    rng = np.random.default_rng(seed)
    makers = [one_type_ensemble, two_type_ensemble, three_type_ensemble]
    for k in range(count):
        ensemble = makers[k % len(makers)]()
        yield generate_forest(ensemble, int(rng.integers(0, h_max + 1)), rng)


def one_type_ensemble() -> OffspringEnsemble:
    return OffspringEnsemble(mu=[["geometric(0.55)"]], nu=["poisson(1)"], k=[2])


def two_type_ensemble() -> OffspringEnsemble:
    return OffspringEnsemble(
        mu=[["binomial(2, 0.4)", "poisson(0.2)"], ["dirac(0)", "explicit([0.5, 0.2, 0.3])"]],
        nu=["poisson(0.7)", "geometric(0.6)"],
        k=[1, 0],
    )


def three_type_ensemble() -> OffspringEnsemble:
    return OffspringEnsemble(
        mu=[
            ["poisson(0.6)", "poisson(0.2)", "dirac(0)"],
            ["dirac(0)", "geometric(0.7)", "poisson(0.1)"],
            ["poisson(0.1)", "dirac(0)", "binomial(3, 0.2)"],
        ],
        nu=["poisson(0.5)", "poisson(0.5)", "dirac(1)"],
        k=[1, 1, 0],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def hand_forest() -> ColoredForest:
    """
    One type, h_max = 3. Components {0, 2, 6, 3}, {4, 7} and {8}, rooted at
    heights 0, 1 and 2; the spine is 1, 5, 9, 10.
    """
    return ColoredForest(
        colors=[1, 0, 1, 1, 1, 0, 1, 1, 1, 0, 0],
        parents=[-1, -1, 0, 0, 1, 1, 2, 4, 5, 5, 9],
        heights=[0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3],
        n_types=1,
        h_max=3,
    )


@pytest.fixture
def point_ensemble() -> OffspringEnsemble:
    """Nobody has children besides the spine."""
    return OffspringEnsemble(mu=[[Law.dirac(0)]], nu=[Law.dirac(0)], k=[1])


@pytest.fixture
def brownian_mechanism() -> AdmissibleMechanism:
    return AdmissibleMechanism(beta=[0.5], alpha=[[0.0]], delta=[1.0], x=[0.0])


@pytest.fixture
def damped_mechanism() -> AdmissibleMechanism:
    return AdmissibleMechanism(beta=[0.5], alpha=[[-1.0]], delta=[1.0], x=[0.5])


@pytest.fixture
def coupled_mechanism() -> AdmissibleMechanism:
    return AdmissibleMechanism(beta=[0.5, 0.5], alpha=[[0.0, 0.5], [0.5, 0.0]], delta=[1.0, 1.0], x=[0.0, 0.0])


@pytest.fixture
def decoupled_mechanism() -> AdmissibleMechanism:
    return AdmissibleMechanism(beta=[0.5, 0.5], alpha=[[0.0, 0.0], [0.0, 0.0]], delta=[1.0, 2.0], x=[0.0, 0.5])
