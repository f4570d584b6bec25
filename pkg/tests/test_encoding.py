import dataclasses

import numpy as np
import pytest

from common import IdentityViolation
from encoding import (
    children_walks,
    depth_first_order,
    encode_forest,
    export_bundle,
    height_from_lukasiewicz,
    increment_law_check,
    left_height,
    lukasiewicz_path,
    profiles,
    running_minimum,
    verify_identities,
)
from encoding.left_height import immigrant_passage
from utils.artifact_sink import MemorySink

from .common import *


def test_hand_forest_depth_first(hand_forest):
    order = depth_first_order(hand_forest, 1)
    assert order.order.tolist() == [0, 2, 6, 3, 4, 7, 8]
    assert order.roots.tolist() == [0, 4, 8]
    assert order.starts.tolist() == [0, 4, 6]
    assert order.explored == 7


def test_hand_forest_paths(hand_forest):
    d = lukasiewicz_path(hand_forest, 1)
    assert d.tolist() == [0, 1, 1, 0, -1, -1, -2, -3]
    assert running_minimum(d).tolist() == [0, 0, 0, 0, -1, -1, -2, -3]
    assert height_from_lukasiewicz(d).tolist() == [0, 1, 2, 1, 0, 1, 0]

    bundle = encode_forest(hand_forest)
    left = left_height(bundle, 1)
    assert left.values.tolist() == [0, 1, 2, 1, 1, 2, 2]
    assert left.drift.tolist() == [0, 0, 0, 0, 1, 1, 2]
    assert left.in_horizon.all()


def test_hand_forest_profiles(hand_forest):
    prof = profiles(hand_forest)
    assert prof.Z[0].tolist() == [1, 3, 3, 0]
    assert prof.Z_from[0, 0].tolist() == [1, 1, 1, 0]
    assert prof.Z_from[1, 0].tolist() == [0, 2, 2, 0]
    assert prof.C[0].tolist() == [1, 4, 7, 7]
    assert prof.I[0].tolist() == [1, 2, 3, 3]

    walks = children_walks(hand_forest)
    assert walks.walk(1, 1).tolist() == [0, 1, 1, 0, 0, -1, -2, -3]
    assert walks.immigration(1).tolist() == [1, 2, 2]


def test_truncated_component_stops_exploration():
    forest = ColoredForest([1, 1, 0, 1, 0], [-1, -1, -1, 0, 2], [0, 0, 0, 1, 1], n_types=1, h_max=1, roots=(1, 2))
    order = depth_first_order(forest, 1)
    assert order.order.tolist() == [0, 3, 1]
    assert order.complete.tolist() == [False, True]
    assert order.explored == 0
    assert lukasiewicz_path(forest, 1).tolist() == [0]


def test_lukasiewicz_keeps_an_empty_order(monkeypatch):
    ensemble = OffspringEnsemble(mu=[["dirac(0)"]], nu=["dirac(0)"], k=[0])
    forest = generate_forest(ensemble, 0, seed=0)
    order = depth_first_order(forest, 1)
    assert len(order) == 0

    def recompute(*args):
        raise AssertionError("order was recomputed")

    monkeypatch.setattr("encoding.lukasiewicz.depth_first_order", recompute)
    assert lukasiewicz_path(forest, 1, order).tolist() == [0]


def test_height_matches_literal_evaluation():
    """
    Monotone-stack heights equal the term-by-term definition
    """
    for forest in random_forests(300, h_max=10, seed=11):
        if len(forest) > 200:
            continue
        for j in range(1, forest.n_types + 1):
            d = lukasiewicz_path(forest, j)
            assert (height_from_lukasiewicz(d) == literal_height(d)).all()


def test_depth_first_matches_recursion():
    for forest in random_forests(300, h_max=10, seed=12):
        for j in range(1, forest.n_types + 1):
            assert depth_first_order(forest, j).order.tolist() == recursive_depth_first(forest, j)


def test_identity_suite_on_random_forests():
    """
    Exact identities hold on every generated forest
    """
    total = None
    for forest in random_forests(600, h_max=20, seed=13):
        report = verify_identities(forest)
        assert report.ok, report.first_violation
        total = report if total is None else total.merge(report)
    for name in ("partition", "hd", "cevH", "iDef", "components", "dtc", "discCtc"):
        assert total.checks[name] > 0


def test_identity_suite_on_hand_forest(hand_forest):
    report = verify_identities(hand_forest)
    assert report.ok
    assert report.checks["excursion"] == 3


def test_identity_suite_reports_a_broken_height(hand_forest):
    bundle = encode_forest(hand_forest)
    height = dict(bundle.height)
    broken = height[1].copy()
    broken[2] += 1
    height[1] = broken
    report = verify_identities(hand_forest, dataclasses.replace(bundle, height=height))
    assert not report.ok
    assert report.violation_counts["hd"] >= 1
    violation = report.first_violation
    assert violation.identity == "hd"
    assert violation.index == 2
    with pytest.raises(IdentityViolation):
        report.raise_first()


def test_immigrant_passage():
    immigrants = np.array([1, 1, 3, 4])
    assert immigrant_passage(immigrants, np.array([0, 1, 2, 3, 4])).tolist() == [0, 2, 2, 3, 4]


@pytest.mark.flaky(reruns=2)
def test_increment_law_check():
    result = increment_law_check(one_type_ensemble(), 1, replicates=300, h_max=15, seed=5)
    assert result.n >= 1000
    assert result.p_value > 1e-3


def test_increment_law_check_degenerate():
    ensemble = OffspringEnsemble(mu=[["dirac(1)"]], nu=["dirac(1)"], k=[0])
    result = increment_law_check(ensemble, 1, replicates=50, h_max=30, seed=0, min_samples=100)
    assert result.degenerate
    assert result.p_value == 1.0


def test_export_bundle(hand_forest):
    sink = MemorySink()
    entries = export_bundle(encode_forest(hand_forest), sink, prefix="f/")
    assert entries["horizons"] == {"1": 7}
    frame = sink.frames["f/lukasiewicz_1.csv"]
    assert frame.columns == ["index", "value"]
    assert frame["value"].to_list() == [0, 1, 1, 0, -1, -1, -2, -3]
    assert "f/children_walk_1_1.csv" in sink.frames
    assert "f/cumulative_profile_0_1.csv" in sink.frames
