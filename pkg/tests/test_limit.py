import numpy as np
import pytest

from common import ConfigError, HorizonError
from distributions import AdmissibleMechanism
from limit import (
    GridPath,
    bridge_maximum,
    bridge_minimum,
    build_U,
    build_U_rows,
    build_left_height,
    build_limit_system,
    first_passage_at,
    first_passage_inverse,
    from_function,
    function_driving_paths,
    inverse_rows,
    lamperti_solve,
    local_time_field,
    mcbi_mean,
    mcbi_sde,
    occupation_residual,
    ray_knight_local_times,
    reflection_min_cdf,
    running_low,
    simulate_brownian_height,
    stieltjes_drift,
)

from .common import *


def test_brownian_height(rng):
    """
    H = (X - min X) / beta and ell = -min X
    """
    path = simulate_brownian_height(0.5, -0.3, 1e-3, 2.0, rng)
    assert len(path.X) == 2001
    assert (path.H.values >= 0).all()
    assert path.ell.is_nondecreasing()
    assert np.allclose(0.5 * path.H.values, path.X.values + path.ell.values)
    with pytest.raises(ValueError):
        simulate_brownian_height(0.0, 0.0, 1e-3, 1.0, rng)


def test_reflection_min_cdf():
    assert reflection_min_cdf(-0.1, 1.0, 1.0) == 0.0
    # driftless: P(-min <= y) = 2 Phi(y) - 1
    assert reflection_min_cdf(0.0, 1.0, 1.0) == pytest.approx(0.0)
    assert reflection_min_cdf(1.0, 1.0, 1.0) == pytest.approx(0.682689, abs=1e-6)
    values = reflection_min_cdf(np.linspace(0, 5, 50), 2.0, 1.0, drift=-0.5)
    assert (np.diff(values) >= 0).all()


def test_bridge_extrema(rng):
    """
    A standard bridge from 0 to 0 dips below -y with probability exp(-2 y^2)
    """
    zeros = np.zeros(40000)
    low = bridge_minimum(zeros, zeros, 1.0, rng)
    high = bridge_maximum(zeros, zeros, 1.0, rng)
    assert (low <= 0).all() and (high >= 0).all()
    assert np.mean(low < -0.5) == pytest.approx(np.exp(-0.5), abs=0.015)
    assert np.mean(high > 0.5) == pytest.approx(np.exp(-0.5), abs=0.015)
    assert bridge_minimum(np.array([1.0]), np.array([3.0]), 0.0, rng)[0] == 1.0


def test_running_low(rng):
    assert running_low(np.array([0.0, 1.0, -1.0, 2.0]), 0.0, rng).tolist() == [0.0, 0.0, -1.0, -1.0]
    x = np.cumsum(rng.standard_normal((3, 50)), axis=1)
    low = running_low(x, 1.0, rng)
    assert low.shape == x.shape
    assert (low <= np.minimum.accumulate(x, axis=1)).all()
    assert (np.diff(low, axis=1) <= 0).all()


@pytest.mark.flaky(reruns=2)
def test_brownian_running_min_law():
    """
    The bridge-corrected minimum follows the reflection law even on a coarse grid
    """
    rng = np.random.default_rng(21)
    ell = np.array([simulate_brownian_height(0.5, 0.0, 0.05, 1.0, rng).ell.values[-1] for _ in range(3000)])
    grid = np.array([0.25, 0.5, 1.0, 1.5])
    empirical = (ell[:, None] <= grid[None, :]).mean(axis=0)
    assert np.allclose(empirical, reflection_min_cdf(grid, 1.0, 1.0), atol=0.03)


def test_first_passage_inverse():
    f = from_function(lambda t: 2 * t, 0.01, 1.0)
    passage = first_passage_inverse(f, 0.1, 3.0)
    inside = passage.in_horizon
    assert np.all(np.abs(passage.values[inside] - passage.levels[inside] / 2) <= 0.01 + 1e-12)
    assert np.isnan(passage.values[passage.levels >= 2.0]).all()
    with pytest.raises(ValueError):
        first_passage_inverse(from_function(lambda t: -t, 0.01, 1.0), 0.1, 1.0)


def test_first_passage_over_a_flat():
    """
    A jump from 0 to 1 at s = 1/2 is passed at 1/2 for every level in [0, 1)
    """
    step = from_function(lambda s: (s >= 0.5).astype(float), 0.01, 1.0)
    passage = first_passage_at(step, [0.0, 0.5, 0.99, 1.0])
    assert passage.values[:3] == pytest.approx([0.5, 0.5, 0.5])
    assert passage.in_horizon.tolist() == [True, True, True, False]


def test_first_passage_double_inverse(rng):
    """
    F(F(f)) recovers f from above within one level cell
    """
    f = GridPath(1e-3, np.concatenate(([0.0], np.cumsum(rng.exponential(1e-3, 2000)))))
    inverse = first_passage_inverse(f, 1e-3, 0.9 * f.values[-1])
    assert inverse.in_horizon.all()
    back = first_passage_at(GridPath(1e-3, inverse.values), f.times)
    inside = back.in_horizon
    assert inside.sum() > 1000
    gap = back.values[inside] - f.values[inside]
    assert (gap >= -1e-12).all() and (gap < 1e-3 + 1e-12).all()


def test_build_U_affine_when_decoupled(decoupled_mechanism):
    Z = np.abs(np.random.default_rng(0).normal(size=(101, 2)))
    U = build_U(Z, decoupled_mechanism, 0.01)
    v = np.arange(101) * 0.01
    assert np.allclose(U[0].values, 0.0 + 1.0 * v)
    assert np.allclose(U[1].values, 0.5 + 2.0 * v)


def test_build_U_slope(coupled_mechanism):
    Z = np.abs(np.random.default_rng(1).normal(size=(3, 201, 2)))
    rows = build_U_rows(Z, coupled_mechanism, 0.01)
    assert rows.shape == (3, 2, 201)
    slopes = np.diff(rows, axis=2) / 0.01
    assert (slopes >= 1.0 - 1e-9).all()
    single = build_U(Z[2], coupled_mechanism, 0.01)
    assert np.allclose(single[1].values, rows[2, 1])


def test_inverse_rows():
    dv = 0.01
    v = np.arange(101) * dv
    U = np.stack((0.5 + 2.0 * v, 1.0 + v))
    levels = np.array([[0.2, 0.9, 3.0], [1.5, 2.0, 2.5]])
    values, inside = inverse_rows(U, dv, levels)
    assert inside.tolist() == [[True, True, False], [True, True, False]]
    assert values[0, 0] == 0.0
    assert values[0, 1] == pytest.approx(0.2)
    assert values[1, 0] == pytest.approx(0.5)
    assert values[1, 1] == pytest.approx(1.0)
    assert np.isnan(values[:, 2]).all()


def test_left_height_is_above_height(decoupled_mechanism, rng):
    height = simulate_brownian_height(0.5, 0.0, 1e-3, 3.0, rng)
    Z = mcbi_sde(decoupled_mechanism, 1e-3, 5.0, rng)
    U = build_U(Z.values[0], decoupled_mechanism, 1e-3)
    left = build_left_height(height, U[1])
    assert left.J.is_nondecreasing()
    assert (left.values.values >= height.H.values - 1e-12).all()
    # affine U: J = max(0, ell - x) / delta
    expected = np.maximum(0.0, height.ell.values - 0.5) / 2.0
    assert np.allclose(left.J.values[left.in_horizon], expected[left.in_horizon], atol=1e-9)


def test_stieltjes_drift_matches_inverse(decoupled_mechanism, rng):
    height = simulate_brownian_height(0.5, 0.0, 1e-3, 2.0, rng)
    Z = np.zeros((2001, 2))
    drift = stieltjes_drift(height.ell, 1, decoupled_mechanism, Z, 1e-3)
    assert np.allclose(drift.values, np.maximum(0.0, height.ell.values - 0.5) / 2.0)


def test_local_time_field():
    path = from_function(lambda t: t, 1e-3, 1.0)
    field = local_time_field(path, [0.2, 0.5], 0.05)
    # a unit-speed path spends eps in every band
    assert np.allclose(field.values, 1.0, atol=0.05)
    half = local_time_field(path, [0.2, 0.5], 0.05, scale=0.5)
    assert np.allclose(half.values, 0.5 * field.values)
    with pytest.raises(ValueError):
        local_time_field(path, [0.2], 1e-4)


def test_occupation_residual_shrinks_with_band():
    """
    Refining the band (and the time grid) at least halves the residual
    """
    coarse = from_function(lambda t: t + 0.3 * np.sin(5 * t), 1e-4, 2.0)
    fine = from_function(lambda t: t + 0.3 * np.sin(5 * t), 5e-5, 2.0)
    first = occupation_residual(coarse, np.exp, 0.02)
    second = occupation_residual(fine, np.exp, 0.01)
    assert first / second >= 1.5


def test_mcbi_mean():
    mech = AdmissibleMechanism(beta=[0.5], alpha=[[-1.0]], delta=[1.0], x=[0.5])
    expected = 1.0 - np.exp(-1.0) + 0.5 * np.exp(-1.0)
    assert mcbi_mean(mech, 1.0)[0] == pytest.approx(expected)
    flat = AdmissibleMechanism(beta=[0.5], alpha=[[0.0]], delta=[1.0], x=[0.0])
    assert mcbi_mean(flat, 1.0)[0] == pytest.approx(1.0)


def test_mcbi_sde(coupled_mechanism, rng):
    traj = mcbi_sde(coupled_mechanism, 1e-3, 1.0, rng, replicates=4)
    assert traj.values.shape == (4, 1001, 2)
    assert (traj.values >= 0).all()
    assert (traj.values[:, 0] == 0).all()
    assert traj.component(2, replicate=1).t_max == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        mcbi_sde(coupled_mechanism, 0.0, 1.0, rng)


def test_lamperti_with_flat_driver(brownian_mechanism):
    """
    With X = 0 the time change leaves only x + Y, i.e. x + delta v
    """
    driving = function_driving_paths(brownian_mechanism, lambda t: np.zeros_like(t), 1e-3, 10.0)
    traj = lamperti_solve(brownian_mechanism, driving, 1e-2, 1.0)
    assert np.allclose(traj.values[0, :, 0], np.arange(101) * 1e-2)
    assert traj.clamp_fraction == 0.0


def test_lamperti_horizon_error(brownian_mechanism):
    driving = function_driving_paths(brownian_mechanism, lambda t: np.zeros_like(t), 1e-3, 0.01)
    with pytest.raises(HorizonError):
        lamperti_solve(brownian_mechanism, driving, 1e-2, 1.0)


def test_ray_knight_sample_shape(coupled_mechanism, rng):
    sample = ray_knight_local_times(rng, 8, coupled_mechanism, [0.25, 0.5], dt=1e-3, dv=1e-3, eps=0.02, t_cap=5.0)
    assert sample.local_time.shape == (8, 2, 2)
    assert sample.z.shape == (8, 2, 2)
    assert (sample.local_time >= 0).all()
    with pytest.raises(ValueError):
        ray_knight_local_times(rng, 2, coupled_mechanism, [0.25], dt=1e-2, eps=1e-3)


def test_limit_system(coupled_mechanism):
    system = build_limit_system(coupled_mechanism, np.random.default_rng(4), v_max=0.5, levels=[0.25], t_cap=20.0)
    assert system.check_monotone()
    for part in system.types:
        assert part.local_time is not None
        assert part.local_time.values.shape == (1,)
    assert system.self_consistency().shape == (2,)
    stable = AdmissibleMechanism(
        beta=[0.0], alpha=[[0.0]], delta=[1.0], x=[0.0], stable_alpha=1.5, stable_c=[1.0]
    )
    with pytest.raises(ConfigError):
        build_limit_system(stable, np.random.default_rng(0))


@pytest.mark.flaky(reruns=2)
def test_ray_knight_mean_matches_sde(brownian_mechanism):
    """
    E L^v = E Z_v = v; a lagging local time at 0 would push the estimate up
    """
    levels = [0.25, 0.5]
    sample = ray_knight_local_times(np.random.default_rng(8), 2000, brownian_mechanism, levels, dt=1e-3, eps=0.02)
    assert not sample.excluded.any()
    means = sample.local_time[:, 0].mean(axis=0)
    expected = [mcbi_mean(brownian_mechanism, v)[0] for v in levels]
    assert means == pytest.approx(expected, rel=0.06)
