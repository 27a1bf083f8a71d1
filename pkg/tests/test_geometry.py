import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.errors import DimensionMismatchError, DomainError, InvalidDimensionError, SizeError
from app.models import Point
from app.schemas import RadiusSchedule
from app.services.geometry import (
    BucketIndex,
    default_schedule,
    distance,
    grid_side,
    make_grid,
    pairwise_distances,
    radius,
    sample_uniform,
    schedule_for,
    unit_ball_volume,
)


@pytest.mark.parametrize("d, expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3), (4, math.pi ** 2 / 2)])
def test_unit_ball_volume(d, expected):
    assert unit_ball_volume(d) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("d", range(3, 11))
def test_unit_ball_recurrence(d):
    assert unit_ball_volume(d) == pytest.approx(unit_ball_volume(d - 2) * 2 * math.pi / d, rel=1e-12)


def test_unit_ball_rejects_zero_dimension():
    with pytest.raises(InvalidDimensionError):
        unit_ball_volume(0)


def test_sample_uniform_empty():
    points = sample_uniform(0, 2, seed=1)
    assert points.n == 0
    assert points.dim == 2


def test_sample_uniform_deterministic():
    a = sample_uniform(5, 3, seed=11)
    b = sample_uniform(5, 3, seed=11)
    np.testing.assert_array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, sample_uniform(5, 3, seed=12).coords)


def test_sample_uniform_axis_means():
    points = sample_uniform(10_000, 2, seed=2024)
    # 4 standard errors of a Uniform(0, 1) mean over 10^4 draws
    assert np.all(np.abs(points.coords.mean(axis=0) - 0.5) < 4 / math.sqrt(12 * 10_000))


def test_make_grid_examples():
    np.testing.assert_array_equal(make_grid(1, 2).coords, [[0.5, 0.5]])
    np.testing.assert_array_equal(make_grid(2, 1).coords[:, 0], [0.25, 0.75])


def test_make_grid_spacing():
    grid = make_grid(3, 2)
    assert grid.n == 9
    dist = pairwise_distances(grid.coords)
    np.fill_diagonal(dist, np.inf)
    np.testing.assert_allclose(dist.min(axis=1), 1 / 3, rtol=0, atol=1e-15)
    assert grid.offset == 0.5 and grid.side == 3


def test_make_grid_last_axis_fastest():
    grid = make_grid(2, 2)
    np.testing.assert_array_equal(grid.coords, [[0.25, 0.25], [0.25, 0.75], [0.75, 0.25], [0.75, 0.75]])


def test_make_grid_size_cap(monkeypatch):
    monkeypatch.setenv("RGG_MAX_POINTS", "100")
    with pytest.raises(SizeError):
        make_grid(11, 2)


def test_grid_side():
    assert grid_side(4096, 2) == 64
    assert grid_side(27, 3) == 3
    with pytest.raises(SizeError):
        grid_side(10, 2)


def test_radius_examples():
    assert radius(RadiusSchedule(c=1, beta=1), math.e, 1) == pytest.approx(1 / math.e)
    assert radius(RadiusSchedule(c=1, beta=2), 100, 2) == pytest.approx(math.log(100) / 10)
    schedule = RadiusSchedule(c=1, beta=1)
    assert radius(schedule, 10 ** 4, 2) < radius(schedule, 10 ** 3, 2)


def test_radius_domain():
    with pytest.raises(DomainError):
        radius(RadiusSchedule(), 1, 2)


@pytest.mark.parametrize("beta", [1.0, 2.0, 3.0])
def test_radius_decreasing(beta):
    start = max(8, math.floor(math.exp(beta)) + 1)
    ns = np.unique(np.logspace(np.log10(start), 6, 200).astype(int))
    ns = ns[ns >= start]
    values = [radius(RadiusSchedule(c=1, beta=beta), int(n), 2) for n in ns]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_default_schedule():
    assert default_schedule(2).beta == 2.0
    assert default_schedule(3).beta == 1.5


def test_radius_increases_below_threshold():
    schedule = RadiusSchedule(c=1, beta=3)
    assert radius(schedule, 15, 2) > radius(schedule, 8, 2)


def test_partial_schedule_filled_per_dimension():
    assert schedule_for(RadiusSchedule(c=2.0), 3) == RadiusSchedule(c=2.0, beta=1.5)
    assert schedule_for(RadiusSchedule(beta=1.0), 2) == RadiusSchedule(c=1.0, beta=1.0)
    assert schedule_for(None, 1) == default_schedule(1)
    assert radius(RadiusSchedule(c=2.0), 1000, 3) == pytest.approx(2.0 * (math.log(1000) ** 1.5 / 1000) ** (1 / 3))
    assert radius(None, 100, 2) == radius(default_schedule(2), 100, 2)


def test_distance_examples():
    assert distance(Point((0.0, 0.0)), Point((0.6, 0.8))) == pytest.approx(1.0)
    assert distance([0.3, 0.3], [0.3, 0.3]) == 0.0
    with pytest.raises(DimensionMismatchError):
        distance([0.1], [0.1, 0.2])


coords = st.lists(st.floats(min_value=0, max_value=1), min_size=3, max_size=3)


@given(coords, coords)
def test_distance_symmetric(u, v):
    assert distance(u, v) == distance(v, u)


def test_point_rejects_out_of_cube():
    with pytest.raises(DomainError):
        Point((1.5,))


def test_bucket_index_finds_everything_within_cell():
    points = sample_uniform(300, 2, seed=5)
    index = BucketIndex(points.coords, 0.1)
    origin = points.coords[0]
    found, _ = index.within(origin, 0.1)
    expected = np.flatnonzero(pairwise_distances(points.coords[:1], points.coords)[0] <= 0.1)
    np.testing.assert_array_equal(np.sort(found), expected)


def test_bucket_index_zero_cell():
    points = make_grid(4, 2)
    found, dist = BucketIndex(points.coords, 0.0).within(points.coords[5], 0.0)
    np.testing.assert_array_equal(found, [5])
    np.testing.assert_array_equal(dist, [0.0])
