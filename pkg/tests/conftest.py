import numpy as np
import pytest

from app.config import get_settings
from app.models import GeometricGraph
from app.schemas import ExperimentConfig, RadiusSchedule
from app.services.geometry import grid_side, make_grid, sample_uniform


def graph_from_lists(lists, label="test"):
    adjacency = tuple(np.asarray(sorted(nbrs), dtype=np.int64) for nbrs in lists)
    degrees = np.array([len(nbrs) for nbrs in lists], dtype=np.int64)
    return GeometricGraph(n=len(lists), dim=1, radius=1.0, adjacency=adjacency, degrees=degrees, label=label)


def complete_graph(k):
    return graph_from_lists([[v for v in range(k) if v != u] for u in range(k)], label=f"K{k}")


def cycle_graph(k):
    return graph_from_lists([[(u - 1) % k, (u + 1) % k] for u in range(k)], label=f"C{k}")


def grid_sampler(n, d, seed):
    """Stands in for sample_uniform and returns the grid itself"""
    return make_grid(grid_side(n, d), d)


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from default settings; RGG_* variables set in a test apply to it alone"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def small_pair():
    """A seeded sample and the grid it is compared with, d = 2, m = 8"""
    return sample_uniform(64, 2, seed=7), make_grid(8, 2)


@pytest.fixture
def forced_grid_config():
    """One trial at d = 1, m = 4 with a radius large enough to connect the grid"""
    return ExperimentConfig(
        dims=[1],
        sides=[4],
        schedule=RadiusSchedule(c=4.0, beta=1.0),
        trials=1,
        master_seed=3,
        t_grid=[0.5, 1.0],
    )
