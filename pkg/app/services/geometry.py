"""
Point clouds in [0,1]^d: uniform samples, centred grids, radius schedules,
and the Euclidean kernel every other module measures with.
"""
import itertools
import logging
import math
from typing import Optional, Union

import numpy as np
from scipy.special import gamma

from app.config import get_settings
from app.errors import DimensionMismatchError, DomainError, InvalidDimensionError, SizeError
from app.models import Point, PointSet
from app.schemas import RadiusSchedule
from app.services.rng import Xoshiro256StarStar

logger = logging.getLogger(__name__)

GRID_OFFSET = 0.5
# finest bucket side; keeps cell keys bounded when the query radius is 0
MIN_CELL = 1e-9
# relative widening of bucket cells; rounding in coords / cell then never puts two
# points within distance `cell` more than one cell apart
CELL_SLACK = 1e-9

PointLike = Union[Point, np.ndarray, list, tuple]


def _check_dim(d: int) -> None:
    if d < 1:
        raise InvalidDimensionError(f"dimension must be >= 1, got {d}")


def unit_ball_volume(d: int) -> float:
    """pi_d = pi^(d/2) / Gamma(d/2 + 1)"""
    _check_dim(d)
    return float(math.pi ** (d / 2) / gamma(d / 2 + 1))


def _check_count(n: int) -> None:
    if n < 0:
        raise SizeError(f"point count must be >= 0, got {n}")
    cap = get_settings().max_points
    if n > cap:
        raise SizeError(f"{n} points exceeds the supported maximum of {cap}")


def sample_uniform(n: int, d: int, seed: int) -> PointSet:
    """n iid uniform points of [0,1]^d; coordinates drawn row-major from one stream"""
    _check_dim(d)
    _check_count(n)
    stream = Xoshiro256StarStar(seed)
    coords = stream.random_array(n * d).reshape(n, d)
    return PointSet(coords=coords, kind="sampled", seed=seed)


def make_grid(m: int, d: int) -> PointSet:
    """
    Centred lattice of m^d points at ((i_1 + 1/2)/m, ..., (i_d + 1/2)/m),
    enumerated with the last axis varying fastest.
    """
    _check_dim(d)
    if m < 1:
        raise SizeError(f"grid side must be >= 1, got {m}")
    _check_count(m ** d)
    axis = (np.arange(m, dtype=np.float64) + GRID_OFFSET) / m
    coords = np.array(list(itertools.product(axis, repeat=d)), dtype=np.float64).reshape(m ** d, d)
    return PointSet(coords=coords, kind="grid", side=m, offset=GRID_OFFSET)


def grid_side(n: int, d: int) -> int:
    """Exact integer d-th root of n; SizeError unless n = m^d"""
    _check_dim(d)
    if n < 1:
        raise SizeError(f"grid size must be >= 1, got {n}")
    guess = int(round(n ** (1.0 / d)))
    for m in (guess - 1, guess, guess + 1):
        if m >= 1 and m ** d == n:
            return m
    raise SizeError(f"n={n} is not a perfect {d}-th power; paired runs need n = m^d")


def default_schedule(d: int) -> RadiusSchedule:
    """c = 1; beta = 2 up to d = 2 and 1.5 from d = 3"""
    _check_dim(d)
    return RadiusSchedule(c=1.0, beta=2.0 if d <= 2 else 1.5)


def schedule_for(schedule: Optional[RadiusSchedule], d: int) -> RadiusSchedule:
    """`schedule` with any unset c or beta taken from default_schedule(d)"""
    default = default_schedule(d)
    if schedule is None:
        return default
    return RadiusSchedule(
        c=default.c if schedule.c is None else schedule.c,
        beta=default.beta if schedule.beta is None else schedule.beta,
    )


def radius(schedule: Optional[RadiusSchedule], n: float, d: int) -> float:
    """
    r(n) = c * ((ln n)^beta / n)^(1/d), unset parameters filled per dimension.

    r(n) is strictly decreasing only for n > e^beta; below that threshold the
    (ln n)^beta factor grows faster than n.
    """
    _check_dim(d)
    if n <= 1:
        raise DomainError(f"radius needs n > 1 (log n > 0), got {n}")
    schedule = schedule_for(schedule, d)
    return schedule.c * (math.log(n) ** schedule.beta / n) ** (1.0 / d)


def _as_array(u: PointLike) -> np.ndarray:
    if isinstance(u, Point):
        return np.asarray(u.coords, dtype=np.float64)
    return np.asarray(u, dtype=np.float64)


def row_distances(coords: np.ndarray, origin: np.ndarray) -> np.ndarray:
    """Euclidean distances from `origin` to each row of `coords`"""
    diff = coords - origin
    return np.sqrt(np.sum(diff * diff, axis=-1))


def distance(u: PointLike, v: PointLike) -> float:
    a, b = _as_array(u), _as_array(v)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(row_distances(a[None, :], b)[0])


def pairwise_distances(a: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
    """Full distance matrix, row i computed exactly as row_distances(b, a[i])"""
    b = a if b is None else b
    if a.shape[1:] != b.shape[1:]:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape[1:]} vs {b.shape[1:]}")
    out = np.empty((a.shape[0], b.shape[0]), dtype=np.float64)
    for i in range(a.shape[0]):
        out[i] = row_distances(b, a[i])
    return out


class BucketIndex:
    """
    Points hashed into cubic cells of side `cell`; a query scans the 3^d cells
    around the query point, which covers every point within distance `cell`.
    """

    def __init__(self, coords: np.ndarray, cell: float):
        if cell < 0:
            raise DomainError(f"cell side must be non-negative, got {cell}")
        self.coords = coords
        self.cell = max(cell, MIN_CELL) * (1.0 + CELL_SLACK)
        self.dim = coords.shape[1]
        self.cells_per_axis = max(1, math.ceil(1.0 / self.cell))
        self.keys = self.cell_of(coords)
        buckets = {}
        for index, key in enumerate(map(tuple, self.keys)):
            buckets.setdefault(key, []).append(index)
        self.buckets = {key: np.asarray(members, dtype=np.int64) for key, members in buckets.items()}
        self._offsets = list(itertools.product((-1, 0, 1), repeat=self.dim))

    def cell_of(self, coords: np.ndarray) -> np.ndarray:
        keys = np.floor(coords / self.cell).astype(np.int64)
        return np.clip(keys, 0, self.cells_per_axis - 1)

    def candidates(self, key) -> np.ndarray:
        """Indices stored in the 3^d cells surrounding `key`"""
        found = []
        for offset in self._offsets:
            members = self.buckets.get(tuple(k + o for k, o in zip(key, offset)))
            if members is not None:
                found.append(members)
        if not found:
            return np.empty(0, dtype=np.int64)
        return np.concatenate(found)

    def within(self, origin: np.ndarray, r: float):
        """(indices, distances) of stored points at distance <= r from origin, r <= cell"""
        key = tuple(int(k) for k in self.cell_of(origin[None, :])[0])
        cand = self.candidates(key)
        dist = row_distances(self.coords[cand], origin)
        keep = dist <= r
        return cand[keep], dist[keep]
