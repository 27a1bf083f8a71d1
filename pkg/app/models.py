"""
Immutable domain value types: points, graphs, matrices, matchings, spectra
"""
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Tuple

import numpy as np

from app.errors import DimensionMismatchError, DomainError, InvalidDimensionError


def _frozen(array, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Point:
    coords: Tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) < 1:
            raise InvalidDimensionError("a point needs at least one coordinate")
        if any(not 0.0 <= c <= 1.0 for c in self.coords):
            raise DomainError(f"coordinates must lie in [0, 1]: {self.coords}")

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class PointSet:
    """
    n points of [0,1]^d. `kind` records provenance: "sampled" carries the seed,
    "grid" carries the side m and the lattice offset (points at (i + offset)/m).
    """
    coords: np.ndarray
    kind: Literal["sampled", "grid"]
    seed: Optional[int] = None
    side: Optional[int] = None
    offset: Optional[float] = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise InvalidDimensionError(f"coords must have shape (n, d), d >= 1; got {coords.shape}")
        if coords.size and (coords.min() < 0.0 or coords.max() > 1.0):
            raise DomainError("coordinates must lie in [0, 1]")
        object.__setattr__(self, "coords", _frozen(coords, np.float64))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def points(self) -> Tuple[Point, ...]:
        return tuple(Point(tuple(float(c) for c in row)) for row in self.coords)

    def __len__(self) -> int:
        return self.n

    def __repr__(self):
        origin = f"seed={self.seed}" if self.kind == "sampled" else f"side={self.side}, offset={self.offset}"
        return f"<PointSet(n={self.n}, d={self.dim}, kind={self.kind}, {origin})>"


@dataclass(frozen=True)
class GeometricGraph:
    """G(S; r): sorted neighbour lists, degrees, and the radius used"""
    n: int
    dim: int
    radius: float
    adjacency: Tuple[np.ndarray, ...]
    degrees: np.ndarray
    label: str = ""

    def __post_init__(self):
        adjacency = tuple(_frozen(nbrs, np.int64) for nbrs in self.adjacency)
        object.__setattr__(self, "adjacency", adjacency)
        object.__setattr__(self, "degrees", _frozen(self.degrees, np.int64))

    def neighbours(self, u: int) -> np.ndarray:
        return self.adjacency[u]

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def __repr__(self):
        return f"<GeometricGraph(label={self.label!r}, n={self.n}, d={self.dim}, r={self.radius:.6g}, edges={self.edge_count})>"


@dataclass(frozen=True)
class RowStochasticMatrix:
    """Dense SRW transition matrix P(G)"""
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries, np.float64))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense, exactly symmetric matrix"""
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {entries.shape}")
        if not np.array_equal(entries, entries.T):
            raise DomainError("matrix is not exactly symmetric")
        object.__setattr__(self, "entries", _frozen(entries, np.float64))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Matching:
    """Bijection X-index -> D-index with its bottleneck value M_n"""
    forward: np.ndarray
    bottleneck: float

    def __post_init__(self):
        object.__setattr__(self, "forward", _frozen(self.forward, np.int64))

    @property
    def n(self) -> int:
        return self.forward.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.forward)
        inv[self.forward] = np.arange(self.n)
        return inv

    def __repr__(self):
        return f"<Matching(n={self.n}, bottleneck={self.bottleneck:.6g})>"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending"""
    values: np.ndarray
    source: str = ""
    connected: Optional[bool] = None

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=np.float64))[::-1]
        object.__setattr__(self, "values", _frozen(values, np.float64))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def second(self) -> float:
        """lambda_2, NaN for a single vertex"""
        return float(self.values[1]) if self.n > 1 else float("nan")

    def measure(self) -> "SpectralMeasure":
        return SpectralMeasure(self.values)

    def __len__(self) -> int:
        return self.n

    def __repr__(self):
        return f"<Spectrum(source={self.source!r}, n={self.n}, connected={self.connected})>"


@dataclass(frozen=True)
class SpectralMeasure:
    """Empirical measure placing mass 1/n on each atom"""
    atoms: np.ndarray
    _ascending: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        atoms = _frozen(self.atoms, np.float64)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "_ascending", _frozen(np.sort(atoms), np.float64))

    @property
    def total_mass(self) -> float:
        return 1.0 if self.atoms.size else 0.0

    def cdf(self, x) -> np.ndarray:
        """(1/n)|{lambda <= x}|, right-continuous"""
        counts = np.searchsorted(self._ascending, np.asarray(x, dtype=np.float64), side="right")
        return counts / self.atoms.size

    def mean(self, f: Callable) -> float:
        """Integral of f against the measure"""
        values = np.asarray(f(self.atoms), dtype=np.float64)
        return float(np.mean(np.broadcast_to(values, self.atoms.shape)))


@dataclass(frozen=True)
class StaircaseApprox:
    """
    Continuous piecewise-linear approximation of f on `domain`. Nodes sit at
    lo + i*epsilon (plus the right end point); between nodes the function is
    linear, so it equals node_values[0] + sum_i L*c_i*g_eps(x - node_i) with
    c_i the ramp coefficients.
    """
    epsilon: float
    lipschitz: float
    domain: Tuple[float, float]
    nodes: np.ndarray
    node_values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes, np.float64))
        object.__setattr__(self, "node_values", _frozen(self.node_values, np.float64))

    @property
    def shift(self) -> float:
        """Offset that moves the domain to start at 0"""
        return -self.domain[0]

    @property
    def ramp_count(self) -> int:
        return self.nodes.shape[0] - 1

    @property
    def ramp_coefficients(self) -> np.ndarray:
        widths = np.diff(self.nodes)
        return np.diff(self.node_values) / (self.lipschitz * widths)

    def __call__(self, x):
        return np.interp(x, self.nodes, self.node_values)

    def ramp_sum(self, x) -> np.ndarray:
        """Evaluate through the ramp decomposition instead of interpolation"""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        ramps = np.clip(x[:, None] - self.nodes[None, :-1], 0.0, self.epsilon)
        return self.node_values[0] + ramps @ (self.lipschitz * self.ramp_coefficients)

    def sup_error(self, f: Callable, refine: int = 10) -> float:
        """Max |f - approx| on a grid `refine` times finer than the nodes"""
        lo, hi = self.domain
        xs = np.linspace(lo, hi, refine * self.ramp_count + 1)
        fx = np.asarray([f(x) for x in xs], dtype=np.float64)
        return float(np.max(np.abs(fx - self(xs))))
