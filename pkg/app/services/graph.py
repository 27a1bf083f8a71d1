"""
Random geometric graphs G(S; r), SRW transition matrices, the symmetrized
similar matrix, and Hilbert-Schmidt distances between aligned graphs.
"""
import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order

from app.errors import (
    DimensionMismatchError,
    DomainError,
    ExportError,
    IsolatedVertexError,
    NotBijectiveError,
    NotGridError,
)
from app.models import GeometricGraph, Matching, PointSet, RowStochasticMatrix, SymmetricMatrix
from app.services.geometry import BucketIndex, pairwise_distances, unit_ball_volume

logger = logging.getLogger(__name__)

# lattice-discretisation allowances on the degree sandwich a(n)/4 <= deg <= a(n)
SANDWICH_LOWER_SLACK = 0.5
SANDWICH_UPPER_SLACK = 0.25


def _from_neighbour_lists(points: PointSet, r: float, lists, label: str) -> GeometricGraph:
    adjacency = tuple(np.unique(np.asarray(nbrs, dtype=np.int64)) for nbrs in lists)
    degrees = np.fromiter((a.size for a in adjacency), dtype=np.int64, count=len(adjacency))
    return GeometricGraph(n=points.n, dim=points.dim, radius=float(r), adjacency=adjacency, degrees=degrees, label=label)


def build_rgg(points: PointSet, r: float, label: str = "") -> GeometricGraph:
    """
    Edge uv iff u != v and |u - v| <= r. Points are bucketed into cells of side
    r, so each point is compared only with the 3^d cells around it.
    """
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    n = points.n
    lists = [[] for _ in range(n)]
    if n:
        # cells never need to be finer than the cube diameter
        index = BucketIndex(points.coords, min(r, math.sqrt(points.dim)))
        for u in range(n):
            found, _ = index.within(points.coords[u], r)
            found = found[found > u]
            lists[u].extend(found.tolist())
            for v in found.tolist():
                lists[v].append(u)
    g = _from_neighbour_lists(points, r, lists, label or points.kind)
    logger.debug(f"built {g!r}")
    return g


def brute_force_rgg(points: PointSet, r: float) -> GeometricGraph:
    """All-pairs construction; oracle for build_rgg"""
    if r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    dist = pairwise_distances(points.coords)
    close = dist <= r
    np.fill_diagonal(close, False)
    lists = [np.flatnonzero(row) for row in close]
    return _from_neighbour_lists(points, r, lists, f"{points.kind}-brute")


def adjacency_csr(g: GeometricGraph) -> sparse.csr_matrix:
    indptr = np.concatenate(([0], np.cumsum(g.degrees)))
    indices = np.concatenate(g.adjacency) if g.n else np.empty(0, dtype=np.int64)
    data = np.ones(indices.size, dtype=np.float64)
    return sparse.csr_matrix((data, indices, indptr), shape=(g.n, g.n))


def is_connected(g: GeometricGraph) -> bool:
    """Breadth-first traversal from vertex 0 reaches every vertex"""
    if g.n < 1:
        raise DomainError("connectivity is undefined for an empty graph")
    order = breadth_first_order(adjacency_csr(g), 0, directed=False, return_predecessors=False)
    return order.size == g.n


def _require_degrees(g: GeometricGraph) -> None:
    isolated = np.flatnonzero(g.degrees == 0)
    if isolated.size:
        raise IsolatedVertexError(int(isolated[0]))


def transition_matrix(g: GeometricGraph) -> RowStochasticMatrix:
    """P(G)_uv = [u ~ v] / |N(u)|"""
    _require_degrees(g)
    entries = np.zeros((g.n, g.n), dtype=np.float64)
    for u, nbrs in enumerate(g.adjacency):
        entries[u, nbrs] = 1.0 / g.degrees[u]
    return RowStochasticMatrix(entries)


def symmetrize(g: GeometricGraph) -> SymmetricMatrix:
    """D^(-1/2) A D^(-1/2); similar to P(G), exactly symmetric"""
    _require_degrees(g)
    entries = np.zeros((g.n, g.n), dtype=np.float64)
    deg = g.degrees.astype(np.float64)
    for u, nbrs in enumerate(g.adjacency):
        # deg[u] * deg[v] commutes, so entry (u, v) and (v, u) are the same bits
        entries[u, nbrs] = 1.0 / np.sqrt(deg[u] * deg[nbrs])
    return SymmetricMatrix(entries)


def _alignment(phi: Union[Matching, np.ndarray], n: int) -> np.ndarray:
    forward = phi.forward if isinstance(phi, Matching) else np.asarray(phi, dtype=np.int64)
    if forward.shape != (n,):
        raise NotBijectiveError(f"alignment has shape {forward.shape}, expected ({n},)")
    if not np.array_equal(np.sort(forward), np.arange(n)):
        raise NotBijectiveError("alignment is not a permutation of the vertex set")
    return forward


def _matrix(m) -> np.ndarray:
    entries = m.entries if isinstance(m, (RowStochasticMatrix, SymmetricMatrix)) else np.asarray(m, dtype=np.float64)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {entries.shape}")
    return entries


def hs_distance(P, Q, phi: Union[Matching, np.ndarray]) -> float:
    """((1/n) * sum_uv (P_uv - Q_phi(u)phi(v))^2)^(1/2)"""
    p, q = _matrix(P), _matrix(Q)
    if p.shape != q.shape:
        raise DimensionMismatchError(f"matrix orders differ: {p.shape[0]} vs {q.shape[0]}")
    n = p.shape[0]
    forward = _alignment(phi, n)
    if n == 0:
        return 0.0
    diff = p - q[np.ix_(forward, forward)]
    return math.sqrt(float(np.sum(diff * diff)) / n)


def hs_via_neighbour_counts(gX: GeometricGraph, gD: GeometricGraph, phi: Union[Matching, np.ndarray]) -> float:
    """
    Same value as hs_distance on the transition matrices, through
    (1/n) * sum_u (1/|N(u)| + 1/|N(u')| - 2|N(u,u')| / (|N(u)||N(u')|)),
    N(u,u') being the neighbours of u whose images neighbour u' = phi(u).
    """
    if gX.n != gD.n:
        raise DimensionMismatchError(f"graph orders differ: {gX.n} vs {gD.n}")
    forward = _alignment(phi, gX.n)
    _require_degrees(gX)
    _require_degrees(gD)
    if gX.n == 0:
        return 0.0
    total = 0.0
    for u in range(gX.n):
        image = forward[u]
        a = int(gX.degrees[u])
        b = int(gD.degrees[image])
        shared = np.intersect1d(forward[gX.adjacency[u]], gD.adjacency[image], assume_unique=True).size
        # (a + b - 2c) / (ab) equals 1/a + 1/b - 2c/(ab) and is never negative
        total += (a + b - 2 * shared) / (a * b)
    return math.sqrt(total / gX.n)


def grid_degree_bounds(g: GeometricGraph, points: PointSet, r: float) -> Tuple[int, int]:
    """Observed (min, max) degree of a grid graph"""
    if points.kind != "grid":
        raise NotGridError("grid_degree_bounds needs a grid point set")
    if g.n != points.n:
        raise DimensionMismatchError(f"graph has {g.n} vertices, point set has {points.n}")
    if r != g.radius:
        logger.warning(f"degree bounds requested at r={r} for a graph built with r={g.radius}")
    if g.n == 0:
        return 0, 0
    return int(g.degrees.min()), int(g.degrees.max())


def degree_sandwich(points: PointSet, r: float) -> Tuple[float, float]:
    """(a(n)/4 * (1 - 0.5), a(n) * (1 + 0.25)) with a(n) = n pi_d r^d"""
    a = points.n * unit_ball_volume(points.dim) * r ** points.dim
    return a / 4 * (1 - SANDWICH_LOWER_SLACK), a * (1 + SANDWICH_UPPER_SLACK)


def sandwich_holds(g: GeometricGraph, points: PointSet) -> bool:
    lo, hi = degree_sandwich(points, g.radius)
    dmin, dmax = grid_degree_bounds(g, points, g.radius)
    ok = lo <= dmin and dmax <= hi
    if not ok:
        logger.warning(f"degree sandwich violated: [{dmin}, {dmax}] not within [{lo:.3f}, {hi:.3f}]")
    return ok


def write_edge_list(g: GeometricGraph, path: str) -> None:
    """Header 'n d r', then one 'u v' line per edge with u < v"""
    try:
        with open(path, "w") as fh:
            fh.write(f"{g.n} {g.dim} {g.radius!r}\n")
            for u, nbrs in enumerate(g.adjacency):
                for v in nbrs[nbrs > u].tolist():
                    fh.write(f"{u} {v}\n")
    except OSError as e:
        raise ExportError(path, e) from e


def read_edge_list(path: str) -> GeometricGraph:
    with open(path) as fh:
        n, d, r = fh.readline().split()
        n = int(n)
        lists = [[] for _ in range(n)]
        for line in fh:
            if not line.strip():
                continue
            u, v = (int(x) for x in line.split())
            lists[u].append(v)
            lists[v].append(u)
    adjacency = tuple(np.unique(np.asarray(nbrs, dtype=np.int64)) for nbrs in lists)
    degrees = np.array([a.size for a in adjacency], dtype=np.int64)
    return GeometricGraph(n=n, dim=int(d), radius=float(r), adjacency=adjacency, degrees=degrees, label=path)
