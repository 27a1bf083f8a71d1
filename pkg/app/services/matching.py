"""
Minimum bottleneck matching between a sample X_n and the grid D_n, and the
rate envelopes the bottleneck value M_n is expected to follow.
"""
import itertools
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import maximum_bipartite_matching

from app.errors import DimensionMismatchError, DomainError, MatchingError, SizeError
from app.models import Matching, PointSet
from app.schemas import RateEnvelope
from app.services.geometry import BucketIndex, pairwise_distances

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_N = 8
CANDIDATE_CAP_FACTOR = 4.0
# edge-prefix growth factor while bracketing the bottleneck threshold
PREFIX_GROWTH = 1.5
# failure probability used for the d = 1 envelope when seeding the candidate cap
D1_CAP_EPSILON = 0.01


def rate_envelope(env: RateEnvelope, n: float) -> float:
    """constant x rate: (log n/n)^(1/d), d >= 3; (log^1.5 n/n)^(1/2), d = 2; sqrt(log(1/eps)/n), d = 1"""
    if n < 2:
        raise DomainError(f"rate envelope needs n >= 2, got {n}")
    log_n = math.log(n)
    if env.d >= 3:
        return env.constant * (log_n / n) ** (1.0 / env.d)
    if env.d == 2:
        return env.constant * (log_n ** 1.5 / n) ** 0.5
    if env.epsilon is None:
        raise DomainError("the d = 1 envelope needs a failure probability epsilon in (0, 1)")
    return env.constant * math.sqrt(math.log(1.0 / env.epsilon) / n)


def _check_pair(X: PointSet, D: PointSet) -> None:
    if X.n != D.n:
        raise SizeError(f"point sets differ in size: {X.n} vs {D.n}")
    if X.dim != D.dim:
        raise DimensionMismatchError(f"point sets differ in dimension: {X.dim} vs {D.dim}")


def matching_distances(X: PointSet, D: PointSet, forward: np.ndarray) -> np.ndarray:
    """|u - phi(u)| for every u"""
    diff = D.coords[forward] - X.coords
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _finish(X: PointSet, D: PointSet, forward: np.ndarray) -> Matching:
    dist = matching_distances(X, D, forward)
    return Matching(forward=forward, bottleneck=float(dist.max()) if dist.size else 0.0)


def candidate_edges(X: PointSet, D: PointSet, cap: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rows, cols, distances) of all pairs within distance `cap`, found through grid buckets"""
    index = BucketIndex(D.coords, min(cap, math.sqrt(X.dim)))
    rows, cols, dists = [], [], []
    for i in range(X.n):
        found, dist = index.within(X.coords[i], cap)
        rows.append(np.full(found.size, i, dtype=np.int64))
        cols.append(found)
        dists.append(dist)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(dists)


def _perfect_matching(n: int, rows: np.ndarray, cols: np.ndarray) -> Optional[np.ndarray]:
    graph = sparse.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n))
    matched = maximum_bipartite_matching(graph, perm_type="column")
    if np.all(matched >= 0):
        return matched.astype(np.int64)
    return None


class _WarmMatching:
    """
    Maximum matching over the edges of a distance-sorted list up to some prefix,
    grown by Hopcroft-Karp phases as the prefix lengthens. A matching that is
    maximum for a prefix stays valid for every longer prefix.
    """

    def __init__(self, n: int, rows: np.ndarray, cols: np.ndarray):
        self.n = n
        self.rows = rows
        self.cols = cols
        self.match_row = [-1] * n
        self.match_col = [-1] * n
        self.size = 0

    def copy(self) -> "_WarmMatching":
        other = _WarmMatching(self.n, self.rows, self.cols)
        other.match_row = list(self.match_row)
        other.match_col = list(self.match_col)
        other.size = self.size
        return other

    def seed(self, end: int) -> None:
        """Start from scipy's maximum matching on the first `end` edges"""
        graph = sparse.csr_matrix(
            (np.ones(end, dtype=np.int8), (self.rows[:end], self.cols[:end])), shape=(self.n, self.n)
        )
        matched = maximum_bipartite_matching(graph, perm_type="column").tolist()
        self.match_row = [-1] * self.n
        self.match_col = [-1] * self.n
        for u, v in enumerate(matched):
            if v >= 0:
                self.match_row[u] = v
                self.match_col[v] = u
        self.size = sum(1 for v in matched if v >= 0)

    def _adjacency(self, end: int) -> Tuple[List[int], List[int]]:
        rows = self.rows[:end]
        order = np.argsort(rows, kind="stable")
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.n), out=indptr[1:])
        return indptr.tolist(), self.cols[:end][order].tolist()

    def grow(self, end: int) -> bool:
        """Augment over the first `end` edges; True once the matching is perfect"""
        if self.size == self.n:
            return True
        indptr, indices = self._adjacency(end)
        match_row, match_col = self.match_row, self.match_col
        unreached = self.n + 1
        while True:
            # layered BFS from the free rows; `limit` is the length of the shortest augmenting path
            layer = [unreached] * self.n
            queue = [u for u in range(self.n) if match_row[u] < 0]
            for u in queue:
                layer[u] = 0
            limit = unreached
            head = 0
            while head < len(queue):
                u = queue[head]
                head += 1
                if layer[u] >= limit:
                    continue
                for k in range(indptr[u], indptr[u + 1]):
                    w = match_col[indices[k]]
                    if w < 0:
                        limit = min(limit, layer[u] + 1)
                    elif layer[w] == unreached:
                        layer[w] = layer[u] + 1
                        queue.append(w)
            if limit == unreached:
                return False

            # vertex-disjoint shortest augmenting paths along the layers
            cursor = indptr[:-1]
            for root in range(self.n):
                if match_row[root] >= 0:
                    continue
                stack, path = [root], []
                while stack:
                    u = stack[-1]
                    advanced = False
                    while cursor[u] < indptr[u + 1]:
                        v = indices[cursor[u]]
                        cursor[u] += 1
                        w = match_col[v]
                        if w < 0:
                            if layer[u] + 1 == limit:
                                path.append(v)
                                for x, y in zip(stack, path):
                                    match_row[x] = y
                                    match_col[y] = x
                                self.size += 1
                                stack = []
                                advanced = True
                                break
                        elif layer[w] == layer[u] + 1:
                            path.append(v)
                            stack.append(w)
                            advanced = True
                            break
                    if not advanced:
                        layer[u] = unreached
                        stack.pop()
                        if path:
                            path.pop()
            if self.size == self.n:
                return True

    def forward(self) -> np.ndarray:
        return np.asarray(self.match_row, dtype=np.int64)


def _solve_on_candidates(n: int, rows: np.ndarray, cols: np.ndarray, dist: np.ndarray) -> Optional[np.ndarray]:
    """
    Smallest threshold among candidate distances that admits a perfect matching.

    The threshold starts at the largest nearest-candidate distance (no smaller
    value can work) and the edge prefix grows geometrically until the warm
    matching becomes perfect; a binary search over the last step then pins the
    threshold, each step augmenting a copy of the largest infeasible matching.
    """
    order = np.argsort(dist, kind="stable")
    rows, cols, dist = rows[order], cols[order], dist[order]

    # first occurrences in distance order are the nearest candidates; M_n is at least the largest of them
    row_ids, row_first = np.unique(rows, return_index=True)
    col_ids, col_first = np.unique(cols, return_index=True)
    if row_ids.size < n or col_ids.size < n:
        return None
    lower = max(dist[row_first].max(), dist[col_first].max())

    def prefix(k: int) -> int:
        """Edges with distance <= dist[k]"""
        return int(np.searchsorted(dist, dist[k], side="right"))

    lo = int(np.searchsorted(dist, lower, side="left"))
    base = _WarmMatching(n, rows, cols)
    base.seed(prefix(lo))
    if base.size == n:
        return base.forward()

    # geometric growth of the edge prefix; `lo` stays infeasible, `base` is maximum at lo
    hi = lo
    best = None
    while best is None:
        if prefix(hi) >= dist.size:
            return None
        hi = min(dist.size - 1, max(prefix(hi), int(prefix(hi) * PREFIX_GROWTH)))
        trial = base.copy()
        if trial.grow(prefix(hi)):
            best = trial
        else:
            lo, base = hi, trial
    logger.debug(f"threshold bracketed in ({dist[lo]:.6g}, {dist[hi]:.6g}]")

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if dist[mid] == dist[hi]:
            hi = mid
            continue
        trial = base.copy()
        if trial.grow(prefix(mid)):
            best, hi = trial, mid
        else:
            lo, base = mid, trial
    return best.forward()


def bottleneck_matching(X: PointSet, D: PointSet) -> Matching:
    """
    Perfect matching X -> D minimising the largest matched distance.

    Candidate pairs within 4x the rate envelope are collected through grid
    buckets (the cap doubles until a perfect matching exists). The smallest
    feasible threshold among their sorted distances is found by bracketing
    upward from the nearest-neighbour lower bound and then bisecting, with one
    maximum matching carried forward and grown by augmenting paths.
    """
    _check_pair(X, D)
    n, d = X.n, X.dim
    if n == 0:
        return Matching(forward=np.empty(0, dtype=np.int64), bottleneck=0.0)
    if n == 1:
        return _finish(X, D, np.zeros(1, dtype=np.int64))

    diameter = math.sqrt(d)
    env = RateEnvelope(d=d, epsilon=D1_CAP_EPSILON if d == 1 else None)
    cap = min(CANDIDATE_CAP_FACTOR * rate_envelope(env, n), diameter)
    while True:
        rows, cols, dist = candidate_edges(X, D, cap)
        forward = _solve_on_candidates(n, rows, cols, dist)
        if forward is not None:
            break
        if cap >= diameter:
            # the complete bipartite graph always has a perfect matching
            raise MatchingError("no perfect matching on the complete candidate set")
        logger.debug(f"no perfect matching within cap {cap:.4g}; doubling")
        cap = min(2.0 * cap, diameter)
    matching = _finish(X, D, forward)
    logger.debug(f"bottleneck matching n={n}, d={d}: M_n={matching.bottleneck:.6g} (cap {cap:.4g}, {dist.size} candidates)")
    return matching


def brute_force_bottleneck(X: PointSet, D: PointSet) -> Matching:
    """Exhaustive minimum over all n! permutations; n <= 8"""
    _check_pair(X, D)
    n = X.n
    if n > BRUTE_FORCE_MAX_N:
        raise SizeError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n == 0:
        return Matching(forward=np.empty(0, dtype=np.int64), bottleneck=0.0)
    dist = pairwise_distances(X.coords, D.coords)
    rows = np.arange(n)
    best_value, best_perm = math.inf, None
    for perm in itertools.permutations(range(n)):
        value = dist[rows, perm].max()
        if value < best_value:
            best_value, best_perm = value, perm
    return _finish(X, D, np.asarray(best_perm, dtype=np.int64))


def sorted_pairing(X: PointSet, D: PointSet) -> Matching:
    """Monotone pairing of sorted X with sorted D (d = 1)"""
    _check_pair(X, D)
    if X.dim != 1:
        raise DimensionMismatchError("the monotone pairing is defined for d = 1 only")
    forward = np.empty(X.n, dtype=np.int64)
    forward[np.argsort(X.coords[:, 0], kind="stable")] = np.argsort(D.coords[:, 0], kind="stable")
    return _finish(X, D, forward)


def is_feasible(X: PointSet, D: PointSet, t: float) -> bool:
    """A perfect matching uses only pairs at distance <= t"""
    _check_pair(X, D)
    if X.n == 0:
        return True
    if t < 0:
        return False
    rows, cols, _ = candidate_edges(X, D, t)
    return _perfect_matching(X.n, rows, cols) is not None
