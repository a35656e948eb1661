"""Violation matchings and exact distance to monotonicity.

The distance of f equals the size of a maximum matching in its violation
graph (edges x < y with f(x)=1, f(y)=0) divided by the domain size.  Two
engines compute that matching:

* ``"implicit"``: Hopcroft-Karp written here, with edges found on demand by a
  vectorised dominance test; memory is linear in the domain size.
* ``"csgraph"``: the violation graph is built as a sparse matrix in row
  chunks and handed to scipy's Hopcroft-Karp.  Much faster for the many
  small instances the experiments run.

`brute_force_distance` is the independent check: it enumerates every
monotone function on a tiny domain.
"""
from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .grid import DenseFunction, DomainError, GridDomain, GridPoint, precedes

BRUTE_FORCE_MAX_POINTS = 20
BRUTE_FORCE_MAX_IDEALS = 10**6
_CHUNK = 2048


class InvalidMatching(AssertionError):
    pass


@dataclass
class ViolationMatching:
    """Vertex-disjoint violated pairs (lower, upper) with lower < upper."""

    domain: GridDomain
    pairs: list[tuple[GridPoint, GridPoint]]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def sorted(self) -> "ViolationMatching":
        return ViolationMatching(self.domain, sorted(self.pairs))

    def validate(self, f: DenseFunction) -> None:
        seen: set = set()
        for x, y in self.pairs:
            if not precedes(x, y):
                raise InvalidMatching(f"{x} does not strictly precede {y}")
            if f(x) != 1 or f(y) != 0:
                raise InvalidMatching(f"({x}, {y}) is not a violation")
            if x in seen or y in seen:
                raise InvalidMatching(f"endpoint reused in ({x}, {y})")
            seen.update((x, y))


def _split(f: DenseFunction) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of 1-points and 0-points, each in rank order."""
    points = f.domain.all_points()
    return points[f.table == 1], points[f.table == 0]


def _dominators(ones: np.ndarray, zeros: np.ndarray, u: int) -> np.ndarray:
    # x <= y coordinate-wise; x != y holds automatically since f differs
    return np.flatnonzero((zeros >= ones[u]).all(axis=1))


def _violation_csr(ones: np.ndarray, zeros: np.ndarray) -> csr_matrix:
    indptr = [0]
    indices = []
    for start in range(0, len(ones), _CHUNK):
        block = (zeros[None, :, :] >= ones[start : start + _CHUNK, None, :]).all(axis=2)
        rows, cols = np.nonzero(block)
        counts = np.bincount(rows, minlength=block.shape[0])
        indptr.extend((indptr[-1] + np.cumsum(counts)).tolist())
        indices.append(cols)
    indices = np.concatenate(indices) if indices else np.empty(0, dtype=np.int64)
    data = np.ones(len(indices), dtype=np.int8)
    return csr_matrix((data, indices, np.asarray(indptr)), shape=(len(ones), len(zeros)))


def _hopcroft_karp(n_left: int, n_right: int, neighbors) -> list[int]:
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    # greedy start; augmenting phases then only repair the remainder
    for u in range(n_left):
        for v in neighbors(u):
            if match_r[v] == -1:
                match_l[u], match_r[v] = v, u
                break

    while True:
        dist = [-1] * n_left
        queue = deque(u for u in range(n_left) if match_l[u] == -1)
        for u in queue:
            dist[u] = 0
        limit = None
        while queue:
            u = queue.popleft()
            if limit is not None and dist[u] >= limit:
                continue
            for v in neighbors(u):
                w = match_r[v]
                if w == -1:
                    if limit is None:
                        limit = dist[u] + 1
                elif dist[w] == -1:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if limit is None:
            return match_l

        for root in range(n_left):
            if match_l[root] != -1 or dist[root] != 0:
                continue
            # iterative layered DFS
            stack = [(root, iter(neighbors(root).tolist()))]
            path: list[tuple[int, int]] = []
            while stack:
                u, it = stack[-1]
                advanced = False
                for v in it:
                    w = match_r[v]
                    if w == -1:
                        if dist[u] + 1 == limit:
                            path.append((u, v))
                            stack.clear()
                            advanced = True
                            break
                    elif dist[w] == dist[u] + 1:
                        path.append((u, v))
                        stack.append((w, iter(neighbors(w).tolist())))
                        advanced = True
                        break
                if not advanced and stack:
                    stack.pop()
                    dist[u] = -1  # dead end for this phase
                    if path:
                        path.pop()
            for u, v in path:
                match_l[u], match_r[v] = v, u


def max_violation_matching(
    f: DenseFunction, engine: str = "csgraph", rng: np.random.Generator | None = None
) -> ViolationMatching:
    """A maximum-cardinality violation matching of a dense function.

    Args:
        f: the function; must fit under the dense cap.
        engine: ``"csgraph"`` or ``"implicit"``.
        rng: when given, vertex order is shuffled so repeated calls can land on
            different maximum matchings.
    """
    f = f.to_dense()
    ones, zeros = _split(f)
    if rng is not None:
        ones = ones[rng.permutation(len(ones))]
        zeros = zeros[rng.permutation(len(zeros))]
    if len(ones) == 0 or len(zeros) == 0:
        return ViolationMatching(f.domain, [])

    if engine == "csgraph":
        graph = _violation_csr(ones, zeros)
        match_l = maximum_bipartite_matching(graph, perm_type="column")
    elif engine == "implicit":
        match_l = _hopcroft_karp(len(ones), len(zeros), lambda u: _dominators(ones, zeros, u))
    else:
        raise ValueError(f"unknown matching engine {engine!r}")

    pairs = [
        (tuple(ones[u].tolist()), tuple(zeros[v].tolist()))
        for u, v in enumerate(match_l)
        if v != -1
    ]
    return ViolationMatching(f.domain, sorted(pairs))


def has_augmenting_path(f: DenseFunction, matching: ViolationMatching) -> bool:
    """Alternating BFS from unmatched 1-points; True if some unmatched 0-point is reachable."""
    ones, zeros = _split(f.to_dense())
    one_index = {tuple(p): i for i, p in enumerate(ones.tolist())}
    zero_index = {tuple(p): i for i, p in enumerate(zeros.tolist())}
    match_l = [-1] * len(ones)
    match_r = [-1] * len(zeros)
    for x, y in matching:
        match_l[one_index[x]] = zero_index[y]
        match_r[zero_index[y]] = one_index[x]
    seen = [False] * len(ones)
    queue = deque(u for u in range(len(ones)) if match_l[u] == -1)
    for u in queue:
        seen[u] = True
    while queue:
        u = queue.popleft()
        for v in _dominators(ones, zeros, u):
            w = match_r[v]
            if w == -1:
                return True
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return False


def distance_to_monotonicity(f: DenseFunction, engine: str = "csgraph") -> Fraction:
    """Exact distance to monotonicity as |M| / |D|."""
    f = f.to_dense()
    return Fraction(len(max_violation_matching(f, engine=engine)), f.domain.total_size)


@functools.lru_cache(maxsize=32)
def monotone_functions(dims: tuple[int, ...]) -> np.ndarray:
    """Every monotone function on the grid, one table per row.

    Points are fixed in rank order, which is a linear extension, so a point
    must be 1 as soon as any immediate predecessor is 1.
    """
    domain = GridDomain(dims)
    size = domain.total_size
    if size > BRUTE_FORCE_MAX_POINTS:
        raise DomainError(
            f"brute force refuses {size} points (limit {BRUTE_FORCE_MAX_POINTS})"
        )
    strides = domain.strides.tolist()
    preds = []
    for r in range(size):
        p = domain.point(r)
        preds.append([r - s for i, s in enumerate(strides) if p[i] > 1])

    found: list[list[int]] = []
    values = [0] * size

    def extend(r: int) -> None:
        if r == size:
            found.append(values.copy())
            if len(found) > BRUTE_FORCE_MAX_IDEALS:
                raise DomainError(
                    f"more than {BRUTE_FORCE_MAX_IDEALS} monotone functions on {dims}"
                )
            return
        forced = any(values[q] for q in preds[r])
        for v in ((1,) if forced else (0, 1)):
            values[r] = v
            extend(r + 1)
        values[r] = 0

    extend(0)
    return np.asarray(found, dtype=np.uint8)


def brute_force_distance(f: DenseFunction) -> Fraction:
    """min over monotone g of the normalised Hamming distance to f."""
    f = f.to_dense()
    table = monotone_functions(f.domain.dims)
    best = int((table != f.table[None, :]).sum(axis=1).min())
    return Fraction(best, f.domain.total_size)
