"""Hypergrid domains, Boolean functions over them, and lazy restrictions.

Points are plain tuples of 1-based integer coordinates.  Internally every
point also has a 0-based lexicographic rank (last coordinate varies fastest),
which is what dense tables and query logs are keyed by.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np

DENSE_CAP = 2**26
_INT_LIMIT = np.iinfo(np.int64).max

GridPoint = tuple


class DomainError(ValueError):
    """Raised on incompatible domains, out-of-range points or oversize grids."""


class Ordering(Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class GridDomain:
    """The rectangular hypergrid [n_1] x ... x [n_d]."""

    dims: tuple[int, ...]

    def __init__(self, dims: Sequence[int]):
        dims = tuple(int(n) for n in dims)
        if not dims:
            raise DomainError("a grid needs at least one dimension")
        if any(n < 1 for n in dims):
            raise DomainError(f"every side length must be >= 1, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def cube(cls, n: int, d: int) -> "GridDomain":
        return cls((n,) * d)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def total_size(self) -> int:
        return math.prod(self.dims)

    @property
    def rank_safe(self) -> bool:
        """Whether ranks fit in int64; huge grids exist only as lazy index spaces."""
        return self.total_size <= _INT_LIMIT

    @property
    def strides(self) -> np.ndarray:
        strides = np.ones(self.d, dtype=np.int64)
        for i in range(self.d - 2, -1, -1):
            strides[i] = strides[i + 1] * self.dims[i + 1]
        return strides

    def __contains__(self, point) -> bool:
        return len(point) == self.d and all(1 <= c <= n for c, n in zip(point, self.dims))

    def check_point(self, point) -> None:
        if len(point) != self.d:
            raise DomainError(f"point {point} has dimension {len(point)}, domain has {self.d}")
        if point not in self:
            raise DomainError(f"point {point} lies outside {self.dims}")

    def rank(self, point) -> int:
        r = 0
        for c, n in zip(point, self.dims):
            r = r * n + (c - 1)
        return r

    def point(self, rank: int) -> GridPoint:
        coords = []
        for n in reversed(self.dims):
            rank, c = divmod(rank, n)
            coords.append(c + 1)
        return tuple(reversed(coords))

    def ranks(self, points: np.ndarray) -> np.ndarray:
        """Vectorised rank of an (m, d) array of 1-based points."""
        if not self.rank_safe:
            raise DomainError(f"grid {self.dims} is too large for int64 ranks")
        points = np.asarray(points, dtype=np.int64)
        return (points - 1) @ self.strides

    def points_of(self, ranks: np.ndarray) -> np.ndarray:
        ranks = np.asarray(ranks, dtype=np.int64)
        return np.stack(np.unravel_index(ranks, self.dims), axis=-1).astype(np.int64) + 1

    def all_points(self) -> np.ndarray:
        """All points as an (N, d) array in rank order."""
        self.require_dense()
        return self.points_of(np.arange(self.total_size))

    def __iter__(self) -> Iterator[GridPoint]:
        for r in range(self.total_size):
            yield self.point(r)

    def require_dense(self) -> None:
        if self.total_size > DENSE_CAP:
            raise DomainError(
                f"grid {self.dims} has {self.total_size} points; dense cap is {DENSE_CAP}"
            )


def comparable(x: Sequence[int], y: Sequence[int]) -> Ordering:
    """Compare two points in the coordinate-wise partial order."""
    if len(x) != len(y):
        raise DomainError(f"incompatible dimensions {len(x)} and {len(y)}")
    le = all(a <= b for a, b in zip(x, y))
    ge = all(a >= b for a, b in zip(x, y))
    if le and ge:
        return Ordering.EQUAL
    if le:
        return Ordering.LESS
    if ge:
        return Ordering.GREATER
    return Ordering.INCOMPARABLE


def precedes(x: Sequence[int], y: Sequence[int]) -> bool:
    """Strict dominance x < y."""
    return comparable(x, y) is Ordering.LESS


def drop_axis(point: Sequence, axis: int = 0) -> tuple:
    """Projection that forgets one coordinate (identifies the line through `point`)."""
    return tuple(point[:axis]) + tuple(point[axis + 1 :])


class QueryLog:
    """Records queried keys; the count reported is the number of distinct keys."""

    def __init__(self):
        self._chunks: list[np.ndarray] = []
        self.raw = 0

    def mark(self) -> int:
        return len(self._chunks)

    def distinct_since(self, mark: int) -> np.ndarray:
        chunks = self._chunks[mark:]
        if not chunks:
            return np.empty((0,), dtype=np.int64)
        keys = np.concatenate(chunks)
        return np.unique(keys, axis=0 if keys.ndim > 1 else None)

    def add(self, keys: np.ndarray) -> None:
        keys = np.asarray(keys)
        self.raw += len(keys)
        if len(keys):
            self._chunks.append(keys.copy())

    def distinct(self) -> np.ndarray:
        return self.distinct_since(0)

    def __len__(self) -> int:
        return len(self.distinct())

    def clear(self) -> None:
        self._chunks.clear()
        self.raw = 0


class BoolFunction:
    """A {0,1}-valued function on a grid, queried point-wise or in batches.

    Subclasses implement `_evaluate` on an (m, d) array of 1-based points.
    Every evaluation is logged; `query_count` is the number of distinct points
    touched so far.
    """

    domain: GridDomain

    def __init__(self, domain: GridDomain):
        self.domain = domain
        self.log = QueryLog()

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        if points.shape[1] != self.domain.d:
            raise DomainError(f"expected points of dimension {self.domain.d}")
        if len(points) == 0:
            return np.empty(0, dtype=np.uint8)
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        if (lo < 1).any() or (hi > np.asarray(self.domain.dims)).any():
            raise DomainError(f"query outside {self.domain.dims}")
        return self._logged(points)

    def _logged(self, points: np.ndarray) -> np.ndarray:
        """Log and answer points already known to lie in the domain."""
        self.log.add(self.domain.ranks(points) if self.domain.rank_safe else points)
        return self._evaluate(points)

    def __call__(self, point) -> int:
        return int(self.evaluate([tuple(point)])[0])

    @property
    def query_count(self) -> int:
        return len(self.log)

    def queried_points(self) -> set:
        keys = self.log.distinct()
        if keys.ndim == 2:
            return {tuple(p) for p in keys.tolist()}
        return {self.domain.point(int(r)) for r in keys}

    def to_dense(self) -> "DenseFunction":
        self.domain.require_dense()
        values = self.evaluate(self.domain.all_points())
        return DenseFunction(self.domain, values)


class DenseFunction(BoolFunction):
    """Function stored as a flat table in rank order."""

    def __init__(self, domain: GridDomain, table):
        domain.require_dense()
        super().__init__(domain)
        table = np.asarray(table).reshape(-1)
        if table.size != domain.total_size:
            raise DomainError(f"table has {table.size} entries, domain has {domain.total_size}")
        if not np.isin(table, (0, 1)).all():
            raise ValueError("function values must be 0 or 1")
        self.table = table.astype(np.uint8)
        self.table.flags.writeable = False

    @classmethod
    def from_predicate(cls, domain: GridDomain, pred: Callable[..., bool]) -> "DenseFunction":
        return cls(domain, [1 if pred(*p) else 0 for p in domain])

    @property
    def grid(self) -> np.ndarray:
        """The table reshaped to a d-dimensional array (index = coordinate - 1)."""
        return self.table.reshape(self.domain.dims)

    def _evaluate(self, points):
        return self.table[self.domain.ranks(points)]

    def to_dense(self) -> "DenseFunction":
        return self

    def flipped(self) -> "DenseFunction":
        return DenseFunction(self.domain, 1 - self.table)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseFunction):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.table, other.table)

    __hash__ = None

    def __repr__(self) -> str:
        return f"DenseFunction({self.domain.dims}, ones={int(self.table.sum())})"


class OracleFunction(BoolFunction):
    """Black-box function with a memoization cache keyed by point.

    The cache makes repeated queries free; writes are idempotent so concurrent
    readers at worst compute a value twice.
    """

    def __init__(self, domain: GridDomain, fn: Callable[[tuple], int]):
        super().__init__(domain)
        self._fn = fn
        self._cache: dict[tuple, int] = {}

    def _evaluate(self, points):
        out = np.empty(len(points), dtype=np.uint8)
        for i, p in enumerate(points.tolist()):
            key = tuple(p)
            v = self._cache.get(key)
            if v is None:
                v = int(self._fn(key))
                if v not in (0, 1):
                    raise ValueError(f"oracle returned {v!r} at {key}")
                self._cache[key] = v
            out[i] = v
        return out


class ArrayFunction(BoolFunction):
    """Function given by a vectorised rule on (m, d) point arrays; nothing is tabulated."""

    def __init__(self, domain: GridDomain, fn: Callable[[np.ndarray], np.ndarray]):
        super().__init__(domain)
        self._fn = fn

    def _evaluate(self, points):
        return np.asarray(self._fn(points)).astype(np.uint8)


class ContinuousFunction:
    """Queryable Boolean function on R^d.

    `fn` maps an (m, d) float array to m values in {0,1}.  Queried points are
    logged so tester runs can report distinct queries.
    """

    def __init__(self, d: int, fn: Callable[[np.ndarray], np.ndarray]):
        self.d = d
        self._fn = fn
        self.log = QueryLog()

    def evaluate(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.d:
            raise DomainError(f"expected points of dimension {self.d}")
        return self._logged(points)

    def _logged(self, points: np.ndarray) -> np.ndarray:
        self.log.add(points)
        values = np.asarray(self._fn(points)).astype(np.uint8)
        if values.size and values.max() > 1:
            raise ValueError("function values must be 0 or 1")
        return values

    def __call__(self, point) -> int:
        return int(self.evaluate([point])[0])

    @property
    def query_count(self) -> int:
        return len(self.log)

    def queried_points(self) -> set:
        return {tuple(p) for p in self.log.distinct().tolist()}


@dataclass
class RestrictionSpec:
    """Per-dimension sorted sample multisets defining a reduced grid.

    Duplicates are kept as distinct, adjacent indices.  Samples are integer
    coordinates for grid inputs and reals for continuous inputs.
    """

    samples: list[np.ndarray]
    continuous: bool = field(default=False)
    # set by samplers that already emit sorted arrays of the right dtype
    trusted: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.trusted:
            return
        cleaned = []
        for t in self.samples:
            t = np.asarray(t, dtype=float if self.continuous else np.int64)
            if t.ndim != 1 or t.size == 0:
                raise DomainError("each sample list must be a non-empty 1-d sequence")
            if (np.diff(t) < 0).any():
                raise DomainError("sample lists must be sorted nondecreasing")
            cleaned.append(t)
        self.samples = cleaned

    @classmethod
    def identity(cls, domain: GridDomain) -> "RestrictionSpec":
        return cls([np.arange(1, n + 1) for n in domain.dims])

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.samples)

    @property
    def domain(self) -> GridDomain:
        return GridDomain(self.sizes)

    def to_original(self, index_points: np.ndarray) -> np.ndarray:
        """Map (m, d) 1-based index vectors to original coordinates."""
        index_points = np.atleast_2d(np.asarray(index_points, dtype=np.int64))
        cols = [t[index_points[:, i] - 1] for i, t in enumerate(self.samples)]
        return np.stack(cols, axis=1)


class RestrictedFunction(BoolFunction):
    """Lazy restriction f_T: index vector z -> f(t_{1,z_1}, ..., t_{d,z_d}).

    Nothing is materialised; each batch is mapped to original coordinates and
    forwarded to the underlying function, whose own log counts distinct
    original points.
    """

    def __init__(self, base, spec: RestrictionSpec):
        super().__init__(spec.domain)
        if isinstance(base, BoolFunction):
            if spec.continuous:
                raise DomainError("grid functions need integer restriction samples")
            if len(spec.samples) != base.domain.d:
                raise DomainError("restriction dimension does not match the function")
            for t, n in zip(spec.samples, base.domain.dims):
                if t[0] < 1 or t[-1] > n:
                    raise DomainError(f"sample coordinate outside [1, {n}]")
        elif isinstance(base, ContinuousFunction):
            if len(spec.samples) != base.d:
                raise DomainError("restriction dimension does not match the function")
        else:
            raise TypeError(f"cannot restrict {type(base).__name__}")
        self.base = base
        self.spec = spec
        # memo of answered index vectors, as sorted ranks with their values
        self._seen = np.empty(0, dtype=np.int64)
        self._seen_values = np.empty(0, dtype=np.uint8)

    def _evaluate(self, points):
        """Forward each distinct, not yet answered index vector to the base exactly once."""
        if not self.domain.rank_safe:
            uniq, inverse = np.unique(points, axis=0, return_inverse=True)
            return self._forward(uniq)[inverse.reshape(-1)]
        ranks = self.domain.ranks(points)
        uniq, inverse = np.unique(ranks, return_inverse=True)
        inverse = inverse.reshape(-1)
        if len(self._seen) == 0:
            self._seen = uniq
            self._seen_values = self._forward(self.domain.points_of(uniq))
            return self._seen_values[inverse]
        values = np.empty(len(uniq), dtype=np.uint8)
        pos = np.searchsorted(self._seen, uniq)
        hit = pos < len(self._seen)
        hit[hit] = self._seen[pos[hit]] == uniq[hit]
        values[hit] = self._seen_values[pos[hit]]
        miss = ~hit
        if miss.any():
            values[miss] = self._forward(self.domain.points_of(uniq[miss]))
            merged = np.concatenate([self._seen, uniq[miss]])
            order = np.argsort(merged, kind="stable")
            self._seen = merged[order]
            self._seen_values = np.concatenate([self._seen_values, values[miss]])[order]
        return values[inverse]

    def _forward(self, points):
        # samples were range-checked when the restriction was built
        return np.asarray(self.base._logged(self.spec.to_original(points)), dtype=np.uint8)

    def to_original(self, point) -> tuple:
        orig = self.spec.to_original([point])[0]
        return tuple(orig.tolist())


def restrict(f, spec: RestrictionSpec) -> RestrictedFunction:
    return RestrictedFunction(f, spec)


def is_monotone(f: DenseFunction) -> bool:
    """True iff f never decreases along any single-coordinate successor edge."""
    grid = f.to_dense().grid.astype(np.int8)
    return all((np.diff(grid, axis=i) >= 0).all() for i in range(grid.ndim))


def up_closure(grid: np.ndarray) -> np.ndarray:
    """Smallest up-set containing the True cells of a d-dimensional boolean array."""
    out = grid.astype(bool)
    for axis in range(out.ndim):
        out = np.logical_or.accumulate(out, axis=axis)
    return out


def dumps(f: DenseFunction) -> str:
    """Text format: header `d n_1 ... n_d`, then one line of 0/1 in rank order."""
    header = " ".join(str(v) for v in (f.domain.d, *f.domain.dims))
    return header + "\n" + "".join("1" if v else "0" for v in f.table) + "\n"


def loads(text: str) -> DenseFunction:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if len(lines) != 2:
        raise ValueError("expected a header line and a value line")
    head = [int(tok) for tok in lines[0].split()]
    if not head or head[0] != len(head) - 1:
        raise ValueError(f"malformed header {lines[0]!r}")
    domain = GridDomain(head[1:])
    body = lines[1]
    if len(body) != domain.total_size:
        raise ValueError(f"value line has {len(body)} entries, expected {domain.total_size}")
    if set(body) - {"0", "1"}:
        raise ValueError("value line may contain only 0 and 1")
    return DenseFunction(domain, np.frombuffer(body.encode(), dtype=np.uint8) - ord("0"))
