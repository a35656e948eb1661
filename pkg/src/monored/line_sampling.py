"""Per-line weights and the Hall-deficit formula for sampled sub-lines.

A line's sub-matching induces two weight sequences on [n]: w_plus(i) counts
lower endpoints with distinguished coordinate i, w_minus(j) counts upper
endpoints in slice j.  For a sample multiset T the bipartite graph G_T joins
i to j whenever i <= j, and its maximum weighted matching has a closed form:
total minus-weight in T less the largest prefix excess.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .matching import ViolationMatching
from .stacks import LineId, line_of
from .seeding import derive_rng


class WeightInvariantError(AssertionError):
    """Weights violate an invariant every valid line sub-matching satisfies."""


@dataclass
class LineWeights:
    w_plus: np.ndarray
    w_minus: np.ndarray
    lambda_cap: int

    def __post_init__(self):
        self.w_plus = np.asarray(self.w_plus, dtype=np.int64)
        self.w_minus = np.asarray(self.w_minus, dtype=np.int64)
        if self.w_plus.shape != self.w_minus.shape:
            raise ValueError("weight arrays must have equal length")

    @property
    def n(self) -> int:
        return len(self.w_plus)

    @property
    def size(self) -> int:
        """|M^(line)|, the number of pairs that produced these weights."""
        return int(self.w_minus.sum())

    def check(self) -> None:
        if (self.w_plus > 1).any():
            raise WeightInvariantError("two lower endpoints share a position on one line")
        if (self.w_minus > self.lambda_cap).any():
            raise WeightInvariantError("a slice carries more than lambda_cap upper endpoints")
        if (np.cumsum(self.w_minus - self.w_plus) > 0).any():
            raise WeightInvariantError("some prefix holds more upper than lower endpoints")


def weights_from_line(
    matching: ViolationMatching, line: LineId, axis: int = 0, check: bool = True
) -> LineWeights:
    n = matching.domain.dims[axis]
    w_plus = np.zeros(n, dtype=np.int64)
    w_minus = np.zeros(n, dtype=np.int64)
    for x, y in matching:
        if line_of(x, axis) == tuple(line):
            w_plus[x[axis] - 1] += 1
            w_minus[y[axis] - 1] += 1
    weights = LineWeights(w_plus, w_minus, int(w_minus.max(initial=0)))
    if check:
        weights.check()
    return weights


@dataclass
class SampleTrace:
    sample: list[int]
    prefix: list[int]
    nu: int


def trace_sample(w: LineWeights, sample) -> SampleTrace:
    """Prefix excess Z_t at every sampled position (1-based indices, sorted)."""
    t = sorted(int(s) for s in sample)
    idx = np.asarray(t, dtype=np.int64) - 1
    excess = np.cumsum(w.w_minus[idx] - w.w_plus[idx])
    total = int(w.w_minus[idx].sum())
    # the empty subset has deficit 0, so the maximum is clamped there
    deficit = max(0, int(excess.max(initial=0)))
    return SampleTrace(t, excess.tolist(), total - deficit)


def hall_matching_size(w: LineWeights, sample) -> int:
    """nu(G_T) = sum of minus-weights in T minus max(0, max_t Z_t).

    Duplicate indices are separate entries; their prefix sums accumulate every
    copy, which gives the same maximum as grouping copies.
    """
    return trace_sample(w, sample).nu


def brute_force_w_matching(w: LineWeights, sample) -> int:
    """Maximum w-matching of G_T by unit expansion and bipartite matching."""
    t = sorted(int(s) for s in sample)
    left = [s for s in t for _ in range(int(w.w_plus[s - 1]))]
    right = [s for s in t for _ in range(int(w.w_minus[s - 1]))]
    if not left or not right:
        return 0
    rows, cols = [], []
    for a, i in enumerate(left):
        for b, j in enumerate(right):
            if i <= j:
                rows.append(a)
                cols.append(b)
    if not rows:
        return 0
    graph = csr_matrix(
        (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(len(left), len(right))
    )
    return int((maximum_bipartite_matching(graph, perm_type="column") >= 0).sum())


def line_sampling_bound(size: int, n: int, k: int, lam: int) -> float:
    """(k/n)|M^(line)| - 3 lambda sqrt(k ln k)."""
    return k / n * size - 3 * lam * math.sqrt(k * math.log(k))


@dataclass
class LineSampleStats:
    k: int
    mean_nu: float
    ci95: float
    bound: float
    tail_freq: float
    exact: Fraction | None = None

    @property
    def holds(self) -> bool:
        mean = self.exact if self.exact is not None else self.mean_nu
        return mean >= self.bound

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "mean_nu": self.mean_nu,
            "ci95": self.ci95,
            "bound": self.bound,
            "tail_freq": self.tail_freq,
        }


def _multisets(n: int, k: int):
    """Sorted k-multisets of [n] with their probability under k i.i.d. uniform draws."""
    total = n**k
    for combo in itertools.combinations_with_replacement(range(1, n + 1), k):
        ways = math.factorial(k)
        for _, grp in itertools.groupby(combo):
            ways //= math.factorial(len(list(grp)))
        yield combo, Fraction(ways, total)


def line_sampling_experiment(
    w: LineWeights, k: int, trials: int = 1000, seed: int = 0, exhaustive: bool = False
) -> LineSampleStats:
    """Estimate E_T[nu(G_T)] for T of k i.i.d. uniform indices of [n].

    ``exhaustive`` averages exactly over all k-multisets instead of sampling.
    Also reports how often max_t Z_t exceeds 2 lambda sqrt(k ln k).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    n = w.n
    lam = w.lambda_cap
    bound = line_sampling_bound(w.size, n, k, lam)
    tail_level = 2 * lam * math.sqrt(k * math.log(k))

    if exhaustive:
        mean = Fraction(0)
        tail = Fraction(0)
        for combo, prob in _multisets(n, k):
            tr = trace_sample(w, combo)
            mean += prob * tr.nu
            if max(tr.prefix) > tail_level:
                tail += prob
        return LineSampleStats(k, float(mean), 0.0, bound, float(tail), exact=mean)

    if trials < 1:
        raise ValueError("trials must be >= 1")
    samples = np.sort(
        np.stack([derive_rng(seed, i).integers(1, n + 1, size=k) for i in range(trials)]), axis=1
    )
    idx = samples - 1
    diff = w.w_minus[idx] - w.w_plus[idx]
    prefix = np.cumsum(diff, axis=1)
    nu = w.w_minus[idx].sum(axis=1) - np.maximum(prefix.max(axis=1), 0)
    mean = float(nu.mean())
    ci = 1.96 * float(nu.std(ddof=1)) / math.sqrt(trials) if trials > 1 else float("inf")
    tail = float((prefix.max(axis=1) > tail_level).mean())
    return LineSampleStats(k, mean, ci, bound, tail)
