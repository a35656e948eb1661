"""Lines, slices and stacks of a violation matching.

A line fixes every coordinate except the distinguished axis (axis 0 unless
told otherwise); a slice fixes the distinguished coordinate.  The (line,
slice) stack of a matching holds the pairs whose lower endpoint lies on the
line and whose upper endpoint lies in the slice.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

from .grid import DenseFunction, drop_axis, precedes
from .matching import ViolationMatching

LineId = tuple
SliceId = int


def line_of(point, axis: int = 0) -> LineId:
    return drop_axis(point, axis)


def line_decomposition(matching: ViolationMatching, axis: int = 0) -> dict[LineId, ViolationMatching]:
    """Partition a matching by the line of each lower endpoint."""
    parts: dict[LineId, list] = defaultdict(list)
    for x, y in matching:
        parts[line_of(x, axis)].append((x, y))
    return {
        line: ViolationMatching(matching.domain, sorted(pairs))
        for line, pairs in sorted(parts.items())
    }


@dataclass
class StackProfile:
    counts: dict[tuple[LineId, SliceId], int]

    @property
    def lambda_vector(self) -> list[int]:
        """Nonzero stack sizes, sorted nondecreasing."""
        return sorted(c for c in self.counts.values() if c > 0)

    @property
    def max_stack(self) -> int:
        return max(self.counts.values(), default=0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def stack_key(x, y, axis: int = 0) -> tuple[LineId, SliceId]:
    return line_of(x, axis), y[axis]


def stack_profile(matching: ViolationMatching, axis: int = 0) -> StackProfile:
    counts = Counter(stack_key(x, y, axis) for x, y in matching)
    return StackProfile(dict(counts))


def _improves(removed: list[int], added: list[int]) -> bool:
    """Does replacing stack sizes `removed` by `added` raise the sorted size vector?

    After cancelling common values the new vector is lexicographically larger
    exactly when its smallest changed entry exceeds the old smallest changed
    entry.  Stacks absent from the matching count as size 0.
    """
    old = Counter(removed)
    new = Counter(added)
    common = old & new
    old -= common
    new -= common
    if not old and not new:
        return False
    if not old:
        return True
    if not new:
        return False
    return min(new) > min(old)


def _swap_delta(counts: Counter, pair_a, pair_b, axis: int):
    """Old and new sizes of the stacks touched by rewiring (x,y),(w,z) to (x,z),(w,y)."""
    (x, y), (w, z) = pair_a, pair_b
    delta: Counter = Counter()
    delta[stack_key(x, y, axis)] -= 1
    delta[stack_key(w, z, axis)] -= 1
    delta[stack_key(x, z, axis)] += 1
    delta[stack_key(w, y, axis)] += 1
    touched = [k for k, v in delta.items() if v != 0]
    removed = [counts[k] for k in touched]
    added = [counts[k] + delta[k] for k in touched]
    return removed, added, delta


def _first_improving(pairs, counts, axis):
    for i, (x, y) in enumerate(pairs):
        for j, (w, z) in enumerate(pairs):
            if i == j or not (precedes(x, z) and precedes(z, y)):
                continue
            removed, added, delta = _swap_delta(counts, (x, y), (w, z), axis)
            if _improves(removed, added):
                return i, j, delta
    return None


def find_improving_swap(matching: ViolationMatching, axis: int = 0):
    """First improving swap in the fixed scan order, as indices into the sorted pairs, or None.

    A swap takes (x, y), (w, z) with x < z < y and rewires them to (x, z),
    (w, y).  Both new pairs are violations: f(x)=1, f(z)=0 and w < z < y.
    """
    pairs = sorted(matching.pairs)
    counts = Counter(stack_key(x, y, axis) for x, y in pairs)
    hit = _first_improving(pairs, counts, axis)
    return None if hit is None else hit[:2]


def lex_improve(
    f: DenseFunction, matching: ViolationMatching, axis: int = 0, check: bool = False
) -> ViolationMatching:
    """Local search raising the sorted stack-size vector by single swaps.

    Applies the first improving swap found scanning pairs by lower endpoint,
    until none is left.  Each swap keeps the cardinality and strictly raises
    the vector, so the search terminates.  With ``check`` every intermediate
    matching is re-validated against f.
    """
    pairs = sorted(matching.pairs)
    counts = Counter(stack_key(x, y, axis) for x, y in pairs)
    size = len(pairs)
    while True:
        hit = _first_improving(pairs, counts, axis)
        if hit is None:
            break
        i, j, delta = hit
        (x, y), (w, z) = pairs[i], pairs[j]
        pairs[i], pairs[j] = (x, z), (w, y)
        counts.update(delta)
        counts = +counts
        pairs.sort()
        if check:
            out = ViolationMatching(matching.domain, list(pairs))
            out.validate(f)
            assert len(out) == size
    return ViolationMatching(matching.domain, pairs)


@dataclass
class BoundRow:
    lam: int
    mass: int
    bound: float
    ok: bool

    def as_dict(self) -> dict:
        return {"lambda": self.lam, "mass_at_least_lambda": self.mass, "bound": self.bound, "ok": self.ok}


def stack_bound_check(profile: StackProfile, domain_size: int) -> list[BoundRow]:
    """For each lambda up to the largest stack: mass in stacks >= lambda vs 5|D|/sqrt(lambda)."""
    sizes = profile.lambda_vector
    rows = []
    for lam in range(1, profile.max_stack + 1):
        mass = sum(s for s in sizes if s >= lam)
        bound = 5 * domain_size / math.sqrt(lam)
        rows.append(BoundRow(lam, mass, bound, mass <= bound))
    return rows


@dataclass
class FilteredMatching:
    matching: ViolationMatching
    removed: int
    threshold: float
    # |D| / k^(1/7): the most mass the high stacks may carry under the stack bound
    allowance: float

    @property
    def within_allowance(self) -> bool:
        return self.removed <= self.allowance


def filter_high_stacks(matching: ViolationMatching, k: int, axis: int = 0) -> FilteredMatching:
    """Drop every stack of size >= 26 k^(2/7)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    threshold = 26 * k ** (2 / 7)
    profile = stack_profile(matching, axis)
    high = {key for key, c in profile.counts.items() if c >= threshold}
    kept = [(x, y) for x, y in matching if stack_key(x, y, axis) not in high]
    allowance = matching.domain.total_size / k ** (1 / 7)
    return FilteredMatching(
        ViolationMatching(matching.domain, kept), len(matching) - len(kept), threshold, allowance
    )
