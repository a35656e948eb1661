"""Named test functions and the restriction-variance experiment."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .grid import (
    ArrayFunction,
    BoolFunction,
    ContinuousFunction,
    DenseFunction,
    DomainError,
    GridDomain,
    RestrictionSpec,
    up_closure,
)
from .matching import ViolationMatching
from .seeding import derive_rng

SKEPTIC, SUPPORTER, FANATIC = 0, 1, 2
VARIANCE_EXACT_CAP = 10**6


# -- anti-majority ----------------------------------------------------------

def anti_majority(n: int) -> DenseFunction:
    """f(x, y) = 1 iff x + y <= n on [n]^2."""
    if n < 2:
        raise ValueError("anti_majority needs n >= 2")
    domain = GridDomain.cube(n, 2)
    pts = domain.all_points()
    return DenseFunction(domain, (pts.sum(axis=1) <= n).astype(np.uint8))


def anti_majority_matchings(n: int) -> dict[str, ViolationMatching]:
    """The two reference maximum matchings of anti-majority.

    R sends (x, y) to (n-y+1, n-x+1): every pair from line y lands in slice
    n-y+1, giving stacks n-1, ..., 1.  B sends (x, y) to (x+y, n-x+1): distinct
    slices along each line, so every stack has size 1.
    """
    domain = GridDomain.cube(n, 2)
    ones = [(x, y) for x in range(1, n + 1) for y in range(1, n + 1) if x + y <= n]
    R = [((x, y), (n - y + 1, n - x + 1)) for x, y in ones]
    B = [((x, y), (x + y, n - x + 1)) for x, y in ones]
    return {"R": ViolationMatching(domain, sorted(R)), "B": ViolationMatching(domain, sorted(B))}


# -- the unavoidable-stack example -----------------------------------------

def figure_one(n: int) -> DenseFunction:
    """A function on [n] x [n-1] where some stacks of size >= 2 are forced.

    Reading of the picture used here (x = first coordinate, columns/slices;
    y = second coordinate, rows/lines):

    * slice x = n is all 0 (n-1 points);
    * line y = 1 is 1 for x < n (n-1 points);
    * lines 2..n/2 are 1 for x < n: the lower block, (n-1)(n/2-1) points;
    * lines n/2+1..n-1 are 0 for x < n: the upper block, same size.

    The lower block matches straight up into the upper block and the bottom
    line matches into the last slice, so every 1 is matched.  Only n/2 lines
    carry 1s, so the n-1 pairs ending in the last slice share at most n/2
    stacks and at least n/2 - 1 of them sit in stacks of size >= 2.
    """
    if n < 4 or n % 2:
        raise ValueError("figure_one needs an even n >= 4")
    domain = GridDomain((n, n - 1))
    pts = domain.all_points()
    x, y = pts[:, 0], pts[:, 1]
    ones = (x < n) & (y <= n // 2)
    return DenseFunction(domain, ones.astype(np.uint8))


# -- Centrist ---------------------------------------------------------------

def centrist_labels(x, d: int) -> np.ndarray:
    """Label votes in [0, 1]: skeptic up to 1-2/d, supporter up to 1-1/d, fanatic above."""
    scaled = np.asarray(x, dtype=object if _is_exact(x) else float) * d
    out = np.full(np.shape(scaled), SKEPTIC, dtype=np.int8)
    out[scaled > d - 2] = SUPPORTER
    out[scaled > d - 1] = FANATIC
    return out


def _is_exact(x) -> bool:
    flat = np.asarray(x, dtype=object).ravel()
    return flat.size > 0 and isinstance(flat[0], Fraction)


def centrist_discrete_labels(c, m: int, d: int) -> np.ndarray:
    """Integer analogue on [m d]: top m coordinates fanatic, the m below supporter."""
    n = m * d
    c = np.asarray(c)
    out = np.full(c.shape, SKEPTIC, dtype=np.int8)
    out[c > n - 2 * m] = SUPPORTER
    out[c > n - m] = FANATIC
    return out


def centrist_continuous(d: int) -> ContinuousFunction:
    """1 iff some coordinate is a supporter."""
    if d < 2:
        raise ValueError("centrist needs d >= 2")
    return ContinuousFunction(d, lambda pts: (centrist_labels(pts, d) == SUPPORTER).any(axis=1))


def centrist_discrete(d: int, m: int) -> BoolFunction:
    """Centrist on [m d]^d; dense when small enough, otherwise evaluated by rule."""
    if d < 2 or m < 1:
        raise ValueError("centrist needs d >= 2 and m >= 1")
    domain = GridDomain.cube(m * d, d)

    def rule(pts):
        return (centrist_discrete_labels(pts, m, d) == SUPPORTER).any(axis=1)

    if domain.total_size <= 2**20:
        return DenseFunction(domain, rule(domain.all_points()).astype(np.uint8))
    return ArrayFunction(domain, rule)


def centrist_restriction_is_monotone(spec: RestrictionSpec, d: int, m: int | None = None) -> bool:
    """Monotonicity of Centrist restricted to `spec`, without materialising it.

    A violation needs a coordinate whose samples contain both a supporter and
    a fanatic (the 1 -> 0 step), while every other coordinate offers a
    non-supporter value for the 0 endpoint.  Conversely those choices always
    give a violated pair.  `m` selects the discrete labelling.
    """
    labels = [
        centrist_discrete_labels(t, m, d) if m is not None else centrist_labels(t, d)
        for t in spec.samples
    ]
    has_sup = np.array([(lab == SUPPORTER).any() for lab in labels])
    has_fan = np.array([(lab == FANATIC).any() for lab in labels])
    has_non_sup = np.array([(lab != SUPPORTER).any() for lab in labels])
    for i in range(d):
        if has_sup[i] and has_fan[i] and np.delete(has_non_sup, i).all():
            return False
    return True


def centrist_restriction_ones_fraction(spec: RestrictionSpec, d: int, m: int | None = None) -> Fraction:
    """Fraction of the restricted grid where Centrist is 1."""
    zero = Fraction(1)
    for t in spec.samples:
        lab = centrist_discrete_labels(t, m, d) if m is not None else centrist_labels(t, d)
        zero *= Fraction(int((lab != SUPPORTER).sum()), len(t))
    return 1 - zero


# -- random generators -------------------------------------------------------

def random_function(domain: GridDomain, rng: np.random.Generator, p: float = 0.5) -> DenseFunction:
    return DenseFunction(domain, (rng.random(domain.total_size) < p).astype(np.uint8))


def random_order_ideal(domain: GridDomain, rng: np.random.Generator) -> DenseFunction:
    """Indicator of the up-set generated by a random set of points.

    Points get i.i.d. uniform marks; those below a uniform level seed the
    up-set (its minimal elements form the generating antichain).  Monotone by
    construction.
    """
    marks = rng.random(domain.total_size)
    level = rng.random()
    seeds = (marks < level).reshape(domain.dims)
    return DenseFunction(domain, up_closure(seeds).reshape(-1).astype(np.uint8))


def random_threshold(domain: GridDomain, rng: np.random.Generator) -> DenseFunction:
    """[sum_i w_i x_i >= theta] with nonnegative weights: monotone."""
    w = rng.random(domain.d)
    pts = domain.all_points()
    s = pts @ w
    theta = rng.uniform(s.min(), s.max() + 1e-9)
    return DenseFunction(domain, (s >= theta).astype(np.uint8))


def all_functions(domain: GridDomain):
    """Every Boolean function on a small grid, in binary-counter order."""
    size = domain.total_size
    if size > 20:
        raise DomainError(f"refusing to enumerate 2^{size} functions")
    bits = (np.arange(2**size)[:, None] >> np.arange(size)[None, :]) & 1
    for row in bits.astype(np.uint8):
        yield DenseFunction(domain, row)


# -- variance under k=2 restrictions ----------------------------------------

@dataclass
class VarianceResult:
    """Variances in the +-1 convention: var = 1 - E[g]^2 with g = 1 - 2f.

    In the {0,1} convention the variance is p(1-p), a quarter of these values.
    """

    var_f: Fraction
    mean_var_restricted: Fraction | float
    exact: bool
    combos: int

    @property
    def holds(self) -> bool:
        return self.mean_var_restricted >= self.var_f / 2

    @property
    def slack(self):
        return self.mean_var_restricted - self.var_f / 2


def pm_variance(ones: int, size: int) -> Fraction:
    return Fraction(4 * ones * (size - ones), size * size)


def variance_experiment(
    f: DenseFunction, mode: str = "exact", seed: int = 0, trials: int = 10_000
) -> VarianceResult:
    """var(f) against E_T[var(f_T)] for T_i = two i.i.d. uniform draws per dimension.

    ``exact`` averages over all prod n_i^2 ordered draws; ``monte_carlo``
    samples `trials` of them.
    """
    f = f.to_dense()
    grid = f.grid
    d = f.domain.d
    cube = 2**d
    var_f = pm_variance(int(f.table.sum()), f.domain.total_size)

    if mode == "exact":
        combos = math.prod(n * n for n in f.domain.dims)
        if combos > VARIANCE_EXACT_CAP:
            raise DomainError(
                f"exact mode needs {combos} restriction combinations (cap {VARIANCE_EXACT_CAP})"
            )
        per_dim = [
            np.array([sorted(p) for p in itertools.product(range(n), repeat=2)])
            for n in f.domain.dims
        ]
        total = 0
        for choice in itertools.product(*per_dim):
            c = int(grid[np.ix_(*choice)].sum())
            total += 4 * c * (cube - c)
        return VarianceResult(var_f, Fraction(total, cube * cube * combos), True, combos)

    if mode == "monte_carlo":
        acc = 0.0
        for t in range(trials):
            rng = derive_rng(seed, t)
            choice = [np.sort(rng.integers(0, n, size=2)) for n in f.domain.dims]
            c = int(grid[np.ix_(*choice)].sum())
            acc += 4 * c * (cube - c) / cube**2
        return VarianceResult(var_f, acc / trials, False, trials)

    raise ValueError(f"unknown mode {mode!r}")


# -- registry used by the CLI ------------------------------------------------

FIXTURE_NAMES = (
    "anti_majority",
    "figure_one",
    "centrist_discrete",
    "centrist_continuous",
    "random_order_ideal",
    "random_function",
)


@dataclass
class FixtureSpec:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FIXTURE_NAMES:
            raise ValueError(f"unknown fixture {self.name!r}; choose from {', '.join(FIXTURE_NAMES)}")
        if self.name == "centrist_discrete":
            n, d, m = (self.params.get(key) for key in ("n", "d", "m"))
            if d is None:
                raise ValueError("centrist_discrete needs d")
            if m is None:
                if n is None or n % d:
                    raise ValueError("centrist_discrete needs n a multiple of d (or m)")
                self.params["m"] = n // d

    def build(self):
        p = self.params
        if self.name == "anti_majority":
            return anti_majority(p.get("n", 5))
        if self.name == "figure_one":
            return figure_one(p.get("n", 6))
        if self.name == "centrist_discrete":
            return centrist_discrete(p["d"], p["m"])
        if self.name == "centrist_continuous":
            return centrist_continuous(p.get("d", 16))
        domain = GridDomain.cube(p.get("n", 8), p.get("d", 2))
        rng = np.random.default_rng(p.get("seed", 0))
        if self.name == "random_order_ideal":
            return random_order_ideal(domain, rng)
        return random_function(domain, rng)
