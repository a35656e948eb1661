"""Random sub-grid restrictions, for hypergrids and for product measures on R^d."""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .grid import (
    DENSE_CAP,
    BoolFunction,
    DomainError,
    GridDomain,
    RestrictionSpec,
    restrict,
)
from .matching import distance_to_monotonicity
from .seeding import derive_rng

Quantile = Callable[[np.ndarray], np.ndarray]

_BUILTINS: dict[str, tuple[Quantile, Callable[[np.ndarray], np.ndarray]]] = {
    "uniform": (lambda u: np.asarray(u, dtype=float), lambda x: np.clip(x, 0.0, 1.0)),
    "exponential": (
        lambda u: -np.log1p(-np.asarray(u, dtype=float)),
        lambda x: np.where(np.asarray(x) > 0, -np.expm1(-np.maximum(x, 0)), 0.0),
    ),
    "gaussian": (special.ndtri, special.ndtr),
}


@dataclass
class ProductMeasure:
    """Product of per-coordinate measures, each given by its quantile function.

    `cdfs` is optional; the built-in measures carry closed-form CDFs so tests
    can check partitions against them.
    """

    quantiles: list[Quantile]
    cdfs: list[Callable] | None = None
    names: list[str] | None = None

    @classmethod
    def named(cls, name: str | Sequence[str], d: int | None = None) -> "ProductMeasure":
        names = [name] * d if isinstance(name, str) else list(name)
        unknown = set(names) - set(_BUILTINS)
        if unknown:
            raise ValueError(f"unknown measure(s) {sorted(unknown)}; choose from {sorted(_BUILTINS)}")
        return cls(
            [_BUILTINS[n][0] for n in names], [_BUILTINS[n][1] for n in names], names
        )

    @property
    def d(self) -> int:
        return len(self.quantiles)

    def quantile(self, i: int, u) -> np.ndarray:
        return np.asarray(self.quantiles[i](np.asarray(u, dtype=float)), dtype=float)


def _open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    return rng.uniform(np.nextafter(0.0, 1.0), 1.0, size=size)


def sample_restriction(domain: GridDomain, k: int, rng: np.random.Generator, exhaustive: bool = False) -> RestrictionSpec:
    """T_i = k i.i.d. uniform draws from [n_i], sorted, duplicates kept.

    ``exhaustive`` returns the identity restriction (every coordinate once).
    """
    if exhaustive:
        return RestrictionSpec.identity(domain)
    if k < 1:
        raise ValueError("k must be >= 1")
    return RestrictionSpec(
        [np.sort(rng.integers(1, n + 1, size=k)) for n in domain.dims], trusted=True
    )


def sample_restriction_continuous(
    measure: ProductMeasure, d: int, k: int, rng: np.random.Generator
) -> RestrictionSpec:
    """T_i = k i.i.d. draws from the i-th coordinate measure, via its quantile function."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if measure.d != d:
        raise DomainError(f"measure has {measure.d} coordinates, asked for {d}")
    samples = []
    for i in range(d):
        t = measure.quantile(i, np.sort(_open_uniform(rng, k)))
        if (np.diff(t) < 0).any():
            raise ValueError(f"quantile function of coordinate {i} is not monotone")
        samples.append(t)
    return RestrictionSpec(samples, continuous=True, trusted=True)


def reduction_trial(f: BoolFunction, k: int, rng: np.random.Generator, exhaustive: bool = False) -> Fraction:
    """Exact distance to monotonicity of f restricted to a fresh random [k]^d sub-grid."""
    d = f.domain.d
    size = math.prod(f.domain.dims) if exhaustive else k**d
    if size > DENSE_CAP:
        raise DomainError(f"reduced grid has {size} points; dense cap is {DENSE_CAP}")
    spec = sample_restriction(f.domain, k, rng, exhaustive=exhaustive)
    return distance_to_monotonicity(restrict(f, spec).to_dense())


@dataclass
class DistanceEstimate:
    k: int
    trials: int
    mean: float
    ci95: float
    values: list[Fraction]
    eps_f: Fraction | None = None

    @property
    def exact_mean(self) -> Fraction:
        return sum(self.values, Fraction(0)) / len(self.values)


def estimate_expected_distance(
    f: BoolFunction,
    k: int,
    trials: int,
    seed: int = 0,
    exhaustive: bool = False,
    with_eps_f: bool = False,
) -> DistanceEstimate:
    """Monte Carlo mean of the restricted distance with a normal-approximation 95% CI."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    values = [reduction_trial(f, k, derive_rng(seed, t), exhaustive) for t in range(trials)]
    arr = np.array([float(v) for v in values])
    ci = 1.96 * arr.std(ddof=1) / math.sqrt(trials) if trials > 1 else 0.0
    eps_f = distance_to_monotonicity(f.to_dense()) if with_eps_f else None
    return DistanceEstimate(k, trials, float(arr.mean()), float(ci), values, eps_f)


@dataclass
class EqualMeasurePartition:
    """Per coordinate, N + 1 endpoints of N intervals of measure 1/N each.

    The outer endpoints are always -inf and +inf.
    """

    endpoints: list[np.ndarray]
    N: int

    @property
    def d(self) -> int:
        return len(self.endpoints)


def equal_measure_partition(measure: ProductMeasure, N: int) -> EqualMeasurePartition:
    if N < 1:
        raise ValueError("N must be >= 1")
    endpoints = []
    theta = np.array([j / N for j in range(1, N)])
    for i in range(measure.d):
        inner = measure.quantile(i, theta) if N > 1 else np.empty(0)
        ends = np.concatenate(([-np.inf], inner, [np.inf]))
        if (np.diff(ends) < 0).any():
            raise ValueError(f"quantile function of coordinate {i} is not monotone")
        endpoints.append(ends)
    return EqualMeasurePartition(endpoints, N)


def box_index(partition: EqualMeasurePartition, x: Sequence[float]) -> tuple[int, ...]:
    """Lexicographically least cell z in [N]^d whose closed box contains x."""
    if len(x) != partition.d:
        raise DomainError(f"point has dimension {len(x)}, partition has {partition.d}")
    out = []
    for xi, ends in zip(x, partition.endpoints):
        if not math.isfinite(xi):
            raise ValueError("box_index needs a finite point")
        # closed intervals: a shared endpoint goes to the lower cell
        out.append(bisect.bisect_left(ends[1:-1].tolist(), xi) + 1)
    return tuple(out)
