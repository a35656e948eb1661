"""One-sided, non-adaptive monotonicity testers built on domain reduction.

The outer tester repeatedly restricts f to a random [k]^d sub-grid and runs an
inner grid tester on the lazy restriction, with repetition counts and
thresholds taken from a work-investment schedule.  Inner testers are plain
callables ``(oracle, eps, rng) -> TesterVerdict``; any rejection must carry a
violated pair, so monotone inputs are accepted with certainty.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .grid import BoolFunction, ContinuousFunction, RestrictionSpec, restrict
from .reduction import ProductMeasure, sample_restriction, sample_restriction_continuous
from .seeding import derive_rng

log = logging.getLogger(__name__)

_warned_clamps: set = set()


class ConfigError(ValueError):
    pass


@dataclass
class TesterVerdict:
    verdict: str
    witness: tuple | None = None
    queries_used: int = 0
    raw_queries: int = 0
    queried: np.ndarray | None = field(default=None, repr=False)

    @property
    def rejected(self) -> bool:
        return self.verdict == "reject"

    def __post_init__(self):
        if self.verdict not in ("accept", "reject"):
            raise ValueError(f"verdict must be accept or reject, got {self.verdict!r}")
        if self.verdict == "reject":
            if self.witness is None:
                raise ValueError("a rejection needs a witness pair")
            x, y = self.witness
            if not (all(a <= b for a, b in zip(x, y)) and tuple(x) != tuple(y)):
                raise ValueError(f"witness {self.witness} is not an ordered pair")


InnerTester = Callable[..., TesterVerdict]


def pair_rounds(eps: float, d: int, k: int, c: float = 4.0) -> int:
    """ceil(c d ln(k) / eps)."""
    return max(1, math.ceil(c * d * math.log(k) / eps))


def baseline_pair_tester(oracle: BoolFunction, eps: float, rng: np.random.Generator, c: float = 4.0) -> TesterVerdict:
    """Axis-parallel pair tester.

    Each round picks a uniform point x, a uniform dimension j and a uniform
    value v, sets y = x with coordinate j replaced by v, orders the two points
    and rejects if the lower one is 1 and the upper one 0.  All rounds are
    drawn before any value is read.
    """
    if not 0 < eps < 1:
        raise ConfigError("eps must lie in (0, 1)")
    dims = np.asarray(oracle.domain.dims, dtype=np.int64)
    d = len(dims)
    m = pair_rounds(eps, d, int(dims.max()), c)
    x = rng.integers(1, dims + 1, size=(m, d))
    j = rng.integers(0, d, size=m)
    v = rng.integers(1, dims[j] + 1)
    rows = np.arange(m)
    xj = x[rows, j]
    lo = x.copy()
    hi = x
    lo[rows, j] = np.minimum(xj, v)
    hi[rows, j] = np.maximum(xj, v)

    mark = oracle.log.mark()
    values = oracle.evaluate(np.concatenate([lo, hi]))
    distinct = len(oracle.log.distinct_since(mark))
    bad = np.flatnonzero((values[:m] == 1) & (values[m:] == 0))
    if len(bad):
        r = bad[0]
        witness = (tuple(lo[r].tolist()), tuple(hi[r].tolist()))
        return TesterVerdict("reject", witness, distinct, 2 * m)
    return TesterVerdict("accept", None, distinct, 2 * m)


INNER_TESTERS: dict[str, InnerTester] = {"pair": baseline_pair_tester}


def _exact(eps) -> Fraction:
    return eps if isinstance(eps, Fraction) else Fraction(repr(eps)) if isinstance(eps, float) else Fraction(eps)


@dataclass(frozen=True)
class Level:
    ell: int
    repetitions: int
    threshold: float


def num_levels(eps) -> int:
    """L = ceil(log2(2 / eps)), computed exactly."""
    e = _exact(eps)
    L = 0
    while 2**L * e < 2:
        L += 1
    return L


def work_investment_levels(eps) -> list[Level]:
    """Levels 1..L+1 with Q = ceil(32 l^2 / (2^l eps)) repetitions at threshold 2^-l.

    Pure arithmetic; eps = 1 is allowed here (L = 1) although testers need eps < 1.
    """
    e = _exact(eps)
    if not 0 < e <= 1:
        raise ConfigError("eps must lie in (0, 1]")
    L = num_levels(e)
    out = []
    for ell in range(1, L + 2):
        q = Fraction(32 * ell * ell) / (2**ell * e)
        out.append(Level(ell, math.ceil(q), 1 / 2**ell))
    return out


def schedule_cost(eps) -> float:
    """sum over levels of Q_l / eps_l^(4/3), the eps-dependence of the total query count."""
    return sum(lv.repetitions / lv.threshold ** (4 / 3) for lv in work_investment_levels(eps))


@dataclass
class TesterConfig:
    epsilon: float
    k: int | None = None
    C: float = 1.0
    k_max: int = 2**12
    inner: str = "pair"
    inner_c: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.k is not None and self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if self.k_max < 2:
            raise ConfigError("k_max must be >= 2")
        if self.inner not in INNER_TESTERS:
            raise ConfigError(f"unknown inner tester {self.inner!r}")

    def resolve_k(self, d: int) -> int:
        """Explicit k, else (2 C d / eps)^7 clamped to k_max."""
        if self.k is not None:
            return self.k
        ideal = (2 * self.C * d / self.epsilon) ** 7
        k = max(2, min(self.k_max, math.ceil(ideal)))
        if k < ideal and (d, self.epsilon, self.k_max) not in _warned_clamps:
            _warned_clamps.add((d, self.epsilon, self.k_max))
            log.warning(
                "k clamped from %.3g to %d (d=%d, eps=%g); the reduction guarantee "
                "no longer applies at this k",
                ideal, k, d, self.epsilon,
            )
        return k

    @property
    def levels(self) -> list[Level]:
        return work_investment_levels(self.epsilon)


def levin_tester(
    f,
    config: TesterConfig,
    measure: ProductMeasure | None = None,
    early_exit: bool = True,
) -> TesterVerdict:
    """Domain reduction plus work investment around an inner grid tester.

    `f` is a grid function (BoolFunction) or a ContinuousFunction together with
    a product measure.  Every (level, repetition) call draws its randomness
    from its own derived stream, restriction first, so the query set depends
    only on the seed, config and domain shape.  With ``early_exit=False`` all
    calls run even after a rejection; the first witness is reported.
    """
    if isinstance(f, BoolFunction):
        d = f.domain.d
        continuous = False
    elif isinstance(f, ContinuousFunction):
        if measure is None:
            raise ConfigError("a continuous function needs a product measure")
        d = f.d
        continuous = True
    else:
        raise TypeError(f"cannot test {type(f).__name__}")
    k = config.resolve_k(d)
    inner = INNER_TESTERS[config.inner]

    mark = f.log.mark()
    raw = 0
    witness = None
    call = 0
    for level in config.levels:
        for _ in range(level.repetitions):
            rng = derive_rng(config.seed, call)
            call += 1
            if continuous:
                spec = sample_restriction_continuous(measure, d, k, rng)
            else:
                spec = sample_restriction(f.domain, k, rng)
            verdict = inner(restrict(f, spec), level.threshold, rng, c=config.inner_c)
            raw += verdict.raw_queries
            if verdict.rejected and witness is None:
                witness = _translate(spec, verdict.witness)
                if early_exit:
                    break
        if witness is not None and early_exit:
            break

    queried = f.log.distinct_since(mark)
    return TesterVerdict(
        "reject" if witness else "accept", witness, len(queried), raw, queried
    )


def _translate(spec: RestrictionSpec, witness) -> tuple:
    lo, hi = spec.to_original(list(witness))
    return tuple(lo.tolist()), tuple(hi.tolist())
