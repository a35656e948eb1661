"""The acceptance suite: eleven checks with fixed parameters, tolerances and time caps.

Run with ``python -m monored accept`` (optionally ``--filter <word>``) or call
`run_suite` directly.  Every check returns a `CriterionResult`; a check that
overruns its wall-clock cap fails.
"""
from __future__ import annotations

import math
import signal
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .experiments import centrist_nonmonotone_flags
from .fixtures import (
    all_functions,
    anti_majority,
    anti_majority_matchings,
    centrist_continuous,
    centrist_discrete,
    figure_one,
    random_function,
    random_order_ideal,
    random_threshold,
    variance_experiment,
)
from .grid import GridDomain, is_monotone
from .line_sampling import (
    LineWeights,
    brute_force_w_matching,
    hall_matching_size,
    line_sampling_experiment,
    weights_from_line,
)
from .matching import brute_force_distance, distance_to_monotonicity, max_violation_matching
from .reduction import ProductMeasure, estimate_expected_distance
from .seeding import derive_rng
from .stacks import lex_improve, line_decomposition, stack_bound_check, stack_key, stack_profile
from .testers import TesterConfig, levin_tester

# Tester one-sidedness sweep; one-sidedness holds at any eps, this one keeps the sweep inside its cap.
ONE_SIDED_EPS = 0.75


class CriterionTimeout(Exception):
    pass


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime: float
    limit: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.number:2d}] {self.name} ({self.runtime:.2f}s / {self.limit:.0f}s): {self.detail}"

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Criterion:
    number: int
    name: str
    tags: tuple[str, ...]
    limit: float
    check: Callable[[], tuple[bool, str]]

    def matches(self, word: str | None) -> bool:
        if not word:
            return True
        word = word.lower()
        return word == str(self.number) or word in self.name or any(word in t for t in self.tags)


@contextmanager
def _deadline(seconds: float):
    """Raise CriterionTimeout after `seconds` (main thread on POSIX only; otherwise post-hoc)."""
    usable = hasattr(signal, "SIGALRM") and threading.current_thread() is threading.main_thread()
    if not usable:
        yield
        return

    def fire(signum, frame):
        raise CriterionTimeout(f"exceeded {seconds:.0f}s")

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def run_criterion(c: Criterion) -> CriterionResult:
    start = time.perf_counter()
    try:
        with _deadline(c.limit):
            passed, detail = c.check()
    except CriterionTimeout as exc:
        passed, detail = False, str(exc)
    runtime = time.perf_counter() - start
    if runtime >= c.limit:
        passed = False
        detail += f"; runtime {runtime:.1f}s over the {c.limit:.0f}s cap"
    return CriterionResult(c.number, c.name, passed, detail, runtime, c.limit)


# -- the checks ----------------------------------------------------------------

def check_distance_oracle(distance=distance_to_monotonicity) -> tuple[bool, str]:
    """Matching distance equals brute-force distance on every function of [3]^2 and [2]^3."""
    mismatches = 0
    total = 0
    for dims in ((3, 3), (2, 2, 2)):
        for f in all_functions(GridDomain(dims)):
            total += 1
            if distance(f) != brute_force_distance(f):
                mismatches += 1
    return mismatches == 0, f"{total} functions, {mismatches} mismatches"


def check_anti_majority() -> tuple[bool, str]:
    f = anti_majority(5)
    eps = distance_to_monotonicity(f)
    ms = anti_majority_matchings(5)
    for m in ms.values():
        m.validate(f)
    r_profile = stack_profile(ms["R"]).lambda_vector
    b_profile = stack_profile(ms["B"]).lambda_vector
    ok = (
        eps == Fraction(2, 5)
        and len(ms["R"]) == len(ms["B"]) == 10
        and r_profile == [1, 2, 3, 4]
        and max(b_profile) <= 1
    )
    return ok, f"eps={eps}, |R|={len(ms['R'])}, |B|={len(ms['B'])}, R stacks={r_profile}, max B stack={max(b_profile)}"


def check_hall_formula(instances: int = 1000, seed: int = 3) -> tuple[bool, str]:
    bad = 0
    for i in range(instances):
        rng = derive_rng(seed, i)
        n = int(rng.integers(1, 9))
        w = LineWeights(rng.integers(0, 4, n), rng.integers(0, 4, n), 3)
        sample = rng.integers(1, n + 1, size=int(rng.integers(1, 9)))
        bad += hall_matching_size(w, sample) != brute_force_w_matching(w, sample)
    return bad == 0, f"{instances} instances, {bad} mismatches"


def check_stack_bound(seed: int = 4) -> tuple[bool, str]:
    violations = 0
    worst = 0.0
    cases = [((8, 8), 1000), ((5, 5, 5), 200)]
    for dims, count in cases:
        domain = GridDomain(dims)
        for i in range(count):
            f = random_function(domain, derive_rng(seed + len(dims), i))
            m = lex_improve(f, max_violation_matching(f))
            for row in stack_bound_check(stack_profile(m), domain.total_size):
                violations += not row.ok
                worst = max(worst, row.mass / row.bound)
    return violations == 0, f"1200 functions, {violations} violations, max mass/bound={worst:.3f}"


def check_figure_one(runs: int = 100, seed: int = 5) -> tuple[bool, str]:
    problems = []
    details = []
    for n in (4, 6, 8):
        f = figure_one(n)
        ones = int(f.table.sum())
        least = None
        for r in range(runs):
            m = max_violation_matching(f, rng=derive_rng(seed * 100 + n, r))
            m.validate(f)
            counts = stack_profile(m).counts
            in_big = sum(1 for x, y in m if counts[stack_key(x, y)] >= 2)
            least = in_big if least is None else min(least, in_big)
            if len(m) != ones:
                problems.append(f"n={n} run {r}: |M|={len(m)} < {ones}")
            if in_big < n // 2 - 1:
                problems.append(f"n={n} run {r}: {in_big} pairs in stacks >= 2")
        details.append(f"n={n}: |M|={ones}, min pairs in stacks>=2 = {least} (need {n // 2 - 1})")
    return not problems, "; ".join(problems[:3] or details)


def check_line_sampling(functions: int = 50, seed: int = 6) -> tuple[bool, str]:
    domain = GridDomain((6, 4))
    violations = 0
    checked = 0
    min_slack = math.inf
    for i in range(functions):
        f = random_function(domain, derive_rng(seed, i))
        raw = max_violation_matching(f)
        for m in (raw, lex_improve(f, raw)):
            for line, sub in line_decomposition(m).items():
                w = weights_from_line(sub, line)
                for k in range(2, 7):
                    stats = line_sampling_experiment(w, k, exhaustive=True)
                    checked += 1
                    violations += not stats.holds
                    min_slack = min(min_slack, float(stats.exact) - stats.bound)
    return violations == 0, f"{checked} (line, k) cases, {violations} violations, min slack {min_slack:.3f}"


def check_centrist(trials: int = 10_000, seed: int = 7) -> tuple[bool, str]:
    k = 2
    parts = []
    ok = True
    for d in (16, 64, 256):
        rate = float(centrist_nonmonotone_flags(d, k, trials, seed).mean())
        target = min(1.0, 4 * k * k / d)
        margin = 3 * math.sqrt(target * (1 - target) / trials)
        ok &= rate <= target + margin
        parts.append(f"d={d}: {rate:.4f} <= {target:.4f}+{margin:.4f}")
    eps = distance_to_monotonicity(centrist_discrete(3, 3))
    ok &= eps > 0
    parts.append(f"discrete d=3 n=9 eps={eps}")
    return ok, "; ".join(parts)


def check_reduction_trend(trials: int = 1000, seed: int = 8) -> tuple[bool, str]:
    f = anti_majority(50)
    eps_f = distance_to_monotonicity(f)
    rows = []
    for k in (2, 4, 8, 16, 32):
        est = estimate_expected_distance(f, k, trials, seed=seed)
        rows.append((k, est.mean, est.ci95))
    monotone_trend = all(b[1] + b[2] >= a[1] - a[2] for a, b in zip(rows, rows[1:]))
    gap = abs(rows[-1][1] - float(eps_f))
    close = gap <= 0.05
    means = ", ".join(f"k={k}: {m:.4f}+-{c:.4f}" for k, m, c in rows)
    return monotone_trend and close, (
        f"eps_f={eps_f}; {means}; trend {'ok' if monotone_trend else 'broken'}; "
        f"gap at k=32 {gap:.4f} (tolerance 0.05)"
    )


def check_variance() -> tuple[bool, str]:
    violations = 0
    total = 0
    for dims in ((3, 3), (2, 2, 2)):
        for f in all_functions(GridDomain(dims)):
            total += 1
            violations += not variance_experiment(f, "exact").holds
    return violations == 0, f"{total} functions, {violations} violations"


def check_one_sided(runs: int = 1000, audit_seeds: int = 100, seed: int = 10) -> tuple[bool, str]:
    rejects = 0
    for i in range(runs):
        rng = derive_rng(seed, i)
        if i % 2 == 0:
            f = random_order_ideal(GridDomain.cube(8, 2), rng)
        else:
            f = random_threshold(GridDomain.cube(4, 3), rng)
        assert is_monotone(f)
        rejects += levin_tester(f, TesterConfig(ONE_SIDED_EPS, seed=i)).rejected

    mismatched = 0
    bad_witness = 0
    domain = GridDomain.cube(8, 2)
    for s in range(audit_seeds):
        f = random_function(domain, derive_rng(seed + 1, s))
        g = f.flipped()
        config = TesterConfig(ONE_SIDED_EPS, seed=s)
        a = levin_tester(f, config, early_exit=False)
        b = levin_tester(g, config, early_exit=False)
        mismatched += not np.array_equal(a.queried, b.queried)
        for v, h in ((a, f), (b, g)):
            if v.rejected:
                x, y = v.witness
                bad_witness += not (h(x) == 1 and h(y) == 0)
    ok = rejects == 0 and mismatched == 0 and bad_witness == 0
    return ok, (
        f"{runs} monotone runs at eps={ONE_SIDED_EPS}: {rejects} rejects; "
        f"audit over {audit_seeds} seeds: {mismatched} query-set mismatches, {bad_witness} bad witnesses"
    )


def check_soundness(runs: int = 200) -> tuple[bool, str]:
    am = anti_majority(1000)
    am_rejects = sum(levin_tester(am, TesterConfig(0.2, seed=s)).rejected for s in range(runs))
    cc = centrist_continuous(16)
    mu = ProductMeasure.named("uniform", 16)
    cc_rejects = sum(
        levin_tester(cc, TesterConfig(0.1, k=64, seed=s), measure=mu).rejected for s in range(runs)
    )
    p_am, p_cc = am_rejects / runs, cc_rejects / runs
    return p_am > 0.5 and p_cc > 0.5, f"anti-majority [1000]^2: {p_am:.3f}; centrist d=16: {p_cc:.3f}"


CRITERIA = [
    Criterion(1, "distance-oracle-equivalence", ("distance", "matching"), 10, check_distance_oracle),
    Criterion(2, "anti-majority-exactness", ("distance", "stacks", "fixtures"), 1, check_anti_majority),
    Criterion(3, "hall-deficit-formula", ("linesample",), 10, check_hall_formula),
    Criterion(4, "stack-bound", ("stacks",), 60, check_stack_bound),
    Criterion(5, "figure-one-claims", ("stacks", "fixtures"), 30, check_figure_one),
    Criterion(6, "line-sampling-bound", ("linesample",), 60, check_line_sampling),
    Criterion(7, "centrist-lower-bound", ("lowerbound", "fixtures"), 120, check_centrist),
    Criterion(8, "domain-reduction-trend", ("reduce",), 120, check_reduction_trend),
    Criterion(9, "variance-theorem", ("variance",), 60, check_variance),
    Criterion(10, "tester-one-sidedness", ("test",), 60, check_one_sided),
    Criterion(11, "tester-soundness", ("test",), 120, check_soundness),
]


def run_suite(filter_word: str | None = None, echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for c in CRITERIA:
        if not c.matches(filter_word):
            continue
        res = run_criterion(c)
        if echo:
            echo(res.line())
        results.append(res)
    return results


def failing(results: list[CriterionResult]) -> list[str]:
    return [f"[{r.number}] {r.name}" for r in results if not r.passed]


__all__ = ["CRITERIA", "CriterionResult", "run_suite", "run_criterion", "failing"]
