"""Seeded experiment drivers shared by the CLI, the scripts and the acceptance suite.

Every driver is a generator of per-trial records (plain dicts) whose return
value is a summary dict.  `run_driver` collects both.  Trial randomness always
comes from `derive_rng(seed, trial)`.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .fixtures import (
    FixtureSpec,
    all_functions,
    centrist_restriction_is_monotone,
    centrist_restriction_ones_fraction,
    variance_experiment,
)
from .grid import BoolFunction, ContinuousFunction, DomainError, GridDomain, RestrictionSpec
from .line_sampling import line_sampling_experiment, weights_from_line
from .matching import distance_to_monotonicity, max_violation_matching
from .reduction import ProductMeasure, reduction_trial, sample_restriction_continuous
from .seeding import derive_rng, derive_seed
from .stacks import filter_high_stacks, lex_improve, line_decomposition, stack_bound_check, stack_profile
from .testers import TesterConfig, levin_tester

SCHEMA_VERSION = 1
WORKERS_ENV = "MONORED_WORKERS"


def workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def fmt_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def mean_ci(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if len(arr) < 2:
        return float(arr.mean()) if len(arr) else float("nan"), 0.0
    return float(arr.mean()), float(1.96 * arr.std(ddof=1) / math.sqrt(len(arr)))


@dataclass
class ExperimentConfig:
    """Validated parameters for one subcommand run."""

    command: str
    fixture: str | None = None
    n: int | None = None
    d: int | None = None
    m: int | None = None
    k: list[int] = field(default_factory=list)
    epsilon: float | None = None
    trials: int = 100
    runs: int = 100
    seed: int = 0
    mode: str = "exact"
    exhaustive: bool = False
    measure: str = "uniform"
    inner: str = "pair"
    lex: bool = True

    def __post_init__(self):
        for name in ("n", "d", "m"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"--{name} must be positive")
        if any(k < 1 for k in self.k):
            raise ValueError("--k values must be positive")
        if self.trials < 1 or self.runs < 1:
            raise ValueError("--trials and --runs must be positive")
        if self.epsilon is not None and not 0 < self.epsilon < 1:
            raise ValueError("--epsilon must lie in (0, 1)")

    def fixture_spec(self) -> FixtureSpec:
        if self.fixture is None:
            raise ValueError(f"{self.command} needs --fixture")
        params = {key: getattr(self, key) for key in ("n", "d", "m") if getattr(self, key) is not None}
        params["seed"] = self.seed
        return FixtureSpec(self.fixture, params)

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def run_driver(gen) -> tuple[list[dict], dict]:
    records = []
    while True:
        try:
            records.append(next(gen))
        except StopIteration as stop:
            return records, stop.value


def _dense_fixture(cfg: ExperimentConfig):
    f = cfg.fixture_spec().build()
    if not isinstance(f, BoolFunction):
        raise DomainError(f"{cfg.command} needs a grid fixture, {cfg.fixture} is continuous")
    return f.to_dense()


# -- drivers -----------------------------------------------------------------

def distance_driver(cfg: ExperimentConfig) -> Iterator[dict]:
    yield from ()
    f = _dense_fixture(cfg)
    M = max_violation_matching(f)
    eps = distance_to_monotonicity(f)
    return {
        "fixture": cfg.fixture,
        "dims": list(f.domain.dims),
        "domain_size": f.domain.total_size,
        "matching_size": len(M),
        "eps": fmt_fraction(eps),
        "eps_float": float(eps),
    }


def _reduce_one(args):
    f, k, seed, trial, exhaustive = args
    return reduction_trial(f, k, derive_rng(seed, trial), exhaustive)


def reduce_driver(cfg: ExperimentConfig) -> Iterator[dict]:
    f = _dense_fixture(cfg)
    ks = cfg.k or [2]
    eps_f = distance_to_monotonicity(f)
    summary = {"fixture": cfg.fixture, "eps_f": fmt_fraction(eps_f), "eps_f_float": float(eps_f), "by_k": []}
    pool = ProcessPoolExecutor(workers()) if workers() > 1 else None
    try:
        for k in ks:
            jobs = [(f, k, cfg.seed, t, cfg.exhaustive) for t in range(cfg.trials)]
            results = pool.map(_reduce_one, jobs, chunksize=16) if pool else map(_reduce_one, jobs)
            values = []
            for t, value in enumerate(results):
                values.append(value)
                yield {
                    "k": k,
                    "trial": t,
                    "eps_restricted": fmt_fraction(value),
                    "eps_float": float(value),
                    "seed": derive_seed(cfg.seed, t),
                }
            mean, ci = mean_ci([float(v) for v in values])
            summary["by_k"].append({"k": k, "mean": mean, "ci95": ci, "trials": len(values)})
    finally:
        if pool:
            pool.shutdown()
    return summary


def stacks_driver(cfg: ExperimentConfig) -> Iterator[dict]:
    f = _dense_fixture(cfg)
    M = max_violation_matching(f)
    if cfg.lex:
        M = lex_improve(f, M)
    profile = stack_profile(M)
    rows = stack_bound_check(profile, f.domain.total_size)
    for row in rows:
        yield row.as_dict()
    summary = {
        "fixture": cfg.fixture,
        "matching_size": len(M),
        "lambda_vector": profile.lambda_vector,
        "max_stack": profile.max_stack,
        "bound_violations": sum(not r.ok for r in rows),
    }
    if cfg.k:
        filt = filter_high_stacks(M, cfg.k[0])
        summary["filter"] = {
            "k": cfg.k[0],
            "threshold": filt.threshold,
            "removed": filt.removed,
            "allowance": filt.allowance,
            "within_allowance": filt.within_allowance,
        }
    return summary


def linesample_driver(cfg: ExperimentConfig) -> Iterator[dict]:
    f = _dense_fixture(cfg)
    M = max_violation_matching(f)
    if cfg.lex:
        M = lex_improve(f, M)
    ks = cfg.k or [2]
    violations = 0
    for line, sub in line_decomposition(M).items():
        w = weights_from_line(sub, line)
        for k in ks:
            if k < 2:
                continue
            stats = line_sampling_experiment(w, k, cfg.trials, cfg.seed, cfg.exhaustive)
            violations += not stats.holds
            yield {"line": " ".join(map(str, line)), "size": w.size, "lambda": w.lambda_cap, **stats.as_dict(), "holds": stats.holds}
    return {"fixture": cfg.fixture, "matching_size": len(M), "violations": violations}


def _test_subject(cfg: ExperimentConfig):
    f = cfg.fixture_spec().build()
    measure = None
    if isinstance(f, ContinuousFunction):
        measure = ProductMeasure.named(cfg.measure, f.d)
    return f, measure


def tester_driver(cfg: ExperimentConfig) -> Iterator[dict]:
    if cfg.epsilon is None:
        raise ValueError("test needs --epsilon")
    k = cfg.k[0] if cfg.k else None
    rejects = 0
    queries = []
    for run in range(cfg.runs):
        # a fresh oracle per run keeps query counts per run
        f, measure = _test_subject(cfg)
        seed = derive_seed(cfg.seed, run)
        v = levin_tester(f, TesterConfig(cfg.epsilon, k=k, inner=cfg.inner, seed=seed), measure)
        rejects += v.rejected
        queries.append(v.queries_used)
        yield {
            "run": run,
            "seed": seed,
            "verdict": v.verdict,
            "queries": v.queries_used,
            "raw_queries": v.raw_queries,
            "witness": "" if v.witness is None else f"{list(v.witness[0])}<{list(v.witness[1])}",
        }
    return {"reject_freq": rejects / cfg.runs, "mean_queries": float(np.mean(queries)), "runs": cfg.runs}


def centrist_nonmonotone_rate(d: int, k: int, trials: int, seed: int) -> float:
    """Fraction of k-per-coordinate restrictions of continuous Centrist that are not monotone."""
    measure = ProductMeasure.named("uniform", d)
    bad = 0
    for t in range(trials):
        spec = sample_restriction_continuous(measure, d, k, derive_rng(seed, t))
        bad += not centrist_restriction_is_monotone(spec, d)
    return bad / trials


def centrist_restricted_distance_bound(spec: RestrictionSpec, d: int) -> Fraction:
    """Upper bound on the restricted distance: 0 if monotone, else the smaller of the 1- and 0-mass."""
    if centrist_restriction_is_monotone(spec, d):
        return Fraction(0)
    p1 = centrist_restriction_ones_fraction(spec, d)
    return min(p1, 1 - p1)


def lowerbound_driver(cfg: ExperimentConfig) -> Iterator[dict]:
    d = cfg.d or 16
    k = cfg.k[0] if cfg.k else 2
    measure = ProductMeasure.named("uniform", d)
    bad = 0
    bounds = []
    for t in range(cfg.trials):
        spec = sample_restriction_continuous(measure, d, k, derive_rng(cfg.seed, t))
        mono = centrist_restriction_is_monotone(spec, d)
        bad += not mono
        ub = centrist_restricted_distance_bound(spec, d)
        bounds.append(float(ub))
        yield {"trial": t, "seed": derive_seed(cfg.seed, t), "monotone": int(mono), "eps_upper": float(ub)}
    rate = bad / cfg.trials
    target = 4 * k * k / d
    sigma = math.sqrt(max(target * (1 - target), 0) / cfg.trials) if target < 1 else 0.0
    return {
        "d": d,
        "k": k,
        "trials": cfg.trials,
        "nonmonotone_freq": rate,
        "bound_4k2_over_d": target,
        "within_bound": rate <= target + 3 * sigma,
        "mean_eps_upper": float(np.mean(bounds)),
    }


def variance_driver(cfg: ExperimentConfig) -> Iterator[dict]:
    if cfg.fixture == "all_functions":
        domain = GridDomain.cube(cfg.n or 3, cfg.d or 2)
        funcs = all_functions(domain)
    else:
        funcs = [_dense_fixture(cfg)]
    violations = 0
    count = 0
    min_slack = None
    for i, f in enumerate(funcs):
        res = variance_experiment(f, cfg.mode, cfg.seed, cfg.trials)
        violations += not res.holds
        count += 1
        slack = res.slack
        min_slack = slack if min_slack is None else min(min_slack, slack)
        yield {
            "index": i,
            "var_f": float(res.var_f),
            "mean_var_restricted": float(res.mean_var_restricted),
            "holds": res.holds,
        }
    return {
        "functions": count,
        "mode": cfg.mode,
        "violations": violations,
        "min_slack": float(min_slack) if min_slack is not None else None,
    }


DRIVERS = {
    "distance": distance_driver,
    "reduce": reduce_driver,
    "stacks": stacks_driver,
    "linesample": linesample_driver,
    "test": tester_driver,
    "lowerbound": lowerbound_driver,
    "variance": variance_driver,
}


def centrist_nonmonotone_flags(d: int, k: int, trials: int, seed: int) -> np.ndarray:
    """Vectorised structural check over many uniform restrictions of continuous Centrist.

    Trial t draws exactly the samples `sample_restriction_continuous` would
    draw from `derive_rng(seed, t)` under the uniform measure.  A restriction
    is non-monotone iff some coordinate holds both a supporter and a fanatic
    and no coordinate is supporters only.
    """
    from .fixtures import FANATIC, SUPPORTER, centrist_labels

    lo = np.nextafter(0.0, 1.0)
    u = np.stack([derive_rng(seed, t).uniform(lo, 1.0, size=(d, k)) for t in range(trials)])
    labels = centrist_labels(u, d)
    has_sup = (labels == SUPPORTER).any(axis=2)
    has_fan = (labels == FANATIC).any(axis=2)
    all_sup = (labels == SUPPORTER).all(axis=2)
    return (has_sup & has_fan).any(axis=1) & ~all_sup.any(axis=1)
