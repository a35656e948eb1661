import logging

import numpy as np
import pytest

from monored.fixtures import anti_majority, centrist_continuous, random_function, random_order_ideal
from monored.grid import ArrayFunction, ContinuousFunction, DenseFunction, GridDomain, OracleFunction
from monored.reduction import ProductMeasure
from monored.seeding import derive_rng
from monored.testers import (
    ConfigError,
    Level,
    TesterConfig,
    TesterVerdict,
    baseline_pair_tester,
    levin_tester,
    num_levels,
    pair_rounds,
    schedule_cost,
    work_investment_levels,
)


def test_schedule_at_one_half():
    assert num_levels(0.5) == 2
    assert work_investment_levels(0.5) == [Level(1, 32, 0.5), Level(2, 64, 0.25), Level(3, 72, 0.125)]


def test_schedule_edges():
    assert num_levels(1) == 1
    assert num_levels(0.99) == 2
    assert num_levels(0.25) == 3
    assert [lv.ell for lv in work_investment_levels(0.1)] == list(range(1, num_levels(0.1) + 2))
    assert work_investment_levels(0.3) == work_investment_levels(0.3)
    assert schedule_cost(0.5) == pytest.approx(32 * 2 ** (4 / 3) + 64 * 4 ** (4 / 3) + 72 * 8 ** (4 / 3))
    with pytest.raises(ConfigError):
        work_investment_levels(0)


def test_config_validation():
    with pytest.raises(ConfigError):
        TesterConfig(1.0)
    with pytest.raises(ConfigError):
        TesterConfig(0.5, k=1)
    with pytest.raises(ConfigError):
        TesterConfig(0.5, inner="path")


def test_k_clamp_is_logged_once(caplog):
    cfg = TesterConfig(0.37, k_max=64)
    with caplog.at_level(logging.WARNING, logger="monored.testers"):
        assert cfg.resolve_k(3) == 64
        assert cfg.resolve_k(3) == 64
    assert sum("clamped" in r.message for r in caplog.records) == 1
    assert TesterConfig(0.5, k=7).resolve_k(3) == 7


def test_verdict_requires_ordered_witness():
    with pytest.raises(ValueError):
        TesterVerdict("reject")
    with pytest.raises(ValueError):
        TesterVerdict("reject", ((2, 1), (1, 2)))
    with pytest.raises(ValueError):
        TesterVerdict("maybe")


def test_pair_tester_monotone_and_constant():
    domain = GridDomain.cube(6, 3)
    const = DenseFunction(domain, np.zeros(domain.total_size))
    v = baseline_pair_tester(const, 0.3, np.random.default_rng(0))
    assert v.verdict == "accept"
    assert v.raw_queries == 2 * pair_rounds(0.3, 3, 6)
    assert v.queries_used == const.query_count
    mono = random_order_ideal(domain, np.random.default_rng(1))
    for s in range(50):
        assert not baseline_pair_tester(mono, 0.1, np.random.default_rng(s)).rejected


def test_pair_tester_anti_dictator_line():
    k = 16
    domain = GridDomain((k,))
    f = DenseFunction(domain, (np.arange(1, k + 1) <= k // 2).astype(int))
    rejects = sum(baseline_pair_tester(f, 0.4, derive_rng(1, s)).rejected for s in range(1000))
    assert rejects / 1000 >= 0.9


def test_pair_tester_planted_violation_witness():
    domain = GridDomain.cube(2, 2)
    f = DenseFunction(domain, [1, 1, 0, 1])  # (1,1)=1 lies below (2,1)=0
    v = None
    for s in range(100):
        v = baseline_pair_tester(f, 0.5, np.random.default_rng(s))
        if v.rejected:
            break
    assert v is not None and v.rejected
    x, y = v.witness
    assert f(x) == 1 and f(y) == 0


def test_levin_accepts_monotone_grid_functions():
    for s in range(20):
        f = random_order_ideal(GridDomain.cube(8, 2), derive_rng(2, s))
        assert not levin_tester(f, TesterConfig(0.75, seed=s)).rejected


def test_levin_accepts_monotone_step_on_plane():
    step = ContinuousFunction(2, lambda p: (p[:, 0] + 2 * p[:, 1] >= 1.2))
    mu = ProductMeasure.named("uniform", 2)
    for s in range(10):
        assert not levin_tester(step, TesterConfig(0.5, k=32, seed=s), measure=mu).rejected


def test_levin_continuous_needs_measure():
    with pytest.raises(ConfigError):
        levin_tester(centrist_continuous(4), TesterConfig(0.5, k=8))
    with pytest.raises(TypeError):
        levin_tester(object(), TesterConfig(0.5))


def test_levin_rejects_anti_majority_with_original_witness():
    f = anti_majority(1000)
    rejects = 0
    for s in range(30):
        v = levin_tester(f, TesterConfig(0.2, seed=s))
        if v.rejected:
            rejects += 1
            x, y = v.witness
            assert all(a <= b for a, b in zip(x, y)) and x != y
            assert f(x) == 1 and f(y) == 0
    assert rejects / 30 > 2 / 3


def test_levin_rejects_continuous_centrist():
    cc = centrist_continuous(16)
    mu = ProductMeasure.named("uniform", 16)
    v = levin_tester(cc, TesterConfig(0.1, k=64, seed=3), measure=mu)
    assert v.rejected
    x, y = v.witness
    assert cc(x) == 1 and cc(y) == 0


def test_levin_is_deterministic_and_non_adaptive():
    domain = GridDomain.cube(8, 2)
    for s in range(5):
        f = random_function(domain, derive_rng(3, s))
        cfg = TesterConfig(0.75, seed=s)
        a = levin_tester(f, cfg, early_exit=False)
        b = levin_tester(f.flipped(), cfg, early_exit=False)
        c = levin_tester(DenseFunction(domain, f.table), cfg, early_exit=False)
        assert np.array_equal(a.queried, b.queried)
        assert a.verdict == c.verdict and a.witness == c.witness


def test_early_exit_queries_no_more_than_full_run():
    f = anti_majority(20)
    cfg = TesterConfig(0.3, seed=4)
    short = levin_tester(f, cfg)
    full = levin_tester(anti_majority(20), cfg, early_exit=False)
    assert short.rejected and full.rejected
    assert short.witness == full.witness
    assert short.raw_queries <= full.raw_queries


def test_levin_on_huge_lazy_grid():
    domain = GridDomain.cube(64, 16)
    mono = ArrayFunction(domain, lambda p: p.sum(axis=1) >= 520)
    v = levin_tester(mono, TesterConfig(0.75, k=8, seed=0))
    assert not v.rejected
    assert v.queries_used == len(mono.log.distinct())
    bad = ArrayFunction(domain, lambda p: p[:, 0] <= 32)
    v = levin_tester(bad, TesterConfig(0.5, k=8, seed=0))
    assert v.rejected
    x, y = v.witness
    assert bad(x) == 1 and bad(y) == 0


def test_oracle_counts_distinct_points():
    calls = []
    domain = GridDomain.cube(10, 2)

    def rule(p):
        calls.append(p)
        return int(p[0] <= p[1])

    f = OracleFunction(domain, rule)
    levin_tester(f, TesterConfig(0.75, k=4, seed=1))
    assert len(calls) == f.query_count <= domain.total_size
