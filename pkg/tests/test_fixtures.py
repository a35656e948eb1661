import itertools
from fractions import Fraction

import numpy as np
import pytest

from monored.experiments import centrist_nonmonotone_flags
from monored.fixtures import (
    FANATIC,
    SKEPTIC,
    SUPPORTER,
    FixtureSpec,
    all_functions,
    anti_majority,
    anti_majority_matchings,
    centrist_continuous,
    centrist_discrete,
    centrist_discrete_labels,
    centrist_labels,
    figure_one,
    random_order_ideal,
    random_threshold,
    variance_experiment,
)
from monored.grid import ContinuousFunction, DenseFunction, DomainError, GridDomain, is_monotone
from monored.matching import distance_to_monotonicity, max_violation_matching
from monored.seeding import derive_rng


def test_anti_majority_distance_and_references():
    f = anti_majority(5)
    assert distance_to_monotonicity(f) == Fraction(2, 5)
    ms = anti_majority_matchings(5)
    best = len(max_violation_matching(f))
    for m in ms.values():
        m.validate(f)
        assert len(m) == best == 10
    with pytest.raises(ValueError):
        anti_majority(1)


@pytest.mark.parametrize("n", [2, 3, 7, 12])
def test_anti_majority_distance_formula(n):
    assert distance_to_monotonicity(anti_majority(n)) == Fraction(n - 1, 2 * n)


def test_figure_one_shape():
    f = figure_one(6)
    assert f.domain.dims == (6, 5)
    assert int(f.table.sum()) == 15
    assert f((6, 1)) == 0 and f((1, 1)) == 1 and f((5, 3)) == 1 and f((5, 4)) == 0
    for bad in (5, 2):
        with pytest.raises(ValueError):
            figure_one(bad)


def test_centrist_small_distance_baseline():
    # regression baseline from the matching engine
    assert distance_to_monotonicity(centrist_discrete(3, 3)) == Fraction(7, 27)


def test_centrist_labels_at_band_edges():
    d = 4
    xs = [Fraction(0), Fraction(1, 2), Fraction(501, 1000), Fraction(3, 4), Fraction(751, 1000), Fraction(1)]
    assert centrist_labels(xs, d).tolist() == [SKEPTIC, SKEPTIC, SUPPORTER, SUPPORTER, FANATIC, FANATIC]


def test_centrist_discrete_and_continuous_agree_on_lattice():
    for d, m in ((3, 2), (4, 3), (5, 1)):
        n = d * m
        coords = np.arange(1, n + 1)
        exact = centrist_labels([Fraction(int(c), n) for c in coords], d)
        assert np.array_equal(centrist_discrete_labels(coords, m, d), exact)
    f = centrist_discrete(3, 2)
    cc = centrist_continuous(3)
    pts = f.domain.all_points()
    # shift off the band edges so float rounding cannot matter; the labels agree on (c-1/2, c]
    assert np.array_equal(f.evaluate(pts), cc.evaluate((pts - 0.25) / 6))


def test_centrist_large_is_lazy():
    f = centrist_discrete(16, 4)
    assert not isinstance(f, DenseFunction)
    x = np.full((1, 16), 1)
    x[0, 3] = 64 - 4
    assert f.evaluate(x).tolist() == [1]


def test_centrist_k2_restrictions_rarely_non_monotone():
    for d in (16, 64, 256):
        rate = centrist_nonmonotone_flags(d, 2, 2000, seed=1).mean()
        assert rate <= 16 / d


def _variance_oracle(f: DenseFunction) -> tuple[Fraction, Fraction]:
    """+-1 variances by direct enumeration over ordered sample pairs."""
    dims = f.domain.dims
    vals = [1 - 2 * int(v) for v in f.table]
    mean = Fraction(sum(vals), len(vals))
    var_f = 1 - mean * mean
    acc = Fraction(0)
    count = 0
    for choice in itertools.product(*[list(itertools.product(range(1, n + 1), repeat=2)) for n in dims]):
        cube = [f(tuple(choice[i][b[i]] for i in range(len(dims)))) for b in itertools.product((0, 1), repeat=len(dims))]
        g = Fraction(sum(1 - 2 * v for v in cube), len(cube))
        acc += 1 - g * g
        count += 1
    return var_f, acc / count


def test_variance_matches_direct_oracle():
    rng = np.random.default_rng(5)
    for dims in ((3, 3), (2, 2, 2), (4, 2)):
        domain = GridDomain(dims)
        for _ in range(4):
            f = DenseFunction(domain, rng.integers(0, 2, domain.total_size))
            res = variance_experiment(f, "exact")
            assert (res.var_f, res.mean_var_restricted) == _variance_oracle(f)


def test_variance_constant_and_dictator():
    const = DenseFunction(GridDomain.cube(3, 2), np.ones(9))
    res = variance_experiment(const)
    assert res.var_f == 0 and res.mean_var_restricted == 0 and res.holds
    domain = GridDomain.cube(4, 2)
    dictator = DenseFunction(domain, (domain.all_points()[:, 0] >= 3).astype(int))
    res = variance_experiment(dictator)
    # the two samples straddle the cut with probability 1/2, then var(f_T) = 1: tight
    assert res.var_f == 1 and res.mean_var_restricted == Fraction(1, 2)
    assert res.holds and res.slack == 0


def test_variance_theorem_exhaustive():
    for dims in ((3, 3), (2, 2, 2)):
        for f in all_functions(GridDomain(dims)):
            assert variance_experiment(f, "exact").holds


def test_variance_cap_and_monte_carlo():
    big = DenseFunction(GridDomain.cube(32, 2), np.zeros(1024))
    with pytest.raises(DomainError):
        variance_experiment(big, "exact")
    f = anti_majority(6)
    exact = float(variance_experiment(f, "exact").mean_var_restricted)
    mc = variance_experiment(f, "monte_carlo", seed=2, trials=20000)
    assert abs(mc.mean_var_restricted - exact) < 0.02
    with pytest.raises(ValueError):
        variance_experiment(f, "bogus")


def test_random_monotone_generators():
    for s in range(50):
        assert is_monotone(random_order_ideal(GridDomain.cube(5, 3), derive_rng(0, s)))
        assert is_monotone(random_threshold(GridDomain.cube(4, 3), derive_rng(1, s)))


def test_order_ideals_cover_two_by_two():
    domain = GridDomain.cube(2, 2)
    seen = {tuple(random_order_ideal(domain, derive_rng(2, s)).table.tolist()) for s in range(400)}
    assert len(seen) == 6


def test_all_functions_refuses_large():
    with pytest.raises(DomainError):
        next(all_functions(GridDomain.cube(5, 5)))


def test_fixture_spec_validation_and_build():
    with pytest.raises(ValueError):
        FixtureSpec("nope")
    with pytest.raises(ValueError):
        FixtureSpec("centrist_discrete", {"n": 10, "d": 3})
    spec = FixtureSpec("centrist_discrete", {"n": 9, "d": 3})
    assert spec.params["m"] == 3
    assert spec.build().domain.dims == (9, 9, 9)
    assert isinstance(FixtureSpec("centrist_continuous", {"d": 4}).build(), ContinuousFunction)
    assert FixtureSpec("anti_majority", {"n": 5}).build().domain.dims == (5, 5)
