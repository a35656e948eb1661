import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from monored.fixtures import anti_majority_matchings
from monored.line_sampling import (
    LineWeights,
    WeightInvariantError,
    brute_force_w_matching,
    hall_matching_size,
    line_sampling_bound,
    line_sampling_experiment,
    trace_sample,
    weights_from_line,
)
from monored.matching import ViolationMatching


def weights(plus, minus, cap=None):
    return LineWeights(plus, minus, cap if cap is not None else max(minus, default=0))


def test_weights_from_B_bottom_line():
    B = anti_majority_matchings(5)["B"]
    w = weights_from_line(B, (1,))
    assert w.w_plus.tolist() == [1, 1, 1, 1, 0]
    assert w.w_minus.tolist() == [0, 1, 1, 1, 1]


def test_weights_empty_and_single_pair():
    B = anti_majority_matchings(5)["B"]
    empty = weights_from_line(ViolationMatching(B.domain, []), (1,))
    assert not empty.w_plus.any() and not empty.w_minus.any()
    single = weights_from_line(ViolationMatching(B.domain, [((3, 1), (3, 2))]), (1,))
    assert single.w_plus[2] == single.w_minus[2] == 1


def test_invariant_violations_detected():
    with pytest.raises(WeightInvariantError):
        weights([2, 0], [0, 1]).check()
    with pytest.raises(WeightInvariantError):
        weights([1, 0], [0, 1], cap=0).check()
    with pytest.raises(WeightInvariantError):
        weights([0, 1], [1, 0]).check()


def test_hall_small_examples():
    assert hall_matching_size(weights([1, 0], [0, 1]), [1, 2]) == 1
    assert hall_matching_size(weights([0, 1], [1, 0]), [1, 2]) == 0


def test_deficit_is_clamped_at_zero():
    w = weights([1, 1], [0, 0])
    tr = trace_sample(w, [1, 2])
    assert max(tr.prefix) < 0 and tr.nu == 0


def test_hall_against_brute_force_random():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        w = weights(rng.integers(0, 4, n), rng.integers(0, 4, n), cap=3)
        sample = rng.integers(1, n + 1, size=int(rng.integers(1, 9)))
        assert hall_matching_size(w, sample) == brute_force_w_matching(w, sample)


@given(
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=7),
    st.data(),
)
def test_adding_samples_never_shrinks_nu(ws, data):
    n = len(ws)
    w = weights([a for a, _ in ws], [b for _, b in ws], cap=3)
    sample = data.draw(st.lists(st.integers(1, n), min_size=1, max_size=6))
    extra = data.draw(st.integers(1, n))
    assert hall_matching_size(w, sample + [extra]) >= hall_matching_size(w, sample)


def test_duplicate_copy_adds_capacity():
    w = weights([1, 1, 0], [0, 1, 2])
    for t in (1, 2, 3):
        assert hall_matching_size(w, [t, t]) >= hall_matching_size(w, [t])
    assert hall_matching_size(w, [1, 1, 3]) == 2


def test_exhaustive_average_matches_direct_enumeration():
    B = anti_majority_matchings(5)["B"]
    w = weights_from_line(B, (1,))
    stats = line_sampling_experiment(w, 5, exhaustive=True)
    total = sum(hall_matching_size(w, t) for t in itertools.product(range(1, 6), repeat=5))
    assert stats.exact == Fraction(total, 5**5)
    assert stats.holds
    assert stats.bound == pytest.approx(4 - 3 * math.sqrt(5 * math.log(5)))


def test_monte_carlo_agrees_with_exact():
    w = weights([1, 1, 1, 1, 0, 0], [0, 1, 0, 1, 1, 1], cap=1)
    exact = line_sampling_experiment(w, 4, exhaustive=True).exact
    mc = line_sampling_experiment(w, 4, trials=20000, seed=1)
    assert abs(mc.mean_nu - float(exact)) <= 4 * mc.ci95 / 1.96 + 1e-9


def test_zero_weights_give_zero():
    stats = line_sampling_experiment(weights([0] * 4, [0] * 4), 3, trials=50)
    assert stats.mean_nu == 0


def test_single_slice_instance_is_small_but_above_bound():
    n, k = 40, 4
    plus = [1] * 20 + [0] * 20
    minus = [0] * (n - 1) + [20]
    w = weights(plus, minus)
    exact = line_sampling_experiment(w, k, exhaustive=True)
    assert exact.bound < 0 and exact.holds
    # quadratic, not linear, in k/n: (k/n)|M| would be 2.0
    assert float(exact.exact) <= (k / n) ** 2 * 20
    mc = line_sampling_experiment(w, k, trials=4000, seed=3)
    assert abs(mc.mean_nu - float(exact.exact)) <= 4 * mc.ci95 / 1.96


def test_bound_formula():
    assert line_sampling_bound(6, 6, 2, 1) == pytest.approx(2 - 3 * math.sqrt(2 * math.log(2)))


def test_k_must_be_at_least_two():
    with pytest.raises(ValueError):
        line_sampling_experiment(weights([1], [1]), 1)
