import random
from fractions import Fraction as F

import pytest

from frechet_exact.exact_numbers import ExactRoot
from frechet_exact.geometry import Curve, squared_distance
from frechet_exact.oracles import (
    InstanceTooLargeError,
    brute_force_exact,
    decide,
    discrete_frechet,
    enumerate_critical_values,
)

from _helpers import curve_pairs

ZIG_PI = Curve.from_points([(0, 0), (12, 0)])
ZIG_SG = Curve.from_points([(0, 3), (8, 3), (4, 3), (12, 3)])


def _discrete_reference(pi, sigma):
    """Plain exhaustive recursion, no memo: the independent check."""

    def go(i, j):
        d2 = squared_distance(pi.points[i], sigma.points[j])
        if i == 0 and j == 0:
            return d2
        opts = []
        if i > 0:
            opts.append(go(i - 1, j))
        if j > 0:
            opts.append(go(i, j - 1))
        if i > 0 and j > 0:
            opts.append(go(i - 1, j - 1))
        return max(min(opts), d2)

    return go(len(pi) - 1, len(sigma) - 1)


def test_discrete_examples():
    c = Curve.from_points([(1, 2), (5, 9), (8, 1)])
    assert discrete_frechet(c, c) == 0
    a = Curve.from_points([(0, 0), (1, 0)])
    b = Curve.from_points([(0, 1), (1, 1)])
    assert discrete_frechet(a, b) == 1


def test_discrete_matches_exhaustive_recursion():
    rng = random.Random(17)
    for _ in range(60):
        a = Curve.from_points([(rng.randint(0, 20), rng.randint(0, 20)) for _ in range(5)])
        b = Curve.from_points([(rng.randint(0, 20), rng.randint(0, 20)) for _ in range(5)])
        assert discrete_frechet(a, b) == _discrete_reference(a, b)


def test_decide_examples():
    c = Curve.from_points([(0, 0), (4, 4)])
    assert decide(c, c, 0)
    a = Curve.from_points([(0, 0), (10, 0)])
    b = Curve.from_points([(0, 1), (10, 1)])
    assert decide(a, b, 1)
    assert not decide(a, b, F(99, 100))
    assert decide(ZIG_PI, ZIG_SG, 13)
    assert not decide(ZIG_PI, ZIG_SG, 12)


def test_decide_is_monotone_in_the_threshold():
    rng = random.Random(23)
    for a, b in curve_pairs(23, 40, hi=6):
        o = brute_force_exact(a, b)
        o2 = o.radicand if o.rational == 0 else F(o.rational) ** 2
        thresholds = sorted(
            F(rng.randint(0, int(2 * o2) + 10), rng.randint(1, 7)) for _ in range(8)
        )
        last = False
        for d2 in thresholds:
            cur = decide(a, b, d2)
            assert cur or not last  # once true, stays true
            last = cur
            assert cur == (ExactRoot.sqrt(d2).compare(o) != -1)


def test_brute_force_fixtures():
    c = Curve.from_points([(2, 3), (9, 9), (1, 0)])
    assert brute_force_exact(c, c) == ExactRoot.from_rational(0)
    a = Curve.from_points([(0, 0), (10, 0)])
    b = Curve.from_points([(0, 1), (10, 1)])
    assert brute_force_exact(a, b) == ExactRoot.from_rational(1)
    assert brute_force_exact(ZIG_PI, ZIG_SG) == ExactRoot.sqrt(13)


def test_brute_force_next_smaller_value_is_infeasible():
    for a, b in curve_pairs(55, 25, hi=5):
        o = brute_force_exact(a, b)
        o2 = o.radicand if o.rational == 0 else F(o.rational) ** 2
        values = sorted({cv.d2 for cv in enumerate_critical_values(a, b)})
        assert decide(a, b, o2)
        smaller = [v for v in values if v < o2]
        if smaller:
            assert not decide(a, b, smaller[-1])


def test_discrete_dominates_continuous():
    for a, b in curve_pairs(77, 40, hi=6):
        o = brute_force_exact(a, b)
        d2 = discrete_frechet(a, b)
        assert ExactRoot.sqrt(d2).compare(o) != -1


def test_size_guard():
    big = Curve.from_points([(i, i * i % 7) for i in range(15)])
    with pytest.raises(InstanceTooLargeError):
        brute_force_exact(big, big)
