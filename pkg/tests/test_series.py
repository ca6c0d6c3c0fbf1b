import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdzv import fixtures as fx
from mdzv.cone import enumerate_cone
from mdzv.errors import EmptyComposition, LastExponentTooSmall, NonTotallyReal, Overflow
from mdzv.numfield import norm
from mdzv.series import Composition, auto_coeff_bound, epsilon_pattern, mdzv_sum, tail_bound

ZETA2 = 1.6449340668482264
ZETA3 = 1.2020569031595943
# box sum over [1, 2000]^2 with the hand-derived norm form a^2 + 6ab + b^2 (numpy + fsum)
Q2_BOX_2000 = 0.03310666822413085
# two-dimensional mpmath quadrature of x y f0(x, y) over the quadrant, 30 digits
Q2_ZETA2 = 0.0331067023589868728


@pytest.mark.parametrize(
    "s, eps",
    [((2,), (1, 0)), ((3,), (1, 0, 0)), ((1, 2), (1, 1, 0)), ((2, 3), (1, 0, 1, 0, 0))],
)
def test_epsilon_pattern(s, eps):
    comp = epsilon_pattern(s)
    assert comp.epsilon == eps
    assert comp.m == len(s) and comp.M == sum(s)
    assert comp.epsilon[0] == 1 and comp.epsilon[-1] == 0


def test_epsilon_pattern_rejects():
    with pytest.raises(EmptyComposition):
        epsilon_pattern(())
    with pytest.raises(LastExponentTooSmall):
        epsilon_pattern((2, 1))
    with pytest.raises(LastExponentTooSmall):
        epsilon_pattern((0, 2))


@given(st.lists(st.integers(1, 5), min_size=1, max_size=5).map(lambda xs: xs[:-1] + [xs[-1] + 1]))
def test_epsilon_pattern_blocks(s):
    comp = epsilon_pattern(s)
    assert sum(comp.epsilon) == len(s)
    starts = np.cumsum([0] + s[:-1])
    assert [i for i, e in enumerate(comp.epsilon) if e] == list(starts)


def test_rational_zeta2(cone_q):
    r = mdzv_sum(cone_q, (2,), 1_000_000)
    assert r.value < ZETA2 <= r.value + r.tail_bound
    assert abs(r.value - ZETA2) < 1e-6
    assert r.terms_used == 1_000_000


@pytest.mark.parametrize("A", [10, 100, 1000, 10_000])
def test_rational_tail_below_integral_comparison(cone_q, A):
    assert tail_bound(cone_q, (2,), A) <= 1 / A


@pytest.mark.parametrize("name, s", [("Q", (2,)), ("Q", (1, 2)), ("Q(sqrt2)", (2,)), ("cubic-real", (2,))])
def test_tail_monotone(name, s):
    c = fx.cone(name)
    grid = [10, 100, 1000] if c.n == 1 else [4, 8, 16]
    tails = [tail_bound(c, s, A) for A in grid]
    assert tails[0] > tails[1] > tails[2] > 0


def test_euler_identity(cone_q):
    a = mdzv_sum(cone_q, (1, 2), 200_000)
    b = mdzv_sum(cone_q, (3,), 200_000)
    assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound


def test_enclosure_contains_known_values(cone_q):
    for s, want in (((3,), ZETA3), ((1, 2), ZETA3)):
        r = mdzv_sum(cone_q, s, 50_000)
        assert r.value <= want <= r.value + r.tail_bound


def test_quadratic_golden(cone_2):
    r = mdzv_sum(cone_2, (2,), 2000)
    assert r.value == pytest.approx(Q2_BOX_2000, rel=1e-14)
    assert r.value < Q2_ZETA2 <= r.value + r.tail_bound
    # the true discarded mass is about 3.4e-8, so the bound cannot go below it
    assert Q2_ZETA2 - r.value <= r.tail_bound < 4e-8


def test_quadratic_depth_two_enclosure(cone_2):
    r = mdzv_sum(cone_2, (1, 2), 2000)
    assert r.tail_bound / r.value < 1e-4


@pytest.mark.parametrize("name, A", [("Q", 40), ("Q(sqrt2)", 12), ("cubic-real", 5)])
def test_depth_one_matches_enumeration(name, A):
    c = fx.cone(name)
    terms = [1.0 / norm(c.field, alpha) ** 2 for _, alpha in enumerate_cone(c, A)]
    assert mdzv_sum(c, (2,), A).value == pytest.approx(math.fsum(terms), rel=1e-13)


def test_depth_two_brute_force(cone_2):
    A = 6
    elems = [(a, alpha) for a, alpha in enumerate_cone(cone_2, A)]
    nf = cone_2.field
    total = []
    for _, b1 in elems:
        n1 = norm(nf, b1)
        for _, b2 in elems:
            s12 = nf.element([x + y for x, y in zip(b1.coords, b2.coords)])
            total.append(1.0 / (n1 * norm(nf, s12) ** 2))
    assert mdzv_sum(cone_2, (1, 2), A).value == pytest.approx(math.fsum(total), rel=1e-13)


def test_value_increases_with_box(cone_2):
    vals = [mdzv_sum(cone_2, (1, 2), A).value for A in (3, 6, 12)]
    assert vals[0] < vals[1] < vals[2]


def test_budget_and_field_guards(cone_2):
    with pytest.raises(Overflow):
        mdzv_sum(cone_2, (2,), 5000, max_cells=10_000)
    complex_cone = fx.cone("cubic")
    with pytest.raises(NonTotallyReal):
        mdzv_sum(complex_cone, (2,), 3)


def test_auto_bound(cone_q, cone_2):
    assert auto_coeff_bound(cone_q, (2,)) == 16_000_000
    assert auto_coeff_bound(cone_2, (1, 2)) == 2000
    r = mdzv_sum(cone_2, (2,))
    assert r.coeff_bound == 4000
    assert isinstance(epsilon_pattern((2,)), Composition)
