import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from mdzv import fixtures as fx
from mdzv.algexp import Monomial, alg_pow, monomial_eval
from mdzv.errors import FieldMismatch, NonPositivePoint
from mdzv.numfield import mul, regular_rep

small = st.integers(-6, 6)


def test_identity_exponent(K2):
    y1 = Monomial.basis(2, 1)
    assert alg_pow(K2, K2.one(), y1) == y1


def test_sqrt2_swaps_and_squares(K2):
    r = K2.element([0, 1])
    assert alg_pow(K2, r, Monomial.basis(2, 1)) == Monomial((0, 1))
    assert alg_pow(K2, r, Monomial.basis(2, 2)) == Monomial((2, 0))


def test_one_plus_sqrt2(K2):
    assert alg_pow(K2, K2.element([1, 1]), Monomial.basis(2, 1)) == Monomial((1, 1))


def test_degree_mismatch(K2):
    with pytest.raises(FieldMismatch):
        alg_pow(K2, K2.one(), Monomial((1, 0, 0)))
    with pytest.raises(FieldMismatch):
        Monomial((1, 0)) * Monomial((1,))


def test_monomial_eval_examples():
    v = monomial_eval(Monomial((1, 1)), (mpmath.exp(-1), mpmath.exp(-mpmath.sqrt(2))))
    assert abs(v - mpmath.exp(-(1 + mpmath.sqrt(2)))) < 1e-40
    assert abs(v - mpmath.mpf("0.08943764840308467")) < 1e-15
    assert monomial_eval(Monomial((0, 0)), (0.3, 7)) == 1
    assert monomial_eval(Monomial((2, 0)), (3, 11)) == 9


def test_monomial_eval_rejects_nonpositive():
    with pytest.raises(NonPositivePoint):
        monomial_eval(Monomial((1, -1)), (1.0, 0.0))


def test_str():
    assert str(Monomial((2, 0, 1))) == "y1^2*y3"
    assert str(Monomial((0, 0))) == "1"


@given(st.tuples(small, small), st.tuples(small, small), st.integers(1, 2))
def test_composition_law_quadratic(a, b, i):
    nf = fx.field("Q(sqrt2)")
    alpha, beta = nf.element(a), nf.element(b)
    y = Monomial.basis(2, i)
    assert alg_pow(nf, beta, alg_pow(nf, alpha, y)) == alg_pow(nf, mul(nf, alpha, beta), y)


@given(st.tuples(small, small, small), st.tuples(small, small, small), st.integers(1, 3))
def test_composition_law_cubic(a, b, i):
    nf = fx.field("cubic")
    alpha, beta = nf.element(a), nf.element(b)
    y = Monomial.basis(3, i)
    assert alg_pow(nf, beta, alg_pow(nf, alpha, y)) == alg_pow(nf, mul(nf, alpha, beta), y)


@given(st.tuples(small, small, small), st.tuples(small, small, small), st.tuples(small, small, small))
def test_additive_in_exponent_vector(g, v1, v2):
    nf = fx.field("cubic")
    gamma = nf.element(g)
    m1, m2 = Monomial(v1), Monomial(v2)
    assert alg_pow(nf, gamma, m1 * m2) == alg_pow(nf, gamma, m1) * alg_pow(nf, gamma, m2)


@given(
    st.tuples(small, small),
    st.integers(1, 2),
    st.tuples(st.floats(0.01, 5.0), st.floats(0.01, 5.0)),
)
def test_numeric_consistency(g, i, t):
    nf = fx.field("Q(sqrt2)")
    gamma = nf.element(g)
    c = regular_rep(nf, gamma).entries
    mon = alg_pow(nf, gamma, Monomial.basis(2, i))
    with mpmath.workprec(53):
        point = [mpmath.exp(-tk) for tk in t]
        got = monomial_eval(mon, point, precision=53)
    want = math.exp(-sum(c[i - 1][k] * t[k] for k in range(2)))
    # each factor carries one rounding of exp, amplified by the integer exponent
    slack = 4 + 2 * sum(abs(e) for e in mon.exponents)
    assert abs(float(got) - want) <= slack * 2.0 ** -52 * want
