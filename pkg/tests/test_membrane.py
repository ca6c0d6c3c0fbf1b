import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from mdzv import fixtures as fx
from mdzv.cone import Cone, f0_series
from mdzv.errors import DimensionBudgetExceeded, DomainError, EqualModulusEmbeddings, NonTotallyReal, StepTooLarge
from mdzv.membrane import (
    MembranePoint,
    QuadratureSpec,
    classify_direction,
    cumulative_rule,
    integrand_eval,
    mdzv_integral,
    omega_alpha_check,
    p_direction,
    projective_limits,
    q_difference_quotients,
    tangent_limits,
)
from mdzv.series import Composition, mdzv_sum

ZETA2 = 1.6449340668482264
ZETA3 = 1.2020569031595943
Q2_ZETA2 = 0.0331067023589868728


def test_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(points_per_axis=1)
    with pytest.raises(DomainError):
        QuadratureSpec(upper_cutoff=0)
    with pytest.raises(DomainError):
        QuadratureSpec(sample_count=0)
    with pytest.raises(DomainError):
        QuadratureSpec(scheme="trapezoid")
    assert QuadratureSpec(scheme="nested-ordered-quadrature").scheme == "nested"


def test_point_ordering():
    MembranePoint(((3.0, 2.0, 1.0),))
    with pytest.raises(DomainError):
        MembranePoint(((1.0, 2.0),))
    with pytest.raises(DomainError):
        MembranePoint(((1.0, 0.0),))


def test_integrand_rational(cone_q):
    t1, t2 = 1.3, 0.4
    v = integrand_eval(cone_q, (2,), MembranePoint(((t1, t2),)))
    assert abs(v - mpmath.exp(-t1) / (1 - mpmath.exp(-t1))) < 1e-35


def test_integrand_empty_pattern(cone_2):
    comp = Composition((2,), (0, 0))
    assert integrand_eval(cone_2, comp, MembranePoint(((2.0, 1.0), (3.0, 0.5)))) == 1


def test_integrand_depth_two(cone_2):
    p = MembranePoint(((2.0, 1.5, 0.2), (1.1, 0.9, 0.3)))
    v = integrand_eval(cone_2, (1, 2), p)
    a = f0_series(cone_2, p.column(1), 80)
    b = f0_series(cone_2, p.column(2), 80)
    assert abs(v - a.value * b.value) < 1e-12 * v


@given(st.floats(0.2, 5.0))
def test_inner_rule_exponential(lam):
    t, w, Q = cumulative_rule(QuadratureSpec())
    got = Q @ np.exp(-lam * t)
    T = QuadratureSpec().upper_cutoff
    want = (np.exp(-lam * t) - math.exp(-lam * T)) / lam
    assert np.max(np.abs(got - want)) < 1e-8


def test_rational_values(cone_q):
    for s, want in (((2,), ZETA2), ((3,), ZETA3), ((1, 2), ZETA3)):
        r = mdzv_integral(cone_q, s)
        assert abs(r.value - want) <= r.error_estimate
        assert abs(r.value - want) < 1e-8


def test_rational_against_series(cone_q):
    ser = mdzv_sum(cone_q, (2,), 1_000_000)
    r = mdzv_integral(cone_q, (2,), QuadratureSpec(points_per_axis=64, upper_cutoff=40))
    assert abs(r.value - ser.value) < 1e-6


def test_convergence_monotone(cone_q):
    errs = [abs(mdzv_integral(cone_q, (2,), QuadratureSpec(points_per_axis=N)).value - ZETA2) for N in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2]


def test_quadratic_against_oracles(cone_2):
    r = mdzv_integral(cone_2, (2,))
    assert abs(r.value - Q2_ZETA2) <= max(r.error_estimate, 1e-12)
    ser = mdzv_sum(cone_2, (2,), 2000)
    assert abs(r.value - ser.value) <= r.error_estimate + ser.tail_bound
    assert abs(r.value - ser.value) / ser.value < 1e-4


def test_cutoff_term_reported(cone_q):
    r = mdzv_integral(cone_q, (2,), QuadratureSpec(upper_cutoff=10))
    assert r.components["upper_cutoff"] > 1e-5
    assert abs(r.value - ZETA2) <= r.error_estimate


def test_quasi_random_diagnostic(cone_2):
    r = mdzv_integral(cone_2, (2,), QuadratureSpec(scheme="quasi-random", sample_count=2 ** 12, seed=7))
    assert abs(r.value - Q2_ZETA2) < 0.05 * Q2_ZETA2
    again = mdzv_integral(cone_2, (2,), QuadratureSpec(scheme="quasi-random", sample_count=2 ** 12, seed=7))
    assert again.value == r.value


def test_guards(cone_2):
    with pytest.raises(DimensionBudgetExceeded):
        mdzv_integral(cone_2, (5,))
    with pytest.raises(DimensionBudgetExceeded):
        mdzv_integral(fx.cone("cubic-real"), (2,), QuadratureSpec(points_per_axis=200))
    with pytest.raises(NonTotallyReal):
        mdzv_integral(fx.cone("cubic"), (2,))


def test_jacobian_rational(cone_q):
    chk = omega_alpha_check(cone_q, [1], 1e-5)
    assert abs(abs(chk.jacobian_det) - mpmath.exp(-1)) < 1e-9
    assert chk.sqrt_D == 1
    assert abs(chk.ratio - 1) < 1e-6


def test_jacobian_quadratic(cone_2):
    chk = omega_alpha_check(cone_2, [0.7, 1.3], 1e-5)
    assert abs(abs(chk.sqrt_D) - 4 * mpmath.sqrt(2)) < 1e-30
    assert abs(chk.ratio - 1) < 1e-5
    assert abs(chk.omega1_ratio - 1) < 1e-5
    assert 3.5 < chk.order_ratio < 4.5


def test_jacobian_step_guard(cone_2):
    with pytest.raises(StepTooLarge):
        omega_alpha_check(cone_2, [0.7, 1.3], 1.0)


@given(st.tuples(st.floats(0.2, 2.0), st.floats(0.2, 2.0)))
def test_jacobian_random(t):
    chk = omega_alpha_check(fx.cone("Q(sqrt2)"), t, 1e-5)
    assert abs(chk.ratio - 1) < 1e-5


def test_tangent_examples(cone_2):
    # embedding 2 carries the root +sqrt2
    lim = tangent_limits(cone_2, 1, 2, 2)
    assert lim.p == (0, 1)
    assert abs(lim.q[1] / lim.q[0] - mpmath.mpf("5.82842712474619009760337744842")) < 1e-25
    lim = tangent_limits(cone_2, 1, 2, 1)
    assert lim.p == (1, 0)
    assert abs(lim.q[1] / lim.q[0] - mpmath.mpf("0.171572875253809902396622551581")) < 1e-25


def test_tangent_degenerate(cone_2):
    with pytest.raises(EqualModulusEmbeddings):
        projective_limits(2, 2)
    nf = cone_2.field
    # a hand-built cone whose first embedding sees both generators equal
    fake = Cone(nf, cone_2.generators, [[1, 1], [1, 2]], 1)
    with pytest.raises(EqualModulusEmbeddings):
        tangent_limits(fake, 1, 2, 1)
    with pytest.raises(EqualModulusEmbeddings):
        tangent_limits(cone_2, 1, 1, 1)


def test_q_quotients_improve(cone_2):
    lim = tangent_limits(cone_2, 1, 2, 2)
    b, c = lim.q
    vals, extrap = q_difference_quotients(b, c)
    errs = [abs(v / (b / c) - 1) for v in vals]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-4
    assert abs(extrap / (b / c) - 1) < errs[2]


def test_p_direction_matches_rule(cone_3r):
    for i in range(1, 4):
        for k in range(1, 4):
            if i == k:
                continue
            for j in range(1, 4):
                lim = tangent_limits(cone_3r, i, k, j)
                b, c = lim.q
                t = 60 / abs(float(b) - float(c))
                assert classify_direction(p_direction(b, c, t)) == lim.p
    assert classify_direction((0.5, 1.0)) is None
