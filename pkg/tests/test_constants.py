import math

import pytest
from scipy.special import beta as beta_fn

from curvlab.constants import (A2Mode, IsoperimetricConstants, ball_volume,
                               combination_constant, constants, sphere_area,
                               subcritical_constant)
from curvlab.errors import WrongRegime
from curvlab.exponents import InequalityParams


def test_ball_volume_low_dimensions():
    assert ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
    assert ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)
    assert ball_volume(5) == pytest.approx(8.0 * math.pi ** 2 / 15.0, rel=1e-14)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)


def test_sphere_equality_a2():
    iso = IsoperimetricConstants.sphere_equality(3)
    # equality for the unit sphere: |S|^{1/2} = A2 * |S| with |S| = 4 pi
    assert iso.A2 == pytest.approx((4.0 * math.pi) ** -0.5, rel=1e-14)
    assert iso.a2_mode is A2Mode.SPHERE_EQUALITY
    assert iso.caveats()


def test_c2_formula_n5():
    params = InequalityParams(n=5, p=2, r=1)
    iso = IsoperimetricConstants.sphere_equality(5)
    b = constants(params, iso)
    a1 = 5.0 * (8.0 * math.pi ** 2 / 15.0) ** 0.2
    expect = 3.0 * 2.0 * a1 ** -0.75 * iso.A2
    assert b.C2 == pytest.approx(expect, rel=1e-12)
    assert b.C1 is None and b.C3 is None


def test_c1_p1_borderline():
    # p = 1 with r = n-1 sits on the critical line and gives C1 = A2^{n-1}
    params = InequalityParams(n=4, p=1, r=3)
    iso = IsoperimetricConstants.sphere_equality(4)
    b = constants(params, iso)
    assert b.C1 == pytest.approx(iso.A2 ** 3, rel=1e-12)


def test_trudinger_constants_n4():
    params = InequalityParams(n=4, p=2, r=1)
    iso = IsoperimetricConstants.sphere_equality(4)
    b = constants(params, iso, c3_margin=2.0)
    # A = A1^{-n/((n-1)p')} A2^{n/p-1} = A1^{-2/3} A2 at n=4, p=2
    expect_A = iso.A1 ** (-2.0 / 3.0) * iso.A2
    assert b.A == pytest.approx(expect_A, rel=1e-12)
    assert b.C3 == pytest.approx(2.0 * expect_A, rel=1e-12)
    assert b.C4 == pytest.approx(4.0 / 3.0, rel=1e-12)
    # C4 tightens as the margin grows
    margins = [1.5, 2.0, 4.0]
    c4s = [constants(params, iso, c3_margin=m).C4 for m in margins]
    assert c4s[0] > c4s[1] > c4s[2] > 1.0


def test_combination_constant_matches_regimes():
    iso = IsoperimetricConstants.sphere_equality(4)
    params = InequalityParams(n=4, p=2, r=1)
    # on the critical line the two expressions for A coincide
    assert combination_constant(params, iso) == pytest.approx(
        iso.A1 ** (-4.0 / (3.0 * 2.0)) * iso.A2 ** (4.0 / 2.0 - 1.0), rel=1e-13)


def test_c2_monotone_in_r_with_large_a2():
    # algebraic monotonicity of the formula itself for A2 >= 1
    n, p = 12, 1.5
    iso = IsoperimetricConstants.user(n, a2=1.3)
    vals = []
    for r in (1.0, 1.5, 2.0, 2.5):
        params = InequalityParams(n=n, p=p, r=r)
        vals.append(constants(params, iso).C2)
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_wrong_regime_errors():
    iso = IsoperimetricConstants.sphere_equality(5)
    with pytest.raises(WrongRegime):
        # n < 1+r is outside every part of the theorem
        constants(InequalityParams(n=3, p=1, r=4), iso)
    with pytest.raises(WrongRegime):
        subcritical_constant(InequalityParams(n=3, p=2, r=1), iso, q=2.0)


class TestSubcriticalConstant:
    def test_tau_integral_is_beta_function(self):
        # independent oracle: int tau^{a-1}(1+tau)^{-(a+b)} = B(a, b)
        params = InequalityParams(n=5, p=2, r=1)
        iso = IsoperimetricConstants.sphere_equality(5)
        q, qc = 5.0, 10.0
        pprime = 2.0
        a = q / pprime
        bpar = (qc - q) / pprime
        A = combination_constant(params, iso)
        expect = (q / pprime) ** (1 / q) * (pprime / qc) ** (-1 / pprime) * A \
            * beta_fn(a, bpar) ** (1 / q)
        got = subcritical_constant(params, iso, q)
        assert got == pytest.approx(expect, rel=1e-9)

    def test_blowup_toward_critical_exponent(self):
        # the tau-integral behaves like B(q/p', (qc-q)/p') ~ p'/(qc-q), so the
        # constant diverges (through a 1/q-th root, hence slowly)
        params = InequalityParams(n=5, p=2, r=1)
        iso = IsoperimetricConstants.sphere_equality(5)
        qs = (8.0, 9.0, 9.9, 9.999, 9.999999999)
        vals = [subcritical_constant(params, iso, q) for q in qs]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 3.0 * vals[0]

    def test_q1_finite(self):
        params = InequalityParams(n=5, p=2, r=1)
        iso = IsoperimetricConstants.sphere_equality(5)
        assert math.isfinite(subcritical_constant(params, iso, 1.0))

    def test_p1_rejected(self):
        iso = IsoperimetricConstants.sphere_equality(5)
        with pytest.raises(WrongRegime):
            subcritical_constant(InequalityParams(n=5, p=1, r=1), iso, q=2.0)
