from fractions import Fraction

import hypothesis
import pytest

from conftest import extended
from src.models.errors import NotComparable, PowerZeroExponent, ValidationError
from src.models.extreal import INF, ZERO, ExtNonneg, ext_arith, ext_diff_eps, ext_pow, reciprocal, to_fraction


def test_infinity_absorbs_addition():
    assert INF + 3 == INF
    assert ExtNonneg(2) + ExtNonneg(3) == ExtNonneg(5)


def test_zero_times_infinity_is_zero():
    assert ZERO * INF == ZERO
    assert INF * ExtNonneg(Fraction(1, 3)) == INF


def test_power_conventions():
    assert ext_pow(0, -2) == INF
    assert ext_pow(0, Fraction(1, 2)) == ZERO
    assert ext_pow(INF, -1) == ZERO
    assert ext_pow(Fraction(4, 9), Fraction(1, 2)) == ExtNonneg(Fraction(2, 3))
    # 無理数になる冪は float
    assert ext_pow(2, Fraction(1, 2)) == pytest.approx(2 ** 0.5)


def test_power_rejects_zero_exponent():
    with pytest.raises(PowerZeroExponent):
        ext_pow(3, 0)


def test_lattice_difference_and_infinite_part():
    assert ExtNonneg(5).minus(3) == ExtNonneg(2)
    assert INF.minus(3) == INF
    assert INF.eps() == INF
    assert ExtNonneg(7).eps() == ZERO
    with pytest.raises(NotComparable):
        ExtNonneg(3).minus(5)


def test_reciprocal_swaps_zero_and_infinity():
    assert reciprocal(0) == INF
    assert reciprocal(INF) == ZERO
    assert reciprocal(4) == ExtNonneg(Fraction(1, 4))


def test_parsing():
    assert to_fraction("3/4") == Fraction(3, 4)
    assert to_fraction({"num": 1, "den": 3}) == Fraction(1, 3)
    assert ExtNonneg("∞").is_inf
    assert ExtNonneg(0.1).value == Fraction(1, 10)
    with pytest.raises(ValidationError):
        ExtNonneg(-1)
    with pytest.raises(ValidationError):
        to_fraction("abc")


def test_json_encoding():
    assert ExtNonneg(Fraction(2, 3)).to_json() == {"num": 2, "den": 3}
    assert INF.to_json() == "inf"


@hypothesis.given(extended(), extended(), extended())
def test_addition_is_a_commutative_monoid(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a + ZERO == a


@hypothesis.given(extended(), extended())
def test_difference_inverts_addition(a, b):
    assert (a + b).minus(b) + b == a + b
    if not b.is_inf:
        assert (a + b).minus(b) == a


@hypothesis.given(extended(), extended())
def test_order_is_total_and_compatible_with_addition(a, b):
    assert a <= b or b <= a
    assert a <= a + b


def test_ext_arith_bundles_operations():
    result = ext_arith(2, "inf", lam=3, p=-1)
    assert result["sum"] == INF
    assert result["product"] == INF
    assert result["scalar"] == ExtNonneg(6)
    assert result["power"] == ExtNonneg(Fraction(1, 2))
    assert "power" not in ext_arith(1, 1)
    with pytest.raises(ValidationError):
        ext_arith(1, 1, lam=-1)


def test_ext_diff_eps():
    assert ext_diff_eps(5, 3) == (ExtNonneg(2), ZERO)
    assert ext_diff_eps(INF, 3) == (INF, INF)
    with pytest.raises(NotComparable):
        ext_diff_eps(3, 5)
