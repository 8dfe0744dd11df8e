import pytest
from fractions import Fraction

from scrollsmith.src.algebra_tools.fields import ScalarField, as_field
from scrollsmith.src.errors import BadPrimeError, ContextMismatchError


def test_field_validation():
    with pytest.raises(ValueError):
        ScalarField(4)
    with pytest.raises(ValueError):
        ScalarField.prime(1)

def test_as_field():
    assert as_field(None) == ScalarField.rationals()
    assert as_field(31) == ScalarField.prime(31)
    F = ScalarField.prime(7)
    assert as_field(F) is F

def test_prime_field_arithmetic(gf31):
    assert gf31.format(gf31(-1)) == "30"
    half = gf31.from_ratio(1, 2)
    assert half * gf31(2) == gf31.one
    assert gf31.to_int(gf31(40)) == 9
    assert str(gf31) == "GF(31)"

def test_prime_divides_denominator(gf31):
    with pytest.raises(BadPrimeError):
        gf31.from_ratio(1, 62)
    with pytest.raises(ZeroDivisionError):
        gf31.from_ratio(1, 0)

def test_rationals_parse_and_format(qq):
    assert qq.format(qq.parse("3/6")) == "1/2"
    assert qq.format(qq("-4")) == "-4"
    assert qq(Fraction(2, 4)) == qq.from_ratio(1, 2)
    assert qq.numer(qq.from_ratio(-6, 4)) == -3
    assert qq.denom(qq.from_ratio(-6, 4)) == 2

def test_reduce_rational_into_prime_field(qq, gf7):
    assert gf7.to_int(qq.reduce(qq.from_ratio(1, 2), gf7)) == 4
    with pytest.raises(ContextMismatchError):
        gf7.reduce(gf7(1), qq)

def test_to_int_rejects_fractions(qq):
    with pytest.raises(ValueError):
        qq.to_int(qq.from_ratio(1, 3))

def test_random_elements(qq, gf7, rng):
    values = [qq.to_int(qq.random_element(rng, bound=3)) for _ in range(50)]
    assert all(-3 <= x <= 3 for x in values)
    assert all(0 <= gf7.to_int(gf7.random_element(rng)) < 7 for _ in range(20))

def test_elements(gf7, qq):
    assert [gf7.to_int(x) for x in gf7.elements()] == list(range(7))
    with pytest.raises(ValueError):
        qq.elements()

def test_require_same(gf7, gf31):
    gf7.require_same(ScalarField.prime(7))
    with pytest.raises(ContextMismatchError):
        gf7.require_same(gf31)
