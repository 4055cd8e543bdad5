"""精确标量与 F_p 约化"""

import math
from fractions import Fraction

import pytest

from app.algebra.scalars import (
    FpElem,
    IntegralityError,
    PrimeField,
    binom_exact,
    binom_mod,
    divide_and_reduce,
    normalize_scalar,
    reduce_mod,
)


def test_binom_exact():
    assert binom_exact(37, 4) == 66045
    assert binom_exact(5, 0) == 1
    assert binom_exact(3, 5) == 0
    assert binom_exact(3, -1) == 0


def test_binom_mod_matches_exact():
    for n in range(0, 501, 7):
        for k in range(11):
            assert binom_mod(n, k, 11).residue == math.comb(n, k) % 11


def test_binom_mod_requires_small_k():
    with pytest.raises(ValueError):
        binom_mod(30, 11, 11)


def test_reduce_mod_examples():
    assert reduce_mod(Fraction(1, 2), 11) == FpElem(6, 11)
    assert reduce_mod(-1, 19) == FpElem(18, 19)
    assert reduce_mod(Fraction(22, 3), 11) == FpElem(0, 11)


def test_reduce_mod_rejects_non_integral():
    with pytest.raises(IntegralityError, match="is not 11-integral"):
        reduce_mod(Fraction(5, 11), 11)


class TestPrimeField:
    def test_rejects_composite(self):
        with pytest.raises(ValueError):
            PrimeField(12)

    def test_rejects_non_int(self):
        with pytest.raises(TypeError):
            PrimeField(11.0)

    def test_field_axioms(self):
        field = PrimeField(11)
        elems = [field(v) for v in range(11)]
        for a in elems:
            assert a + field.zero == a
            assert a * field.one == a
            assert a + (-a) == field.zero
            if a:
                assert a * a.inverse() == field.one
                assert a ** -1 == a.inverse()
            for b in elems:
                assert a + b == b + a
                assert a * b == b * a
                assert (a - b) + b == a

    def test_mixed_int_arithmetic(self):
        field = PrimeField(19)
        a = field(5)
        assert a + 20 == FpElem(6, 19)
        assert 3 - a == FpElem(17, 19)
        assert 2 * a == FpElem(10, 19)
        assert a / 5 == field.one
        assert repr(field(9)) == "F19(9)"

    def test_zero_not_invertible(self):
        with pytest.raises(ZeroDivisionError):
            PrimeField(11).zero.inverse()

    def test_modulus_mismatch(self):
        with pytest.raises(ValueError):
            FpElem(1, 11) + FpElem(1, 19)


def test_divide_and_reduce():
    assert divide_and_reduce(110, 22, 11) == (5, True)
    assert divide_and_reduce(33, 22, 11) == (7, False)
    assert divide_and_reduce(0, 7, 11) == (0, True)
    with pytest.raises(IntegralityError):
        divide_and_reduce(5, 11, 11)


def test_divide_and_reduce_matches_reduce_mod():
    for value in range(-60, 61, 7):
        for divisor in (1, 3, 22, 121, 35):
            try:
                expected = reduce_mod(Fraction(value, divisor), 11).residue
            except IntegralityError:
                with pytest.raises(IntegralityError):
                    divide_and_reduce(value, divisor, 11)
                continue
            assert divide_and_reduce(value, divisor, 11)[0] == expected


def test_normalize_scalar():
    assert normalize_scalar(Fraction(6, 3)) == 2
    assert isinstance(normalize_scalar(Fraction(6, 3)), int)
    assert normalize_scalar(Fraction(1, 3)) == Fraction(1, 3)
