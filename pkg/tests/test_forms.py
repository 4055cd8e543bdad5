"""三元形式与 A-坐标"""

from fractions import Fraction

import pytest

from app.algebra.forms import (
    X1,
    X2,
    X3,
    Coords,
    HomForm,
    LinearForm,
    basis,
    expand_weighted_powers,
    mul_linears,
    multinomial,
    power_of_linear,
)
from tests.helpers import random_form, random_unimodular


def test_basis_order_and_size():
    assert basis(1) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert basis(2)[:3] == [(2, 0, 0), (1, 1, 0), (1, 0, 1)]
    assert len(basis(4)) == 15
    assert len(basis(8)) == 45
    with pytest.raises(ValueError):
        basis(-1)



@pytest.mark.parametrize("d", range(20))
def test_basis_size(d):
    indices = basis(d)
    assert len(indices) == (d + 1) * (d + 2) // 2
    assert len(set(indices)) == len(indices)
    assert all(sum(i) == d and min(i) >= 0 for i in indices)


def test_multinomial():
    assert multinomial((2, 1, 1)) == 12
    assert multinomial((4, 0, 0)) == 1


def test_power_of_linear_a_coords():
    form = power_of_linear(LinearForm.of(2, -1, 3), 3)
    assert form.kind is Coords.A
    assert form.coefficient((3, 0, 0)) == 8
    assert form.coefficient((1, 1, 1)) == -6
    assert form.to_monomial().coefficient((1, 1, 1)) == -36


def test_power_of_linear_rejects_degree_zero():
    with pytest.raises(ValueError):
        power_of_linear(LinearForm.of(1, 0, 0), 0)


def test_mul_linears():
    form = mul_linears([LinearForm.of(1, 1, 0), LinearForm.of(1, -1, 0)])
    assert form.coeffs == {(2, 0, 0): 1, (0, 2, 0): -1}
    square = mul_linears([LinearForm.of(1, 1, 0)], power=2)
    assert square.coeffs == {(2, 0, 0): 1, (1, 1, 0): 2, (0, 2, 0): 1}


def test_power_agrees_with_product(rng):
    for _ in range(5):
        l = random_form(rng)
        assert power_of_linear(l, 5).to_monomial() == mul_linears([l], power=5)


@pytest.mark.parametrize("d", range(1, 9))
def test_power_agrees_with_repeated_multiplication(rng, d):
    for _ in range(3):
        l = random_form(rng)
        assert power_of_linear(l, d).to_monomial() == mul_linears([l] * d)


@pytest.mark.parametrize("d", range(13))
def test_round_trip_from_monomial(rng, d):
    for _ in range(3):
        form = HomForm.from_dense(d, [rng.randint(-50, 50) for _ in basis(d)], Coords.MONOMIAL)
        assert form.to_a_coords().to_monomial() == form


@pytest.mark.parametrize("d", range(13))
def test_round_trip_from_a_coords(rng, d):
    for _ in range(3):
        values = [Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in basis(d)]
        form = HomForm.from_dense(d, values, Coords.A)
        assert form.to_monomial().to_a_coords() == form


def test_coordinate_round_trip():
    form = HomForm(3, Coords.MONOMIAL, {(1, 1, 1): 5, (3, 0, 0): 2})
    back = form.to_a_coords().to_monomial()
    assert back == form
    assert form.to_a_coords().coefficient((1, 1, 1)) == Fraction(5, 6)


def test_expand_weighted_powers_linear_in_terms(rng):
    terms = [(Fraction(1, 3), random_form(rng)), (-2, random_form(rng)), (5, random_form(rng))]
    total = expand_weighted_powers(terms, 4)
    summed = HomForm.zero(4, Coords.A)
    for weight, form in terms:
        summed = summed + power_of_linear(form, 4).scale(weight)
    assert total == summed


def test_expand_weighted_powers_rational_forms():
    terms = [(1, LinearForm.of(Fraction(1, 2), 0, 0)), (-1, LinearForm.of(0, Fraction(2, 3), 1))]
    form = expand_weighted_powers(terms, 3)
    assert form.coefficient((3, 0, 0)) == Fraction(1, 8)
    assert form.coefficient((0, 2, 1)) == Fraction(-4, 9)


def test_substitute_matches_linear_forms(rng):
    for _ in range(3):
        matrix = random_unimodular(rng)
        l = random_form(rng)
        lhs = power_of_linear(l, 4).substitute(matrix)
        rhs = power_of_linear(l.substitute(matrix), 4).to_monomial()
        assert lhs == rhs


def test_x1_order():
    form = HomForm.from_poly(X1**3 * X2 + X1**2 * X3**2, 4)
    assert form.x1_order() == 2
    assert HomForm.zero(4).x1_order() is None


def test_validation():
    with pytest.raises(ValueError):
        HomForm(3, Coords.MONOMIAL, {(1, 1, 0): 1})
    with pytest.raises(ValueError):
        LinearForm((1, 2))
    with pytest.raises(ValueError):
        HomForm.zero(2, Coords.A) + HomForm.zero(2, Coords.MONOMIAL)


def test_residues_in_basis_order():
    form = HomForm.from_poly(X1**2 * 12 - X2 * X3, 2)
    assert form.residues(11) == [1, 0, 0, 0, 10, 0]
    assert form.reduce(11).coefficient((1, 1, 0)) == 0
